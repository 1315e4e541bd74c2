// drivesim command-line entry point.
//
// Exit codes: 0 success, 1 validation or runtime error, 2 usage error,
// 3 replay divergence.

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "drivesim/dataset.hpp"
#include "drivesim/label_export.hpp"
#include "drivesim/log.hpp"
#include "drivesim/net/broker.hpp"
#include "drivesim/net/serve.hpp"
#include "drivesim/net/server.hpp"
#include "drivesim/scenario.hpp"
#include "drivesim/simulation.hpp"

namespace {

using namespace drivesim;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

ClockMode parse_mode(const std::string& m) { return m == "fast" ? ClockMode::fast : ClockMode::realtime; }

std::vector<CommandRecord> load_script(const std::string& path) {
  std::vector<CommandRecord> out;
  if (path.empty()) return out;
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(command_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.tick < b.tick; });
  return out;
}

void print_report(const RunReport& r) { std::cout << to_json(r).dump(2) << std::endl; }

struct ServeArgs {
  std::string scenario;
  std::uint16_t port = 0;
  bool port_set = false;
  std::string mode = "realtime";
  std::uint64_t ticks = 0;
  std::string out;
  std::string record_dir;
  std::string commands;
  bool no_server = false;
};

int run_serve(const ServeArgs& a, bool record) {
  Scenario sc = load_scenario(a.scenario);
  Simulation sim(std::move(sc));
  net::Broker broker(sim.scenario(), sim.dt());
  std::optional<net::Server> server;
  if (!a.no_server) {
    const std::uint16_t port = a.port_set ? a.port : net::port_from_env();
    server.emplace(broker, "0.0.0.0", port);
    server->start();
    log::info("listening", {{"port", server->port()}, {"scenario_hash", sim.scenario().hash}});
  }

  net::LoopOptions opts;
  opts.mode = parse_mode(a.mode);
  opts.ticks = a.ticks;
  opts.script = load_script(a.commands);
  if (record) {
    opts.record_dir = a.out;
    opts.record_from_start = true;
  } else if (!a.record_dir.empty()) {
    opts.record_dir = a.record_dir;
  }

  Pacer wall(ClockMode::fast, sim.dt());
  auto datasets = net::run_loop(sim, server ? &broker : nullptr, opts, &g_stop);
  if (server) server->stop();
  print_report(make_report(sim, wall.elapsed_seconds(), std::move(datasets)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  CLI::App app{"drivesim: headless driving simulator"};
  app.require_subcommand(1);
  const std::vector<std::string> modes = {"realtime", "fast"};

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the simulator and serve clients over WebSocket");
  serve->add_option("scenario", serve_args.scenario, "Scenario YAML")->required();
  serve->add_option("--port", serve_args.port, "Listen port (default $DRIVESIM_PORT or 9090)")
      ->each([&](const std::string&) { serve_args.port_set = true; });
  serve->add_option("--mode", serve_args.mode, "realtime or fast")->check(CLI::IsMember(modes));
  serve->add_option("--ticks", serve_args.ticks, "Stop after N ticks (0 = run until interrupted)");
  serve->add_option("--record-dir", serve_args.record_dir, "Directory for client-started recordings");
  serve->add_option("--commands", serve_args.commands, "Scripted commands (JSON lines)");

  ServeArgs record_args;
  auto* record = app.add_subcommand("record", "Serve with dataset recording enabled from tick 0");
  record->add_option("scenario", record_args.scenario, "Scenario YAML")->required();
  record->add_option("--out", record_args.out, "Dataset directory")->required();
  record->add_option("--ticks", record_args.ticks, "Stop after N ticks (0 = run until interrupted)");
  record->add_option("--port", record_args.port, "Listen port")->each([&](const std::string&) {
    record_args.port_set = true;
  });
  record->add_option("--mode", record_args.mode, "realtime or fast")->check(CLI::IsMember(modes));
  record->add_option("--commands", record_args.commands, "Scripted commands (JSON lines)");
  record->add_flag("--no-server", record_args.no_server, "Do not open a network port");

  std::string replay_dir;
  std::string replay_mode = "fast";
  auto* replay = app.add_subcommand("replay", "Re-run a dataset and verify its observations");
  replay->add_option("dataset", replay_dir, "Dataset directory")->required();
  replay->add_option("--mode", replay_mode, "realtime or fast")->check(CLI::IsMember(modes));

  std::string le_scenario, le_out, le_classes = "vehicle", le_camera, le_commands;
  std::uint64_t le_ticks = 0;
  auto* label = app.add_subcommand("label-export", "Headless label generation");
  label->add_option("scenario", le_scenario, "Scenario YAML")->required();
  label->add_option("--out", le_out, "Output directory")->required();
  label->add_option("--ticks", le_ticks, "Ticks to simulate")->required();
  label->add_option("--classes", le_classes, "Comma-separated classes to label (default vehicle)");
  label->add_option("--camera", le_camera, "Camera id (default: first camera)");
  label->add_option("--commands", le_commands, "Scripted commands (JSON lines)");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Load and check a scenario");
  validate->add_option("scenario", validate_path, "Scenario YAML")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      const Scenario sc = load_scenario(validate_path);
      std::cout << nlohmann::json{{"valid", true}, {"scenario_hash", sc.hash}}.dump() << std::endl;
      return 0;
    }
    if (*serve) return run_serve(serve_args, false);
    if (*record) return run_serve(record_args, true);
    if (*replay) {
      const ReplayResult r = replay_dataset(replay_dir, parse_mode(replay_mode));
      nlohmann::json j = {{"ok", r.ok}, {"samples_checked", r.samples_checked}, {"message", r.message}};
      j["divergent_tick"] = r.divergent_tick ? nlohmann::json(*r.divergent_tick) : nlohmann::json(nullptr);
      std::cout << j.dump(2) << std::endl;
      if (r.ok) return 0;
      if (r.divergent_tick) {
        std::cerr << "divergence at tick " << *r.divergent_tick << ": " << r.message << std::endl;
        return 3;
      }
      std::cerr << r.message << std::endl;
      return 1;
    }
    if (*label) {
      LabelExportOptions opts;
      opts.out_dir = le_out;
      opts.ticks = le_ticks;
      try {
        opts.classes = parse_class_list(le_classes);
      } catch (const std::invalid_argument& e) {
        std::cerr << "--classes: " << e.what() << std::endl;
        return 2;
      }
      if (!le_camera.empty()) opts.camera = le_camera;
      opts.script = load_script(le_commands);
      Simulation sim(load_scenario(le_scenario));
      Pacer wall(ClockMode::fast, sim.dt());
      const auto result = export_labels(sim, opts);
      std::vector<std::string> files;
      for (const auto& f : result.label_files) files.push_back(f.string());
      print_report(make_report(sim, wall.elapsed_seconds(), {le_out}));
      log::info("labels written", {{"camera", result.camera_id}, {"files", files.size()}});
      return 0;
    }
  } catch (const ScenarioError& e) {
    std::cerr << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 2;
}
