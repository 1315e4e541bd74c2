#include "drivesim/observation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "drivesim/hash.hpp"

namespace drivesim {

EgoRoute start_route(const WorldMap& map, WaypointId wp) {
  return {wp, map.waypoint(wp).successors.front()};
}

bool update_route(EgoRoute& route, const WorldMap& map, const geo::Vec2& position, double capture_radius) {
  const Waypoint& cur = map.waypoint(route.current_wp);
  const Waypoint& next = map.waypoint(route.next_wp);
  const geo::Vec2 edge = next.position - cur.position;
  if (geo::distance(position, next.position) < capture_radius || geo::dot(next.position - position, edge) <= 0.0) {
    route.current_wp = next.id;
    route.next_wp = next.successors.front();
    return true;
  }
  return false;
}

namespace {

void hash_doubles(Sha256& h, std::span<const double> values) {
  for (const double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    std::array<std::uint8_t, 8> le;
    for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(bits >> (8 * i));
    h.update(le);
  }
}

}  // namespace

std::string Observation::hash() const {
  Sha256 h;
  h.update(C);
  hash_doubles(h, R);
  hash_doubles(h, V);
  hash_doubles(h, N);
  return h.hex();
}

Observation build_observation(const dyn::VehicleState& state, const dyn::ControlInput& applied,
                              const EgoRoute& route, const WorldMap& map,
                              std::span<const CameraFrame* const> cameras) {
  Observation o;
  if (!cameras.empty()) {
    o.height = cameras.front()->height_px;
    for (const CameraFrame* f : cameras) {
      if (!f) throw std::invalid_argument("missing camera frame");
      if (f->mode != CameraFrame::Mode::rgb) throw std::invalid_argument("camera " + f->sensor_id + " is not rgb");
      if (f->height_px != o.height) throw std::invalid_argument("camera heights differ");
      o.width += f->width_px;
    }
    const auto row_bytes = static_cast<std::size_t>(o.width) * 3;
    o.C.resize(static_cast<std::size_t>(o.height) * row_bytes);
    std::size_t col = 0;
    for (const CameraFrame* f : cameras) {
      const auto src_row = static_cast<std::size_t>(f->width_px) * 3;
      for (int r = 0; r < o.height; ++r) {
        std::memcpy(o.C.data() + static_cast<std::size_t>(r) * row_bytes + col,
                    f->pixels.data() + static_cast<std::size_t>(r) * src_row, src_row);
      }
      col += src_row;
    }
  }

  const Waypoint& cur = map.waypoint(route.current_wp);
  const Waypoint& next = map.waypoint(route.next_wp);
  const geo::Vec2 pos = state.pose.position;
  const geo::Vec2 edge = next.position - cur.position;
  const double edge_len = geo::norm(edge);
  const geo::Vec2 dir = edge_len > 0.0 ? edge * (1.0 / edge_len) : geo::Vec2{1.0, 0.0};
  o.R = {geo::distance(pos, next.position), geo::cross(dir, pos - cur.position),
         geo::normalize_angle(std::atan2(dir.y, dir.x) - state.pose.heading),
         std::min(cur.speed_limit, next.speed_limit)};

  o.V = {state.speed, state.accel_long, state.accel_lat, state.yaw_rate, applied.steer, applied.throttle,
         applied.brake};

  const Waypoint* wp = &next;
  for (int i = 0; i < kNavWaypoints; ++i) {
    const geo::Vec2 d = wp->position - pos;
    o.N[2 * i] = geo::normalize_angle(std::atan2(d.y, d.x) - state.pose.heading);
    o.N[2 * i + 1] = geo::norm(d);
    wp = &map.waypoint(wp->successors.front());
  }
  return o;
}

ObservationStack::ObservationStack(std::size_t history_len) : history_len_(std::max<std::size_t>(1, history_len)) {}

void ObservationStack::push(Observation obs) {
  items_.push_back(std::move(obs));
  while (items_.size() > history_len_) items_.pop_front();
}

std::vector<Observation> ObservationStack::stacked() const {
  std::vector<Observation> out;
  if (items_.empty()) return out;
  for (std::size_t i = items_.size(); i < history_len_; ++i) out.push_back(items_.front());
  out.insert(out.end(), items_.begin(), items_.end());
  return out;
}

}  // namespace drivesim
