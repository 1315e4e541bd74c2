#include "drivesim/net/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <deque>
#include <stdexcept>
#include <thread>
#include <vector>

namespace drivesim::net {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxClientMessage = 1u << 20;
constexpr auto kCloseGrace = std::chrono::milliseconds(500);

class Connection : public Sink, public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Broker& broker)
      : ws_(std::move(socket)), strand_(ws_.get_executor()), timer_(strand_), broker_(broker) {}

  void run() {
    ws_.read_message_max(kMaxClientMessage);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(asio::bind_executor(strand_, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->id_ = self->broker_.connect(self);
      self->registered_ = true;
      self->read();
    }));
  }

  void deliver_text(std::string text) override { enqueue(std::make_shared<const std::string>(std::move(text)), false); }
  void deliver_binary(std::shared_ptr<const std::string> bytes) override { enqueue(std::move(bytes), true); }

  void close() override {
    asio::post(strand_, [self = shared_from_this()] {
      if (self->closing_) return;
      self->closing_ = true;
      if (!self->writing_) {
        self->graceful_close();
      } else {
        // Give queued writes a moment, then drop the socket.
        self->timer_.expires_after(kCloseGrace);
        self->timer_.async_wait([self](beast::error_code ec) {
          if (!ec) self->hard_close();
        });
      }
    });
  }

  std::size_t pending_bytes() const override { return pending_.load(); }

  /// Drops the socket and the broker session. Only call with the I/O thread stopped.
  void abort() { hard_close(); }

 private:
  struct Item {
    std::shared_ptr<const std::string> data;
    bool binary;
  };

  void enqueue(std::shared_ptr<const std::string> data, bool binary) {
    pending_ += data->size();
    asio::post(strand_, [self = shared_from_this(), item = Item{std::move(data), binary}]() mutable {
      if (self->dead_) {
        self->pending_ -= item.data->size();
        return;
      }
      self->queue_.push_back(std::move(item));
      if (!self->writing_) self->write_next();
    });
  }

  void write_next() {
    if (queue_.empty() || dead_) {
      writing_ = false;
      if (closing_ && !dead_) graceful_close();
      return;
    }
    writing_ = true;
    const Item& item = queue_.front();
    ws_.binary(item.binary);
    ws_.async_write(asio::buffer(*item.data),
                    asio::bind_executor(strand_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (self->dead_) {
                        self->queue_.clear();
                        self->writing_ = false;
                        return;
                      }
                      self->pending_ -= self->queue_.front().data->size();
                      self->queue_.pop_front();
                      if (ec) {
                        self->hard_close();
                        return;
                      }
                      self->write_next();
                    }));
  }

  void read() {
    ws_.async_read(buffer_, asio::bind_executor(strand_, [self = shared_from_this()](beast::error_code ec,
                                                                                        std::size_t) {
                     if (ec) {
                       self->hard_close();
                       return;
                     }
                     if (self->ws_.got_text()) {
                       const auto data = self->buffer_.cdata();
                       self->broker_.on_text(self->id_, std::string_view(static_cast<const char*>(data.data()),
                                                                         data.size()));
                     } else {
                       self->broker_.on_binary(self->id_);
                     }
                     self->buffer_.consume(self->buffer_.size());
                     if (!self->dead_) self->read();
                   }));
  }

  void graceful_close() {
    if (close_started_) return;
    close_started_ = true;
    timer_.expires_after(kCloseGrace);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->hard_close();
    });
    ws_.async_close(websocket::close_code::normal,
                    asio::bind_executor(strand_, [self = shared_from_this()](beast::error_code) {
                      self->hard_close();
                    }));
  }

  void hard_close() {
    if (dead_) return;
    dead_ = true;
    timer_.cancel();
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ignored);
    beast::get_lowest_layer(ws_).socket().close(ignored);
    if (registered_) broker_.disconnect(id_);
    // An in-flight write still references the front item; its handler clears
    // the queue.
    if (!writing_) queue_.clear();
    pending_ = 0;
  }

  websocket::stream<beast::tcp_stream> ws_;
  asio::any_io_executor strand_;  // the socket's strand
  asio::steady_timer timer_;
  Broker& broker_;
  Broker::SessionId id_ = 0;
  bool registered_ = false;
  beast::flat_buffer buffer_;
  std::deque<Item> queue_;
  std::atomic<std::size_t> pending_{0};
  bool writing_ = false;
  bool closing_ = false;
  bool close_started_ = false;
  bool dead_ = false;
};

}  // namespace

struct Server::Impl {
  Broker& broker;
  asio::io_context io;
  tcp::acceptor acceptor;
  std::thread thread;
  std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
  // Touched only on the I/O thread, then by stop() after it is joined.
  std::vector<std::weak_ptr<Connection>> connections;

  Impl(Broker& b, const std::string& address, std::uint16_t port) : broker(b), acceptor(io) {
    beast::error_code ec;
    const tcp::endpoint ep(asio::ip::make_address(address, ec), port);
    if (ec) throw std::runtime_error("invalid bind address '" + address + "': " + ec.message());
    acceptor.open(ep.protocol(), ec);
    if (!ec) acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) acceptor.bind(ep, ec);
    if (!ec) acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) {
      throw std::runtime_error("cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
    }
  }

  void accept() {
    acceptor.async_accept(asio::make_strand(io), [this](beast::error_code ec, tcp::socket socket) {
      if (ec == asio::error::operation_aborted) return;
      if (!ec) {
        socket.set_option(tcp::no_delay(true), ec);
        auto conn = std::make_shared<Connection>(std::move(socket), broker);
        std::erase_if(connections, [](const auto& w) { return w.expired(); });
        connections.push_back(conn);
        conn->run();
      }
      accept();
    });
  }
};

Server::Server(Broker& broker, const std::string& address, std::uint16_t port)
    : impl_(std::make_unique<Impl>(broker, address, port)) {}

Server::~Server() { stop(); }

void Server::start() {
  if (impl_->thread.joinable()) return;
  impl_->work.emplace(impl_->io.get_executor());
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->io.run(); });
}

void Server::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  asio::post(impl_->io, [this] {
    beast::error_code ignored;
    impl_->acceptor.close(ignored);
  });
  impl_->work.reset();
  impl_->io.stop();
  impl_->thread.join();
  // Sessions must not outlive the io_context their sockets belong to.
  for (const auto& w : impl_->connections) {
    if (auto c = w.lock()) c->abort();
  }
  impl_->connections.clear();
}

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

std::uint16_t port_from_env(std::uint16_t fallback) {
  const char* env = std::getenv("DRIVESIM_PORT");
  if (!env || !*env) return fallback;
  unsigned value = 0;
  const std::string_view s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value > 65535) return fallback;
  return static_cast<std::uint16_t>(value);
}

}  // namespace drivesim::net
