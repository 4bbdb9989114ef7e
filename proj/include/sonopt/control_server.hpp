#pragma once

// WebSocket control surface for monitoring UIs.
//
// Inbound:  {"set": {"param": "<name>", "value": <number>}}
// Outbound: state frames at most kStateFrameHz times per second, identical for
//           every connected client:
//   {"generation_index": int|null, "buffer": [...]?, "partials": [...],
//    "params": {...}, "rms": {"p1": x, "p2": y}}
//   "buffer" is present only in the first frame after the generation changes
//   (and in the first frame a new client receives).
// Errors:   {"error": "unknown_param" | "not_live_tunable" | "invalid_value" | "bad_request",
//            "message": "..."}; the connection stays open.

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "sonopt/live.hpp"

namespace sonopt::control {

inline constexpr double kStateFrameHz = 20.0;
inline constexpr std::size_t kMaxQueuedFrames = 64;  // per client; a stalled client misses frames

inline nlohmann::json state_frame(const PublishedState& s, bool with_buffer) {
  nlohmann::json j;
  j["generation_index"] = s.generation_index ? nlohmann::json(*s.generation_index) : nlohmann::json(nullptr);
  if (with_buffer) j["buffer"] = s.buffer;
  j["partials"] = s.partials;
  j["params"] = s.params;
  j["rms"] = {{"p1", s.rms_p1}, {"p2", s.rms_p2}};
  return j;
}

inline std::string_view error_kind(Errc code) {
  switch (code) {
    case Errc::NotLiveTunable: return "not_live_tunable";
    default: return "invalid_value";
  }
}

/// Applies one inbound text message. Returns the error frame to send back,
/// or nothing on success.
inline std::optional<nlohmann::json> handle_inbound(LiveEngine& engine, std::string_view text) {
  auto error = [](std::string_view kind, const std::string& message) {
    return nlohmann::json{{"error", kind}, {"message", message}};
  };
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("set") || !j["set"].is_object()) {
    return error("bad_request", "expected {\"set\": {\"param\": name, \"value\": number}}");
  }
  const auto& set = j["set"];
  if (!set.contains("param") || !set["param"].is_string() || !set.contains("value") || !set["value"].is_number()) {
    return error("bad_request", "set needs a string param and a numeric value");
  }
  const auto name = set["param"].get<std::string>();
  if (!is_param_name(name)) return error("unknown_param", "unknown parameter '" + name + "'");
  try {
    engine.submit_param(name, set["value"].get<double>());
  } catch (const Error& e) {
    return error(error_kind(e.code()), e.what());
  }
  return std::nullopt;
}

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = boost::beast::websocket;
using tcp = boost::asio::ip::tcp;

class Server;

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, Server& server) : ws_(std::move(socket)), server_(server) {}

  void start();
  void send(std::shared_ptr<const std::string> text);
  void close() {
    beast::error_code ec;
    beast::get_lowest_layer(ws_).close(ec);
  }

 private:
  void read();
  void write_next();

  websocket::stream<tcp::socket> ws_;
  Server& server_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> outbox_;
  bool open_ = false;
};

/// Serves the control WebSocket on its own thread. All session I/O and the
/// frame timer run on that single thread.
class Server {
 public:
  Server(LiveEngine& engine, const std::string& address, std::uint16_t port)
      : engine_(engine), acceptor_(io_, {net::ip::make_address(address), port}), timer_(io_) {}

  ~Server() { stop(); }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }
  LiveEngine& engine() noexcept { return engine_; }

  void start() {
    accept();
    tick();
    thread_ = std::thread([this] { io_.run(); });
  }

  void stop() {
    if (!thread_.joinable()) return;
    net::post(io_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
      timer_.cancel();
      for (auto& s : sessions_) s->close();
      sessions_.clear();
      io_.stop();
    });
    thread_.join();
  }

  std::size_t client_count() const {
    std::lock_guard lock(count_mutex_);
    return client_count_;
  }

  // Session callbacks, io thread only.
  void joined(const std::shared_ptr<Session>& s) {
    sessions_.insert(s);
    set_count();
    auto state = engine_.state();
    s->send(std::make_shared<const std::string>(state_frame(*state, true).dump()));
  }

  void left(const std::shared_ptr<Session>& s) {
    sessions_.erase(s);
    set_count();
  }

 private:
  void set_count() {
    std::lock_guard lock(count_mutex_);
    client_count_ = sessions_.size();
  }

  void accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;  // acceptor closed
      std::make_shared<Session>(std::move(socket), *this)->start();
      accept();
    });
  }

  void tick() {
    timer_.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / kStateFrameHz)));
    timer_.async_wait([this](beast::error_code ec) {
      if (ec) return;
      broadcast();
      tick();
    });
  }

  void broadcast() {
    if (sessions_.empty()) return;
    auto state = engine_.state();
    const bool changed = state->generation_index != last_generation_;
    last_generation_ = state->generation_index;
    auto text = std::make_shared<const std::string>(state_frame(*state, changed).dump());
    for (auto& s : sessions_) s->send(text);
  }

  LiveEngine& engine_;
  net::io_context io_;
  tcp::acceptor acceptor_;
  net::steady_timer timer_;
  std::set<std::shared_ptr<Session>> sessions_;
  std::optional<std::uint64_t> last_generation_;
  mutable std::mutex count_mutex_;
  std::size_t client_count_ = 0;
  std::thread thread_;
};

inline void Session::start() {
  ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
  ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->open_ = true;
    self->server_.joined(self);
    self->read();
  });
}

inline void Session::read() {
  ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->open_ = false;
      self->server_.left(self);
      return;
    }
    const std::string text = beast::buffers_to_string(self->buffer_.data());
    self->buffer_.consume(self->buffer_.size());
    if (auto err = handle_inbound(self->server_.engine(), text)) {
      self->send(std::make_shared<const std::string>(err->dump()));
    }
    self->read();
  });
}

inline void Session::send(std::shared_ptr<const std::string> text) {
  if (!open_ || outbox_.size() >= kMaxQueuedFrames) return;
  outbox_.push_back(std::move(text));
  if (outbox_.size() == 1) write_next();
}

inline void Session::write_next() {
  ws_.text(true);
  ws_.async_write(net::buffer(*outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
    if (ec) {
      self->outbox_.clear();
      return;
    }
    self->outbox_.pop_front();
    if (!self->outbox_.empty()) self->write_next();
  });
}

}  // namespace sonopt::control
