#pragma once

// UDP transport for the OSC schema in osc.hpp.

#include <atomic>
#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>

#include <boost/asio.hpp>

#include "sonopt/live.hpp"
#include "sonopt/osc.hpp"

namespace sonopt::osc {

/// Receives datagrams on its own thread and forwards decoded messages to a
/// LiveEngine. Malformed packets are counted and reported, never fatal.
class Server {
 public:
  struct Stats {
    std::atomic<std::uint64_t> packets{0};
    std::atomic<std::uint64_t> fronts{0};
    std::atomic<std::uint64_t> params{0};
    std::atomic<std::uint64_t> rejected{0};
    std::atomic<std::uint64_t> stale{0};
    std::atomic<std::uint64_t> gaps{0};
  };

  Server(LiveEngine& engine, const std::string& address, std::uint16_t port)
      : engine_(engine), socket_(io_, {boost::asio::ip::make_address(address), port}) {}

  ~Server() { stop(); }

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  std::uint16_t port() const { return socket_.local_endpoint().port(); }
  const Stats& stats() const noexcept { return stats_; }

  void set_warning_sink(LiveEngine::WarningSink sink) { warn_ = std::move(sink); }

  /// Sees every accepted front on the receive thread, before it is queued.
  void set_front_tap(std::function<void(const RawFront&)> tap) { tap_ = std::move(tap); }
  void set_param_tap(std::function<void(const ParamMessage&)> tap) { param_tap_ = std::move(tap); }

  void start() {
    receive();
    thread_ = std::thread([this] { io_.run(); });
  }

  void stop() {
    io_.stop();
    if (thread_.joinable()) thread_.join();
  }

  /// Decodes and routes one datagram. Public so tests can drive it without a socket.
  void handle(std::span<const std::uint8_t> bytes) {
    stats_.packets.fetch_add(1);
    try {
      const Message msg = decode(bytes);
      if (const auto* f = std::get_if<FrontMessage>(&msg)) {
        auto outcome = sequencer_.accept(*f);
        if (!outcome.front) {
          stats_.stale.fetch_add(1);
          return;
        }
        if (outcome.gap) {
          stats_.gaps.fetch_add(1);
          if (warn_) warn_("generation gap before " + std::to_string(outcome.front->generation_index));
        }
        validate_raw(*outcome.front);
        if (tap_) tap_(*outcome.front);
        engine_.submit_front(std::move(*outcome.front));
        stats_.fronts.fetch_add(1);
      } else {
        const auto& p = std::get<ParamMessage>(msg);
        engine_.submit_param(p.name, p.value);
        if (param_tap_) param_tap_(p);
        stats_.params.fetch_add(1);
      }
    } catch (const Error& e) {
      stats_.rejected.fetch_add(1);
      if (warn_) warn_(std::string("dropped packet: ") + e.what());
    }
  }

 private:
  void receive() {
    socket_.async_receive_from(boost::asio::buffer(buffer_), sender_, [this](boost::system::error_code ec, std::size_t n) {
      if (ec == boost::asio::error::operation_aborted) return;
      if (!ec) handle(std::span<const std::uint8_t>(buffer_.data(), n));
      receive();
    });
  }

  LiveEngine& engine_;
  boost::asio::io_context io_;
  boost::asio::ip::udp::socket socket_;
  boost::asio::ip::udp::endpoint sender_;
  std::array<std::uint8_t, 65536> buffer_{};
  FrontSequencer sequencer_;
  Stats stats_;
  std::thread thread_;
  LiveEngine::WarningSink warn_;
  std::function<void(const RawFront&)> tap_;
  std::function<void(const ParamMessage&)> param_tap_;
};

/// Fire-and-forget sender.
class Sender {
 public:
  Sender(const std::string& host, std::uint16_t port)
      : socket_(io_), target_(boost::asio::ip::make_address(host), port) {
    socket_.open(target_.protocol());
  }

  void send(const Message& m) {
    const auto bytes = encode(m);
    boost::system::error_code ec;
    socket_.send_to(boost::asio::buffer(bytes), target_, 0, ec);
  }

 private:
  boost::asio::io_context io_;
  boost::asio::ip::udp::socket socket_;
  boost::asio::ip::udp::endpoint target_;
};

}  // namespace sonopt::osc
