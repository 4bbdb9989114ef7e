#pragma once

// Live operation: producers (OSC server, in-process harness, control
// endpoint) enqueue messages; the audio side pulls blocks and applies
// whatever is queued at each block boundary without ever waiting on a lock.

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sonopt/engine.hpp"

namespace sonopt {

struct ParamUpdate {
  std::string name;
  double value = 0.0;
};

using EngineMessage = std::variant<RawFront, ParamUpdate>;

/// Bounded in fronts only: on overflow the oldest queued front is dropped,
/// parameter updates are always kept.
class MessageQueue {
 public:
  explicit MessageQueue(std::size_t front_capacity = 64) : front_capacity_(front_capacity) {}

  void push(EngineMessage msg) {
    std::lock_guard lock(mutex_);
    if (std::holds_alternative<RawFront>(msg)) {
      if (queued_fronts_ >= front_capacity_) {
        auto oldest = std::find_if(items_.begin(), items_.end(),
                                   [](const EngineMessage& m) { return std::holds_alternative<RawFront>(m); });
        items_.erase(oldest);
        --queued_fronts_;
        dropped_fronts_.fetch_add(1, std::memory_order_relaxed);
      }
      ++queued_fronts_;
    }
    items_.push_back(std::move(msg));
  }

  /// Moves everything queued into `out`. Returns false without blocking if a
  /// producer holds the lock; the caller retries at the next block.
  bool try_drain(std::vector<EngineMessage>& out) {
    std::unique_lock lock(mutex_, std::try_to_lock);
    if (!lock.owns_lock()) return false;
    out.insert(out.end(), std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
    items_.clear();
    queued_fronts_ = 0;
    return true;
  }

  std::size_t dropped_fronts() const noexcept { return dropped_fronts_.load(std::memory_order_relaxed); }

 private:
  std::mutex mutex_;
  std::deque<EngineMessage> items_;
  std::size_t queued_fronts_ = 0;
  std::size_t front_capacity_;
  std::atomic<std::size_t> dropped_fronts_{0};
};

/// What monitors see of the engine; republished after every block.
struct PublishedState {
  std::optional<std::uint64_t> generation_index;
  std::vector<double> buffer;
  std::vector<double> partials;
  EngineParams params;
  double rms_p1 = 0.0;
  double rms_p2 = 0.0;
  std::uint64_t blocks_rendered = 0;
};

class LiveEngine {
 public:
  using WarningSink = std::function<void(const std::string&)>;

  explicit LiveEngine(const EngineConfig& config, std::size_t front_capacity = 64)
      : engine_(config), queue_(front_capacity) {
    auto initial = std::make_shared<PublishedState>();
    initial->params = engine_.params();
    state_ = std::move(initial);
  }

  MessageQueue& queue() noexcept { return queue_; }

  void set_warning_sink(WarningSink sink) { warn_ = std::move(sink); }

  void submit_front(RawFront front) { queue_.push(std::move(front)); }

  /// Validates against the current parameters before queueing.
  void submit_param(const std::string& name, double value) {
    check_live_param(current_params(), name, value);
    queue_.push(ParamUpdate{name, value});
  }

  /// Audio-side entry point.
  void pull(std::span<double> out) {
    pending_.clear();
    queue_.try_drain(pending_);
    for (auto& msg : pending_) apply(msg);
    engine_.render(out);
    ++blocks_;
    publish();
  }

  std::shared_ptr<const PublishedState> state() const {
    std::lock_guard lock(state_mutex_);
    return state_;
  }

  EngineParams current_params() const { return state()->params; }

  std::size_t rejected_messages() const noexcept { return rejected_.load(std::memory_order_relaxed); }

 private:
  void apply(EngineMessage& msg) {
    try {
      if (auto* f = std::get_if<RawFront>(&msg)) engine_.ingest(*f);
      else {
        auto& p = std::get<ParamUpdate>(msg);
        engine_.set_param(p.name, p.value);
      }
    } catch (const Error& e) {
      rejected_.fetch_add(1, std::memory_order_relaxed);
      if (warn_) warn_(e.what());
    }
  }

  void publish() {
    auto next = std::make_shared<PublishedState>();
    next->generation_index = engine_.generation_index();
    next->buffer.assign(engine_.wavetable().readable().begin(), engine_.wavetable().readable().end());
    next->partials.assign(engine_.partials().amplitudes().begin(), engine_.partials().amplitudes().end());
    next->params = engine_.params();
    next->rms_p1 = engine_.last_rms_p1();
    next->rms_p2 = engine_.last_rms_p2();
    next->blocks_rendered = blocks_;
    std::unique_lock lock(state_mutex_, std::try_to_lock);
    // A reader is copying the pointer; the next block publishes instead.
    if (lock.owns_lock()) state_ = std::move(next);
  }

  Engine engine_;
  MessageQueue queue_;
  std::vector<EngineMessage> pending_;
  mutable std::mutex state_mutex_;
  std::shared_ptr<const PublishedState> state_;
  std::uint64_t blocks_ = 0;
  std::atomic<std::size_t> rejected_{0};
  WarningSink warn_;
};

}  // namespace sonopt
