#pragma once

// Runs a built-in optimizer and hands the non-dominated set of every
// generation to a sink: the in-process engine, a log, or an OSC socket.

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sonopt/event_log.hpp"
#include "sonopt/live.hpp"
#include "sonopt/moead.hpp"
#include "sonopt/nsga2.hpp"
#include "sonopt/osc_server.hpp"

namespace sonopt {

class FrontSink {
 public:
  virtual ~FrontSink() = default;
  virtual void emit(const RawFront& front) = 0;
};

class EngineSink final : public FrontSink {
 public:
  explicit EngineSink(LiveEngine& engine) : engine_(engine) {}
  void emit(const RawFront& front) override { engine_.submit_front(front); }

 private:
  LiveEngine& engine_;
};

class OscSink final : public FrontSink {
 public:
  OscSink(const std::string& host, std::uint16_t port) : sender_(host, port) {}
  void emit(const RawFront& front) override { sender_.send(osc::from_raw_front(front)); }

 private:
  osc::Sender sender_;
};

/// Paces another sink so each generation lasts `period` of wall-clock time.
class PacedSink final : public FrontSink {
 public:
  PacedSink(FrontSink& inner, std::chrono::duration<double> period)
      : inner_(inner), period_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(period)) {}

  void emit(const RawFront& front) override {
    if (started_) std::this_thread::sleep_until(next_);
    else next_ = std::chrono::steady_clock::now();
    started_ = true;
    inner_.emit(front);
    next_ += period_;
  }

 private:
  FrontSink& inner_;
  std::chrono::steady_clock::duration period_;
  std::chrono::steady_clock::time_point next_{};
  bool started_ = false;
};

enum class Algorithm { Nsga2, Moead };

inline Algorithm parse_algorithm(std::string_view name) {
  if (name == "nsga2") return Algorithm::Nsga2;
  if (name == "moead") return Algorithm::Moead;
  throw Error(Errc::InvalidParam, "unknown algorithm '" + std::string(name) + "'");
}

inline std::string_view algorithm_name(Algorithm a) { return a == Algorithm::Nsga2 ? "nsga2" : "moead"; }

/// Called once per generation with the population it produced.
using GenerationObserver = std::function<void(const Population&)>;

/// Emits `generations` fronts, indices 0..generations-1, where index 0 is the
/// initial population. The returned log holds every emitted front; `sink` and
/// `observer` are optional.
inline RunEventLog run_algorithm(const Problem& problem, Algorithm algorithm, std::size_t generations,
                                 std::uint64_t seed, FrontSink* sink = nullptr,
                                 const GenerationObserver& observer = {}) {
  RunEventLog log;
  log.header.problem = problem.name;
  log.header.algorithm = std::string(algorithm_name(algorithm));
  log.header.seed = seed;
  const std::string source = log.header.algorithm + "/" + problem.name;

  auto emit = [&](const Population& pop, std::vector<Point> front) {
    RawFront raw{pop.generation_index, std::move(front), source};
    if (sink) sink->emit(raw);
    if (observer) observer(pop);
    log.add_front(std::move(raw));
  };

  auto drive = [&](auto& optimizer) {
    for (std::size_t g = 0; g < generations; ++g) {
      if (g > 0) optimizer.step();
      emit(optimizer.population(), optimizer.current_front());
    }
  };

  if (algorithm == Algorithm::Nsga2) {
    Nsga2 opt(problem, seed);
    drive(opt);
  } else {
    Moead opt(problem, seed);
    drive(opt);
  }
  return log;
}

}  // namespace sonopt
