#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sonopt/error.hpp"
#include "sonopt/path2_recurrence.hpp"

namespace sonopt {

/// Engine parameter set. Defaults suit min-max normalized fronts of up to
/// 100 points at 48 kHz.
struct EngineParams {
  double sample_value_scaling = 500.0;
  int buffer_size_p1 = 202;
  int buffer_size_p2 = 256;
  int num_partials = 100;
  double oscillator_hz = 80.0;
  double fundamental_hz = 80.0;
  double gain_p1 = 0.3;
  double gain_p2 = 0.075;
  int max_instances = 100;
  double sample_rate_hz = 48000.0;
  double seconds_per_generation = 0.5;

  /// Largest front both paths can take in one generation.
  std::size_t max_points() const noexcept { return static_cast<std::size_t>(buffer_size_p1 / 2); }

  friend bool operator==(const EngineParams&, const EngineParams&) = default;
};

/// Recurrence matching and throttling; fixed for the lifetime of a run.
struct RecurrenceSettings {
  double epsilon = kDefaultRecurrenceEpsilon;
  double increment = kDefaultAmplitudeIncrement;
  double keep_fraction = 1.0;
  std::uint64_t throttle_seed = 0;
  bool filter_nondominated = true;

  friend bool operator==(const RecurrenceSettings&, const RecurrenceSettings&) = default;
};

struct EngineConfig {
  EngineParams params;
  RecurrenceSettings recurrence;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

inline constexpr std::array<std::string_view, 11> kParamNames = {
    "sample_value_scaling", "buffer_size_p1", "buffer_size_p2", "num_partials",
    "oscillator_hz",        "fundamental_hz", "gain_p1",        "gain_p2",
    "max_instances",        "sample_rate_hz", "seconds_per_generation"};

inline constexpr std::array<std::string_view, 5> kLiveTunable = {"sample_value_scaling", "oscillator_hz",
                                                                  "fundamental_hz", "gain_p1", "gain_p2"};

constexpr bool is_param_name(std::string_view name) noexcept {
  for (auto n : kParamNames)
    if (n == name) return true;
  return false;
}

constexpr bool is_live_tunable(std::string_view name) noexcept {
  for (auto n : kLiveTunable)
    if (n == name) return true;
  return false;
}

inline void validate(const EngineParams& p) {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidParam, what); };
  if (!(p.sample_value_scaling > 0.0) || !std::isfinite(p.sample_value_scaling)) fail("sample_value_scaling must be > 0");
  if (!(p.oscillator_hz > 0.0) || !std::isfinite(p.oscillator_hz)) fail("oscillator_hz must be > 0");
  if (!(p.fundamental_hz > 0.0) || !std::isfinite(p.fundamental_hz)) fail("fundamental_hz must be > 0");
  if (!(p.gain_p1 >= 0.0 && p.gain_p1 <= 1.0)) fail("gain_p1 must be in [0,1]");
  if (!(p.gain_p2 >= 0.0 && p.gain_p2 <= 1.0)) fail("gain_p2 must be in [0,1]");
  if (!(p.sample_rate_hz > 0.0) || !std::isfinite(p.sample_rate_hz)) fail("sample_rate_hz must be > 0");
  if (!(p.sample_rate_hz > 2.0 * p.oscillator_hz)) fail("sample_rate_hz must exceed twice oscillator_hz");
  if (!(p.seconds_per_generation > 0.0) || !std::isfinite(p.seconds_per_generation)) fail("seconds_per_generation must be > 0");
  if (p.num_partials < 1) fail("num_partials must be >= 1");
  if (p.buffer_size_p1 < 2) fail("buffer_size_p1 must be >= 2");
  if (p.buffer_size_p2 < 2 * p.num_partials) fail("buffer_size_p2 must be >= 2 * num_partials");
  if (p.max_instances < p.num_partials) fail("max_instances must be >= num_partials");
}

/// Assigns one parameter by name. Validates the resulting set as a whole.
inline void set_param(EngineParams& p, std::string_view name, double value) {
  EngineParams next = p;
  auto as_int = [&]() {
    if (value != std::floor(value)) throw Error(Errc::InvalidParam, std::string(name) + " must be an integer");
    return static_cast<int>(value);
  };
  if (name == "sample_value_scaling") next.sample_value_scaling = value;
  else if (name == "buffer_size_p1") next.buffer_size_p1 = as_int();
  else if (name == "buffer_size_p2") next.buffer_size_p2 = as_int();
  else if (name == "num_partials") next.num_partials = as_int();
  else if (name == "oscillator_hz") next.oscillator_hz = value;
  else if (name == "fundamental_hz") next.fundamental_hz = value;
  else if (name == "gain_p1") next.gain_p1 = value;
  else if (name == "gain_p2") next.gain_p2 = value;
  else if (name == "max_instances") next.max_instances = as_int();
  else if (name == "sample_rate_hz") next.sample_rate_hz = value;
  else if (name == "seconds_per_generation") next.seconds_per_generation = value;
  else throw Error(Errc::InvalidParam, "unknown parameter '" + std::string(name) + "'");
  validate(next);
  p = next;
}

/// Rejects names outside the live-tunable set and out-of-range values.
inline void check_live_param(const EngineParams& current, std::string_view name, double value) {
  if (!is_param_name(name)) throw Error(Errc::InvalidParam, "unknown parameter '" + std::string(name) + "'");
  if (!is_live_tunable(name)) throw Error(Errc::NotLiveTunable, std::string(name) + " cannot change during a run");
  EngineParams scratch = current;
  set_param(scratch, name, value);
}

inline void to_json(nlohmann::json& j, const EngineParams& p) {
  j = nlohmann::json{{"sample_value_scaling", p.sample_value_scaling},
                     {"buffer_size_p1", p.buffer_size_p1},
                     {"buffer_size_p2", p.buffer_size_p2},
                     {"num_partials", p.num_partials},
                     {"oscillator_hz", p.oscillator_hz},
                     {"fundamental_hz", p.fundamental_hz},
                     {"gain_p1", p.gain_p1},
                     {"gain_p2", p.gain_p2},
                     {"max_instances", p.max_instances},
                     {"sample_rate_hz", p.sample_rate_hz},
                     {"seconds_per_generation", p.seconds_per_generation}};
}

inline void from_json(const nlohmann::json& j, EngineParams& p) {
  EngineParams out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw Error(Errc::InvalidParam, "parameter " + key + " is not a number");
    set_param(out, key, value.get<double>());
  }
  p = out;
}

inline void to_json(nlohmann::json& j, const RecurrenceSettings& r) {
  j = nlohmann::json{{"epsilon", r.epsilon},
                     {"increment", r.increment},
                     {"keep_fraction", r.keep_fraction},
                     {"throttle_seed", r.throttle_seed},
                     {"filter_nondominated", r.filter_nondominated}};
}

inline void from_json(const nlohmann::json& j, RecurrenceSettings& r) {
  RecurrenceSettings d;
  r.epsilon = j.value("epsilon", d.epsilon);
  r.increment = j.value("increment", d.increment);
  r.keep_fraction = j.value("keep_fraction", d.keep_fraction);
  r.throttle_seed = j.value("throttle_seed", d.throttle_seed);
  r.filter_nondominated = j.value("filter_nondominated", d.filter_nondominated);
}

inline void to_json(nlohmann::json& j, const EngineConfig& c) {
  j = nlohmann::json{{"params", c.params}, {"recurrence", c.recurrence}};
}

inline void from_json(const nlohmann::json& j, EngineConfig& c) {
  c.params = j.value("params", EngineParams{});
  c.recurrence = j.value("recurrence", RecurrenceSettings{});
}

}  // namespace sonopt
