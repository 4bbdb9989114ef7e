#pragma once

// Command-line surface:
//
//   sonopt run    [--problem zdt1] [--algo nsga2] [--gens 250] [--seed 42] [--out run.wav] ...
//   sonopt listen [--port 9000] [--out live.wav] [--duration 0] ...
//   sonopt replay --log run.jsonl [--out run.wav] ...
//
// Every option may also come from a config file (--config FILE, INI style:
// `key = value` lines, with optional [run]/[listen]/[replay] sections for
// subcommand options). Command-line flags beat the file, the file beats the
// built-in defaults.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sonopt/params.hpp"

namespace sonopt {

enum class Mode { Run, Listen, Replay };

struct RunConfig {
  Mode mode = Mode::Run;

  // run
  std::string problem = "zdt1";
  std::string algorithm = "nsga2";
  std::size_t generations = 250;
  std::uint64_t seed = 42;
  bool live = false;

  // listen
  std::string osc_host = "127.0.0.1";
  std::uint16_t osc_port = 9000;
  double duration_s = 0.0;  // 0 = until interrupted

  // replay
  std::string log_path;

  // outputs
  std::string out_wav;
  std::string log_out;
  std::string snapshots_path;
  std::string spectrogram_path;
  bool float_wav = false;
  std::size_t spectrogram_window = 4096;
  std::size_t spectrogram_hop = 1024;

  std::uint16_t control_port = 8080;  // 0 disables the control endpoint

  /// Engine parameters given explicitly (flag or config file), by name.
  std::map<std::string, double> param_overrides;
  std::optional<double> epsilon;
  std::optional<double> increment;
  std::optional<double> keep_fraction;
  std::optional<std::uint64_t> throttle_seed;

  /// Applies the explicit settings on top of `base`.
  EngineConfig engine_config(EngineConfig base = {}) const {
    for (const auto& [name, value] : param_overrides) set_param(base.params, name, value);
    if (epsilon) base.recurrence.epsilon = *epsilon;
    if (increment) base.recurrence.increment = *increment;
    if (keep_fraction) base.recurrence.keep_fraction = *keep_fraction;
    if (throttle_seed) base.recurrence.throttle_seed = *throttle_seed;
    return base;
  }
};

/// Bad invocation, or a help request (exit_code 0).
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& message, int exit_code) : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

inline RunConfig parse_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  CLI::App app{"Sonification of bi-objective optimizer runs", "sonopt"};
  app.set_config("--config", "", "Read options from an INI-style key=value file");
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.require_subcommand(1, 1);

  const EngineParams defaults;
  struct ParamFlag {
    const char* flag;
    const char* param;
    double value;
    CLI::Option* opt = nullptr;
  };
  std::vector<ParamFlag> param_flags = {
      {"--scaling", "sample_value_scaling", defaults.sample_value_scaling},
      {"--osc-freq", "oscillator_hz", defaults.oscillator_hz},
      {"--fund-freq", "fundamental_hz", defaults.fundamental_hz},
      {"--gain1", "gain_p1", defaults.gain_p1},
      {"--gain2", "gain_p2", defaults.gain_p2},
      {"--sr", "sample_rate_hz", defaults.sample_rate_hz},
      {"--spg", "seconds_per_generation", defaults.seconds_per_generation},
      {"--buffer-size", "buffer_size_p1", static_cast<double>(defaults.buffer_size_p1)},
      {"--partials", "num_partials", static_cast<double>(defaults.num_partials)},
      {"--partial-buffer-size", "buffer_size_p2", static_cast<double>(defaults.buffer_size_p2)},
      {"--instances", "max_instances", static_cast<double>(defaults.max_instances)},
  };
  for (auto& pf : param_flags) {
    pf.opt = app.add_option(pf.flag, pf.value, std::string("Engine parameter ") + pf.param)->capture_default_str();
  }
  app.get_option("--gain1")->check(CLI::Range(0.0, 1.0));
  app.get_option("--gain2")->check(CLI::Range(0.0, 1.0));
  for (const char* positive : {"--scaling", "--osc-freq", "--fund-freq", "--sr", "--spg"}) {
    app.get_option(positive)->check(CLI::PositiveNumber);
  }

  double keep = 1.0, epsilon = 0.0, increment = 0.0;
  std::uint64_t throttle_seed = 0;
  auto* keep_opt = app.add_option("--recurrence-keep", keep, "Fraction of recurrent points passed to path 2")
                       ->check(CLI::Range(0.0, 1.0));
  auto* eps_opt = app.add_option("--epsilon", epsilon, "Recurrence match tolerance")->check(CLI::NonNegativeNumber);
  auto* inc_opt =
      app.add_option("--increment", increment, "Partial amplitude step per recurrent generation")->check(CLI::PositiveNumber);
  auto* tseed_opt = app.add_option("--throttle-seed", throttle_seed, "Seed for the recurrence filter");
  app.add_option("--control-port", cfg.control_port, "WebSocket control port (0 disables)")->capture_default_str();
  app.add_option("--out", cfg.out_wav, "WAV output path");
  app.add_flag("--float", cfg.float_wav, "Write 32-bit float WAV instead of 16-bit PCM");
  app.add_option("--snapshots", cfg.snapshots_path, "Per-generation buffer/partial snapshot JSON path");
  app.add_option("--spectrogram", cfg.spectrogram_path, "Spectrogram CSV path");
  app.add_option("--window", cfg.spectrogram_window, "Spectrogram window (power of two)")->capture_default_str();
  app.add_option("--hop", cfg.spectrogram_hop, "Spectrogram hop")->capture_default_str();
  app.add_option("--log-out", cfg.log_out, "Write the run event log (JSON lines) here");

  auto* run = app.add_subcommand("run", "Run a built-in optimizer and sonify it");
  run->fallthrough();
  run->add_option("--problem", cfg.problem, "Test problem")
      ->check(CLI::IsMember({"zdt1", "zdt4", "kursawe", "tanaka"}))
      ->capture_default_str();
  run->add_option("--algo", cfg.algorithm, "Optimizer")->check(CLI::IsMember({"nsga2", "moead"}))->capture_default_str();
  run->add_option("--gens", cfg.generations, "Generations")->check(CLI::PositiveNumber)->capture_default_str();
  run->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  run->add_flag("--live", cfg.live, "Pace the run in real time and serve the control endpoint");

  auto* listen = app.add_subcommand("listen", "Sonify fronts received over OSC/UDP");
  listen->fallthrough();
  listen->add_option("--port", cfg.osc_port, "UDP port")->capture_default_str();
  listen->add_option("--host", cfg.osc_host, "UDP listen address")->capture_default_str();
  listen->add_option("--duration", cfg.duration_s, "Seconds to listen (0 = until interrupted)")
      ->check(CLI::NonNegativeNumber);

  auto* replay = app.add_subcommand("replay", "Render a recorded run event log");
  replay->fallthrough();
  replay->add_option("--log", cfg.log_path, "Run event log (JSON lines)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    throw UsageError(out.str() + err.str(), code == 0 ? kExitOk : kExitUsage);
  }

  if (run->parsed()) cfg.mode = Mode::Run;
  else if (listen->parsed()) cfg.mode = Mode::Listen;
  else cfg.mode = Mode::Replay;

  for (const auto& pf : param_flags) {
    if (pf.opt->count() > 0) cfg.param_overrides[pf.param] = pf.value;
  }
  if (keep_opt->count() > 0) cfg.keep_fraction = keep;
  if (eps_opt->count() > 0) cfg.epsilon = epsilon;
  if (inc_opt->count() > 0) cfg.increment = increment;
  if (tseed_opt->count() > 0) cfg.throttle_seed = throttle_seed;

  try {
    validate(cfg.engine_config().params);
  } catch (const Error& e) {
    throw UsageError(e.what(), kExitUsage);
  }
  if (cfg.spectrogram_window == 0 || (cfg.spectrogram_window & (cfg.spectrogram_window - 1)) != 0) {
    throw UsageError("--window: must be a power of two", kExitUsage);
  }
  if (cfg.spectrogram_hop == 0 || cfg.spectrogram_hop > cfg.spectrogram_window) {
    throw UsageError("--hop: must be in [1, window]", kExitUsage);
  }
  return cfg;
}

}  // namespace sonopt
