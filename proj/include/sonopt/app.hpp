#pragma once

// Orchestration behind the sonopt command: offline runs, replays, and the
// live modes (paced in-process run, OSC listener). There is no audio device
// backend; live modes render in real time into memory and write the result
// to --out when they finish.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "sonopt/cli.hpp"
#include "sonopt/control_server.hpp"
#include "sonopt/engine.hpp"
#include "sonopt/event_log.hpp"
#include "sonopt/harness.hpp"
#include "sonopt/live.hpp"
#include "sonopt/osc_server.hpp"
#include "sonopt/spectral.hpp"
#include "sonopt/wav.hpp"

namespace sonopt {

inline std::atomic<bool>& interrupted() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::Io, "cannot open " + path + " for writing");
  os << text;
  if (!os) throw Error(Errc::Io, "short write to " + path);
}

inline void write_outputs(const RunConfig& cfg, const EngineConfig& config, const std::vector<double>& audio,
                          const std::vector<GenerationSnapshot>* snapshots, const RunEventLog* log, std::ostream& out) {
  if (!cfg.out_wav.empty()) {
    const auto format = cfg.float_wav ? WavFormat::Float32 : WavFormat::Pcm16;
    write_file(cfg.out_wav, encode_wav(audio, static_cast<std::uint32_t>(config.params.sample_rate_hz), format));
    out << "wrote " << cfg.out_wav << " (" << audio.size() << " frames)\n";
  }
  if (!cfg.snapshots_path.empty()) {
    if (!snapshots) throw Error(Errc::InvalidParam, "--snapshots is only available for offline rendering");
    write_text(cfg.snapshots_path, snapshots_json(*snapshots).dump() + "\n");
    out << "wrote " << cfg.snapshots_path << "\n";
  }
  if (!cfg.spectrogram_path.empty()) {
    std::ofstream os(cfg.spectrogram_path, std::ios::binary);
    if (!os) throw Error(Errc::Io, "cannot open " + cfg.spectrogram_path + " for writing");
    write_spectrogram_csv(os, spectrogram_export(audio, cfg.spectrogram_window, cfg.spectrogram_hop));
    out << "wrote " << cfg.spectrogram_path << "\n";
  }
  if (!cfg.log_out.empty() && log) {
    std::ofstream os(cfg.log_out, std::ios::binary);
    if (!os) throw Error(Errc::Io, "cannot open " + cfg.log_out + " for writing");
    write_jsonl(os, *log);
    out << "wrote " << cfg.log_out << "\n";
  }
}

/// Pulls blocks from a live engine at the sample rate's pace until `stop`.
class RealtimeRenderer {
 public:
  RealtimeRenderer(LiveEngine& engine, double sample_rate) : engine_(engine), sample_rate_(sample_rate) {}
  ~RealtimeRenderer() { stop(); }

  void start() {
    thread_ = std::thread([this] { loop(); });
  }

  void stop() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
  }

  /// Only valid after stop().
  const std::vector<double>& audio() const noexcept { return audio_; }

 private:
  void loop() {
    using clock = std::chrono::steady_clock;
    const auto block_period = std::chrono::duration_cast<clock::duration>(
        std::chrono::duration<double>(static_cast<double>(kRenderBlockFrames) / sample_rate_));
    std::vector<double> block(kRenderBlockFrames);
    auto next = clock::now();
    while (!stop_) {
      engine_.pull(block);
      audio_.insert(audio_.end(), block.begin(), block.end());
      next += block_period;
      std::this_thread::sleep_until(next);
    }
  }

  LiveEngine& engine_;
  double sample_rate_;
  std::atomic<bool> stop_{false};
  std::vector<double> audio_;
  std::thread thread_;
};

inline std::unique_ptr<control::Server> start_control(const RunConfig& cfg, LiveEngine& engine, std::ostream& out) {
  if (cfg.control_port == 0) return nullptr;
  auto server = std::make_unique<control::Server>(engine, "127.0.0.1", cfg.control_port);
  server->start();
  out << "control endpoint ws://127.0.0.1:" << server->port() << "\n";
  return server;
}

}  // namespace detail

inline int run_offline(const RunConfig& cfg, std::ostream& out) {
  const Problem problem = make_problem(cfg.problem);
  RunEventLog log = run_algorithm(problem, parse_algorithm(cfg.algorithm), cfg.generations, cfg.seed);
  log.header.config = cfg.engine_config();
  const RenderResult r = render_run(log, log.header.config);
  detail::write_outputs(cfg, log.header.config, r.audio, &r.snapshots, &log, out);
  return kExitOk;
}

inline int run_live(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const EngineConfig config = cfg.engine_config();
  LiveEngine engine(config);
  engine.set_warning_sink([&err](const std::string& w) { err << "warning: " << w << "\n"; });
  auto control = detail::start_control(cfg, engine, out);
  detail::RealtimeRenderer renderer(engine, config.params.sample_rate_hz);
  renderer.start();

  EngineSink engine_sink(engine);
  PacedSink paced(engine_sink, std::chrono::duration<double>(config.params.seconds_per_generation));
  RunEventLog log = run_algorithm(make_problem(cfg.problem), parse_algorithm(cfg.algorithm), cfg.generations, cfg.seed,
                                  &paced);
  log.header.config = config;
  std::this_thread::sleep_for(std::chrono::duration<double>(config.params.seconds_per_generation));
  renderer.stop();
  if (control) control->stop();
  detail::write_outputs(cfg, config, renderer.audio(), nullptr, &log, out);
  return kExitOk;
}

inline int listen(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const EngineConfig config = cfg.engine_config();
  LiveEngine engine(config);
  auto warn = [&err](const std::string& w) { err << "warning: " << w << "\n"; };
  engine.set_warning_sink(warn);

  RunEventLog log;
  log.header.problem = "external";
  log.header.algorithm = "external";
  log.header.config = config;
  std::mutex log_mutex;
  std::optional<std::uint64_t> last_gen;

  osc::Server server(engine, cfg.osc_host, cfg.osc_port);
  server.set_warning_sink(warn);
  server.set_front_tap([&](const RawFront& f) {
    std::lock_guard lock(log_mutex);
    log.add_front(f);
    last_gen = f.generation_index;
  });
  server.set_param_tap([&](const osc::ParamMessage& p) {
    std::lock_guard lock(log_mutex);
    log.add_param(last_gen ? *last_gen + 1 : 0, p.name, p.value);
  });
  auto control = detail::start_control(cfg, engine, out);
  err << "note: no audio device backend; rendering to memory";
  err << (cfg.out_wav.empty() ? " (pass --out to keep it)\n" : " for " + cfg.out_wav + "\n");
  out << "listening for OSC on udp://" << cfg.osc_host << ":" << server.port() << "\n" << std::flush;

  detail::RealtimeRenderer renderer(engine, config.params.sample_rate_hz);
  server.start();
  renderer.start();
  const auto until = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                            std::chrono::duration<double>(cfg.duration_s));
  while (!interrupted() && (cfg.duration_s <= 0.0 || std::chrono::steady_clock::now() < until)) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  server.stop();
  renderer.stop();
  if (control) control->stop();

  const auto& s = server.stats();
  out << "received " << s.fronts.load() << " fronts, " << s.params.load() << " params; rejected "
      << s.rejected.load() << ", stale " << s.stale.load() << ", gaps " << s.gaps.load() << "\n";
  std::lock_guard lock(log_mutex);
  detail::write_outputs(cfg, config, renderer.audio(), nullptr, &log, out);
  return kExitOk;
}

inline int replay(const RunConfig& cfg, std::ostream& out) {
  std::ifstream is(cfg.log_path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + cfg.log_path);
  RunEventLog log = read_jsonl(is);
  const EngineConfig config = cfg.engine_config(log.header.config);
  validate(config.params);
  const RenderResult r = render_run(log, config);
  detail::write_outputs(cfg, config, r.audio, &r.snapshots, nullptr, out);
  return kExitOk;
}

/// Full command: parse, dispatch, map failures to exit codes.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  try {
    cfg = parse_cli(argc, argv);
  } catch (const UsageError& e) {
    (e.exit_code() == kExitOk ? out : err) << e.what();
    return e.exit_code();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    switch (cfg.mode) {
      case Mode::Run: return cfg.live ? run_live(cfg, out, err) : run_offline(cfg, out);
      case Mode::Listen: return listen(cfg, out, err);
      case Mode::Replay: return replay(cfg, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitRuntime;
}

}  // namespace sonopt
