// Acceptance checks. Each criterion prints one PASS/FAIL line; the exit code
// is nonzero when any selected criterion fails.
//
//   acceptance            run everything
//   acceptance <name>...  run the named criteria

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "formula_oracle.hpp"
#include "sonopt/engine.hpp"
#include "sonopt/harness.hpp"
#include "sonopt/osc.hpp"
#include "sonopt/path1_shape.hpp"
#include "sonopt/path2_recurrence.hpp"
#include "sonopt/problems.hpp"
#include "sonopt/spectral.hpp"

using namespace sonopt;

namespace {

// Pinned tolerances.
constexpr double kSampleRate = 48000.0;
constexpr std::size_t kPitchWindow = 4096;
constexpr std::size_t kPitchBinSlack = 1;
constexpr double kBandEnergyFloor = 0.99;
constexpr std::size_t kBandWindow = 16384;
constexpr double kBandEdgeBins = 2.0;
constexpr double kOracleTol = 1e-12;
constexpr double kIgdCeiling = 0.01;
constexpr std::size_t kTrendWindowGens = 25;
constexpr std::size_t kFlatnessWindow = 4096;
constexpr std::size_t kFlatnessHop = 1024;
constexpr double kCollinearBudgetS = 1.0;
constexpr double kEndToEndBudgetPerSeedS = 120.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

/// Engine rendering path 1 alone at unit gain.
EngineConfig path1_only() {
  EngineConfig c;
  c.params.gain_p1 = 1.0;
  c.params.gain_p2 = 0.0;
  return c;
}

std::vector<double> render_frames(Engine& e, std::size_t frames) {
  std::vector<double> out;
  std::vector<double> block;
  while (out.size() < frames) {
    block.resize(std::min(kRenderBlockFrames, frames - out.size()));
    e.render(block);
    out.insert(out.end(), block.begin(), block.end());
  }
  return out;
}

Outcome collinear_silence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-100.0, 100.0), slope(0.05, 20.0), t(0.0, 10.0);
  std::uniform_int_distribution<int> count(2, 101);
  Outcome o;
  double worst = 0.0;
  for (std::uint64_t f = 0; f < 100; ++f) {
    const double a = u(rng), b = u(rng), s = slope(rng);
    std::vector<Point> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) {
      const double x = t(rng);
      p = {a + x, b - s * x};
    }
    Engine e(path1_only());
    e.ingest({0, pts, "acceptance"});
    const auto audio = render_frames(e, 4800);
    worst = std::max(worst, rms(audio));
    if (e.last_rms_p1() != 0.0) o.pass = false;
  }
  const double elapsed = seconds_since(t0);
  if (worst != 0.0 || elapsed >= kCollinearBudgetS) o.pass = false;
  o.detail = "100 fronts, max rms " + fmt(worst) + ", " + fmt(elapsed) + " s";
  return o;
}

Outcome pitch_fidelity() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> count(3, 101);
  std::uniform_real_distribution<double> curve(1.3, 5.0), u(0.0, 1.0), scale(0.1, 100.0);
  const EngineConfig defaults;
  const double bin_hz = kSampleRate / static_cast<double>(kPitchWindow);
  const auto expected = static_cast<std::size_t>(std::lround(defaults.params.oscillator_hz / bin_hz));
  Outcome o;
  std::string bins;
  for (std::uint64_t f = 0; f < 20; ++f) {
    // convex front between (0,1) and (1,0): f2 = (1 - x)^p with interior x
    const double p = curve(rng), sx = scale(rng), sy = scale(rng);
    std::vector<Point> pts{{0.0, sy}, {sx, 0.0}};
    const int n = count(rng);
    for (int i = 2; i < n; ++i) {
      const double x = 0.02 + 0.96 * u(rng);
      pts.push_back({sx * x, sy * std::pow(1.0 - x, p)});
    }
    EngineConfig c = defaults;
    c.params.gain_p2 = 0.0;  // path 1 alone
    Engine e(c);
    e.ingest({0, pts, "acceptance"});
    const auto audio = render_frames(e, 2 * kPitchWindow);
    const auto spec = spectrogram_export(std::span(audio).subspan(kPitchWindow), kPitchWindow, kPitchWindow);
    const std::size_t peak = peak_bin(spec.front());
    const std::size_t off = peak > expected ? peak - expected : expected - peak;
    if (off > kPitchBinSlack) o.pass = false;
    bins += (bins.empty() ? "" : ",") + std::to_string(peak);
  }
  o.detail = "expected bin " + std::to_string(expected) + ", peaks " + bins;
  return o;
}

std::vector<Point> convex_points(std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    pts.push_back({x, std::pow(1.0 - std::sqrt(x), 2.0)});
  }
  return pts;
}

Outcome stale_buffer() {
  const EngineParams p;
  Wavetable clean(static_cast<std::size_t>(p.buffer_size_p1), p.sample_value_scaling, p.oscillator_hz);
  Wavetable poisoned(static_cast<std::size_t>(p.buffer_size_p1), p.sample_value_scaling, p.oscillator_hz);
  const auto g90 = normalize({0, convex_points(90), "a"});
  const auto g70 = normalize({1, convex_points(70), "a"});
  write_front(clean, g90);
  write_front(poisoned, g90);
  const std::size_t len90 = poisoned.readable_len();
  write_front(clean, g70);
  write_front(poisoned, g70);
  const std::size_t len70 = poisoned.readable_len();
  auto buf = poisoned.mutable_buffer();
  for (std::size_t i = 140; i < 180; ++i) buf[i] = (i % 2 == 0) ? 1.0 : -1.0;
  std::vector<double> a(48000), b(48000);
  clean.render(kSampleRate, a);
  poisoned.render(kSampleRate, b);
  Outcome o;
  o.pass = len90 == 180 && len70 == 140 && a == b;
  o.detail = "readable_len " + std::to_string(len90) + " then " + std::to_string(len70) + ", poisoned render " +
             (a == b ? "bit-identical" : "differs");
  return o;
}

Outcome recurrence_semantics() {
  Outcome o;
  const EngineConfig defaults;
  const double inc = defaults.recurrence.increment;

  // identical fronts: every partial active at exactly one increment
  std::vector<Point> pts = convex_points(100);
  Engine same(defaults);
  same.ingest({0, pts, "a"});
  same.ingest({1, pts, "a"});
  const auto amps = same.partials().amplitudes();
  const bool all_on = std::all_of(amps.begin(), amps.end(), [&](double a) { return a == inc; });

  // disjoint fronts: path 2 renders exact zeros, even after a recurring run
  PartialBank quiet_bank(100, defaults.params.fundamental_hz, inc);
  const auto base = normalize({0, convex_points(100), "a"});
  quiet_bank.update(detect_recurrence(base, {1, base.points}));
  GenerationFront moved{2, base.points};
  for (auto& q : moved.points) q = {0.5 * q.f1 + 0.25, 0.5 * q.f2 + 0.25};
  const auto none = detect_recurrence({1, base.points}, moved);
  quiet_bank.update(none);
  std::vector<double> quiet(24000);
  quiet_bank.render(kSampleRate, quiet);
  const bool silent =
      none.recurrent_indices.empty() && std::all_of(quiet.begin(), quiet.end(), [](double s) { return s == 0.0; });

  // recurrence confined to indices 40..60
  std::vector<Point> prev = convex_points(100), cur = prev;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    if (i < 40 || i > 60) cur[i].f2 += 1e-3;
  }
  PartialBank bank(100, defaults.params.fundamental_hz, inc);
  const auto rep = detect_recurrence({0, prev}, {1, cur});
  bank.update(rep);
  std::vector<double> audio(kBandWindow);
  bank.render(kSampleRate, audio);
  RealFft fft(kBandWindow);
  const auto w = hann_window(kBandWindow);
  for (std::size_t i = 0; i < audio.size(); ++i) audio[i] *= w[i];
  const auto mag = fft.magnitudes(audio);
  const double bin_hz = kSampleRate / static_cast<double>(kBandWindow);
  const double f0 = defaults.params.fundamental_hz;
  double inside = 0.0, total = 0.0;
  for (std::size_t k = 0; k < mag.size(); ++k) {
    const double hz = static_cast<double>(k) * bin_hz;
    total += mag[k] * mag[k];
    if (hz >= 41.0 * f0 - kBandEdgeBins * bin_hz && hz <= 61.0 * f0 + kBandEdgeBins * bin_hz) inside += mag[k] * mag[k];
  }
  const double frac = total > 0.0 ? inside / total : 0.0;
  const bool band_ok = rep.recurrent_indices.size() == 21 && frac >= kBandEnergyFloor;

  o.pass = all_on && silent && band_ok;
  o.detail = std::string("identical: ") + (all_on ? "100 at increment" : "wrong") + ", disjoint: " +
             (silent ? "silent" : "sound") + ", band energy " + fmt(frac);
  return o;
}

Outcome throttle() {
  Outcome o;
  std::vector<std::size_t> all(100);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  bool exact = true, deterministic = true;
  for (std::uint64_t g = 1; g <= 250; ++g) {
    const RecurrenceReport r{g, all, kDefaultRecurrenceEpsilon};
    const auto a = throttle_recurrence(r, 0.1, 42);
    const auto b = throttle_recurrence(r, 0.1, 42);
    exact = exact && a.recurrent_indices.size() == 10;
    deterministic = deterministic && a.recurrent_indices == b.recurrent_indices;
  }
  // through the engine: each generation increments exactly 10 partials
  EngineConfig c;
  c.recurrence.keep_fraction = 0.1;
  c.recurrence.throttle_seed = 42;
  Engine e(c), twin(c);
  const auto pts = convex_points(100);
  bool engine_exact = true;
  for (std::uint64_t g = 0; g < 20; ++g) {
    e.ingest({g, pts, "a"});
    twin.ingest({g, pts, "a"});
    if (g > 0) engine_exact = engine_exact && e.last_recurrent_count() == 10;
  }
  const auto ca = e.partials().counters(), cb = twin.partials().counters();
  deterministic = deterministic && std::equal(ca.begin(), ca.end(), cb.begin(), cb.end());
  o.pass = exact && deterministic && engine_exact;
  o.detail = std::string("exactly 10: ") + (exact && engine_exact ? "yes" : "no") +
             ", deterministic: " + (deterministic ? "yes" : "no");
  return o;
}

Outcome evaluator_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  auto sample = [&](const Problem& p) {
    std::vector<double> x(p.dimension());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::uniform_real_distribution<double>(p.lower[i], p.upper[i])(rng);
    return x;
  };
  auto track = [&](double got, double want) {
    const double err = std::abs(got - want) / std::max(1.0, std::abs(want));
    worst = std::max(worst, err);
  };
  const auto z1 = zdt1(), z4 = zdt4(), ku = kursawe(), ta = tanaka();
  for (int i = 0; i < 1000; ++i) {
    auto x = sample(z1);
    auto [a1, a2] = oracle::zdt1(x);
    track(z1.evaluate(x).f.f1, a1);
    track(z1.evaluate(x).f.f2, a2);
    x = sample(z4);
    std::tie(a1, a2) = oracle::zdt4(x);
    track(z4.evaluate(x).f.f1, a1);
    track(z4.evaluate(x).f.f2, a2);
    x = sample(ku);
    std::tie(a1, a2) = oracle::kursawe(x);
    track(ku.evaluate(x).f.f1, a1);
    track(ku.evaluate(x).f.f2, a2);
    x = sample(ta);
    const auto t = oracle::tanaka(x);
    const auto e = ta.evaluate(x);
    track(e.f.f1, t.f1);
    track(e.f.f2, t.f2);
    track(e.violation, oracle::tanaka_violation(t));
  }
  const bool hand = eval_zdt1(std::vector<double>(30, 0.0)) == Point{0.0, 1.0} &&
                    eval_kursawe(std::vector<double>{0.0, 0.0, 0.0}) == Point{-20.0, 0.0};
  o.pass = worst <= kOracleTol && hand;
  o.detail = "max rel error " + fmt(worst) + ", hand values " + (hand ? "exact" : "differ");
  return o;
}

double window_mean(const std::vector<double>& v, std::size_t from, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = from; i < from + n; ++i) acc += v[i];
  return acc / static_cast<double>(n);
}

Outcome end_to_end() {
  constexpr std::size_t kGens = 250;
  const auto ref = zdt1_pareto_front(1000);
  double igd_sum = 0.0, flat_first = 0.0, flat_last = 0.0, act_first = 0.0, act_last = 0.0, slowest = 0.0;
  double fund_first = 0.0, fund_last = 0.0;
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  for (auto seed : seeds) {
    const auto t0 = Clock::now();
    const auto log = run_algorithm(zdt1(), Algorithm::Nsga2, kGens, seed);
    igd_sum += igd(ref, std::get<FrontEvent>(log.events.back()).front.points);

    // path 1 alone, so the flatness reading is not mixed with path 2
    const EngineConfig c = path1_only();
    const auto run = render_run(log, c);
    const std::size_t fpg = frames_per_generation(c.params);
    const double bin_hz = c.params.sample_rate_hz / static_cast<double>(kFlatnessWindow);
    const auto fund_bin = static_cast<std::size_t>(std::lround(c.params.oscillator_hz / bin_hz));
    std::vector<double> flat(kGens), active(kGens), fund(kGens);
    for (std::size_t g = 0; g < kGens; ++g) {
      const auto spec = spectrogram_export(std::span(run.audio).subspan(g * fpg, fpg), kFlatnessWindow, kFlatnessHop);
      flat[g] = mean_flatness(spec);
      double e_fund = 0.0, e_all = 0.0;
      for (const auto& row : spec) {
        for (std::size_t k = 1; k < row.size(); ++k) {
          e_all += row[k] * row[k];
          if (k + 1 >= fund_bin && k <= fund_bin + 1) e_fund += row[k] * row[k];
        }
      }
      fund[g] = e_all > 0.0 ? e_fund / e_all : 0.0;
      const auto& a = run.snapshots[g].partials;
      active[g] = static_cast<double>(std::count_if(a.begin(), a.end(), [](double x) { return x > 0.0; }));
    }
    flat_first += window_mean(flat, 0, kTrendWindowGens);
    flat_last += window_mean(flat, kGens - kTrendWindowGens, kTrendWindowGens);
    act_first += window_mean(active, 0, kTrendWindowGens);
    act_last += window_mean(active, kGens - kTrendWindowGens, kTrendWindowGens);
    fund_first += window_mean(fund, 0, kTrendWindowGens);
    fund_last += window_mean(fund, kGens - kTrendWindowGens, kTrendWindowGens);
    slowest = std::max(slowest, seconds_since(t0));
  }
  const double n = static_cast<double>(seeds.size());
  const double mean_igd = igd_sum / n;
  flat_first /= n, flat_last /= n, act_first /= n, act_last /= n, fund_first /= n, fund_last /= n;
  const bool a = mean_igd <= kIgdCeiling;
  const bool b = flat_last < flat_first;
  const bool c = act_last > act_first;
  const bool time_ok = slowest <= kEndToEndBudgetPerSeedS;
  Outcome o;
  o.pass = a && b && c && time_ok;
  o.detail = std::string("(a) igd ") + fmt(mean_igd) + (a ? " ok" : " FAIL") + "; (b) flatness " + fmt(flat_first) +
             " -> " + fmt(flat_last) + (b ? " ok" : " FAIL") + "; (c) active partials " + fmt(act_first) + " -> " +
             fmt(act_last) + (c ? " ok" : " FAIL") + "; slowest seed " + fmt(slowest) + " s" +
             "; info: fundamental energy share " + fmt(fund_first) + " -> " + fmt(fund_last);
  return o;
}

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("sonopt_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto sh = [&](const std::string& args) {
    const std::string cmd = std::string(SONOPT_BIN) + " --control-port 0 " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  auto p = [&](const char* name) { return (dir / name).string(); };
  Outcome o;
  const int r1 = sh("--out " + p("a.wav") + " --snapshots " + p("a.json") + " --log-out " + p("a.jsonl") +
                    " run --seed 42");
  const int r2 = sh("--out " + p("b.wav") + " --snapshots " + p("b.json") + " run --seed 42");
  const int r3 = sh("--out " + p("c.wav") + " replay --log " + p("a.jsonl"));
  const auto wa = slurp(p("a.wav")), wb = slurp(p("b.wav")), wc = slurp(p("c.wav"));
  const auto ja = slurp(p("a.json")), jb = slurp(p("b.json"));
  const bool ran = r1 == 0 && r2 == 0 && r3 == 0 && !wa.empty() && !ja.empty();
  o.pass = ran && wa == wb && ja == jb && wa == wc;
  o.detail = "wav " + std::to_string(wa.size()) + " bytes; run/run wav " + (wa == wb ? "identical" : "differ") +
             ", snapshots " + (ja == jb ? "identical" : "differ") + ", replay wav " + (wa == wc ? "identical" : "differ");
  if (!ran) o.detail += "; exit codes " + std::to_string(r1) + "," + std::to_string(r2) + "," + std::to_string(r3);
  fs::remove_all(dir);
  return o;
}

Outcome osc_robustness() {
  std::mt19937_64 rng(1234567);
  const auto valid = osc::encode(osc::FrontMessage{3, {{0.1f, 0.9f}, {0.5f, 0.5f}, {0.9f, 0.1f}}});
  const auto valid_param = osc::encode(osc::ParamMessage{"gain_p1", 0.5f});
  std::size_t defined = 0, accepted = 0, undefined = 0;
  for (int i = 0; i < 1000000; ++i) {
    std::vector<std::uint8_t> bytes;
    switch (i % 3) {
      case 0:
        bytes.resize(rng() % 128);
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
        break;
      case 1:
        bytes = valid;
        break;
      default:
        bytes = valid_param;
    }
    if (i % 3 != 0) {
      for (int k = 0; k < 1 + static_cast<int>(rng() % 4); ++k) bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
      if (rng() % 5 == 0) bytes.resize(rng() % (bytes.size() + 8));
    }
    try {
      osc::decode(bytes);
      ++accepted;
    } catch (const Error& e) {
      const auto c = e.code();
      if (c == Errc::MalformedPacket || c == Errc::UnknownAddress || c == Errc::CountMismatch) {
        ++defined;
      } else {
        ++undefined;
      }
    } catch (...) {
      ++undefined;
    }
  }
  std::size_t round_trips = 0;
  std::uniform_int_distribution<int> n(1, 101), g(0, 1 << 30);
  std::uniform_real_distribution<float> v(-1e6f, 1e6f);
  for (int i = 0; i < 10000; ++i) {
    osc::FrontMessage m;
    m.generation_index = g(rng);
    m.points.resize(static_cast<std::size_t>(n(rng)));
    for (auto& p : m.points) p = {v(rng), v(rng)};
    const auto back = osc::decode(osc::encode(m));
    if (const auto* f = std::get_if<osc::FrontMessage>(&back); f && *f == m) ++round_trips;
  }
  Outcome o;
  o.pass = undefined == 0 && round_trips == 10000;
  o.detail = "fuzz 1e6: " + std::to_string(defined) + " defined errors, " + std::to_string(accepted) + " accepted, " +
             std::to_string(undefined) + " other; round trips " + std::to_string(round_trips) + "/10000";
  return o;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"collinear_silence", collinear_silence}, {"pitch_fidelity", pitch_fidelity},
      {"stale_buffer", stale_buffer},           {"recurrence_semantics", recurrence_semantics},
      {"throttle", throttle},                   {"evaluator_oracle", evaluator_oracle},
      {"end_to_end_trends", end_to_end},        {"determinism", determinism},
      {"osc_robustness", osc_robustness},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool all_pass = true;
  std::size_t ran = 0;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
  }
  if (ran == 0) {
    std::cerr << "no such criterion\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
