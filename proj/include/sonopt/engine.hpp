#pragma once

// The render context: owns both sonification paths, applies fronts and
// parameter changes between blocks, and mixes the two paths.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sonopt/error.hpp"
#include "sonopt/event_log.hpp"
#include "sonopt/front_model.hpp"
#include "sonopt/params.hpp"
#include "sonopt/path1_shape.hpp"
#include "sonopt/path2_recurrence.hpp"
#include "sonopt/spectral.hpp"

namespace sonopt {

/// out[i] = clamp(gain1*block1[i] + gain2*block2[i], -1, 1)
inline void mix_into(std::span<const double> block1, std::span<const double> block2, double gain1, double gain2,
                     std::span<double> out) {
  if (block1.size() != block2.size() || out.size() != block1.size()) {
    throw Error(Errc::LengthMismatch,
                "blocks of " + std::to_string(block1.size()) + " and " + std::to_string(block2.size()) + " frames");
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(gain1 * block1[i] + gain2 * block2[i], -1.0, 1.0);
}

inline std::vector<double> mix(std::span<const double> block1, std::span<const double> block2, double gain1,
                               double gain2) {
  std::vector<double> out(block1.size());
  mix_into(block1, block2, gain1, gain2, out);
  return out;
}

struct GenerationSnapshot {
  std::uint64_t generation_index = 0;
  std::size_t point_count = 0;
  std::vector<double> buffer;    // readable region of the path-1 wavetable
  std::vector<double> partials;  // path-2 amplitudes
  std::size_t recurrent_count = 0;
};

class Engine {
 public:
  explicit Engine(const EngineConfig& config)
      : config_(config),
        table_(static_cast<std::size_t>(config.params.buffer_size_p1), config.params.sample_value_scaling,
               config.params.oscillator_hz),
        bank_(static_cast<std::size_t>(config.params.num_partials), config.params.fundamental_hz,
              config.recurrence.increment) {
    validate(config_.params);
  }

  const EngineConfig& config() const noexcept { return config_; }
  const EngineParams& params() const noexcept { return config_.params; }
  const Wavetable& wavetable() const noexcept { return table_; }
  const PartialBank& partials() const noexcept { return bank_; }
  std::optional<std::uint64_t> generation_index() const noexcept {
    return prev_ ? std::optional(prev_->generation_index) : std::nullopt;
  }
  std::size_t point_count() const noexcept { return prev_ ? prev_->count() : 0; }
  std::size_t last_recurrent_count() const noexcept { return last_recurrent_; }
  double last_rms_p1() const noexcept { return rms_p1_; }
  double last_rms_p2() const noexcept { return rms_p2_; }

  /// Live-tunable parameters only; takes effect from the next rendered block.
  void set_param(std::string_view name, double value) {
    check_live_param(config_.params, name, value);
    set_param_unchecked(name, value);
  }

  /// Runs one generation through both paths. Throws before touching any
  /// state if the front is invalid or too large for the wavetable.
  void ingest(const RawFront& raw) {
    validate_raw(raw);
    RawFront filtered{raw.generation_index,
                      config_.recurrence.filter_nondominated ? nondominated_filter(raw.points) : raw.points,
                      raw.source_id};
    GenerationFront cur = normalize(filtered);
    if (2 * cur.count() > table_.capacity()) {
      throw Error(Errc::BufferOverflow, "front of " + std::to_string(cur.count()) + " points exceeds buffer of " +
                                            std::to_string(table_.capacity()) + " samples");
    }
    write_front(table_, cur);

    RecurrenceReport report{cur.generation_index, {}, config_.recurrence.epsilon};
    if (prev_ && prev_->generation_index + 1 == cur.generation_index) {
      report = detect_recurrence(*prev_, cur, config_.recurrence.epsilon);
      if (config_.recurrence.keep_fraction < 1.0) {
        report = throttle_recurrence(report, config_.recurrence.keep_fraction, config_.recurrence.throttle_seed);
      }
      // Fronts longer than the partial count have no partial for their tail.
      auto& idx = report.recurrent_indices;
      idx.erase(std::remove_if(idx.begin(), idx.end(), [&](std::size_t k) { return k >= bank_.size(); }), idx.end());
    }
    bank_.update(report);
    last_recurrent_ = report.recurrent_indices.size();
    prev_ = std::move(cur);
  }

  void render(std::span<double> out) {
    p1_.resize(out.size());
    p2_.resize(out.size());
    table_.render(config_.params.sample_rate_hz, p1_);
    bank_.render(config_.params.sample_rate_hz, p2_, 1.0);
    mix_into(p1_, p2_, config_.params.gain_p1, config_.params.gain_p2, out);
    rms_p1_ = config_.params.gain_p1 * rms(p1_);
    rms_p2_ = config_.params.gain_p2 * rms(p2_);
  }

  GenerationSnapshot snapshot() const {
    GenerationSnapshot s;
    s.generation_index = prev_ ? prev_->generation_index : 0;
    s.point_count = point_count();
    s.buffer.assign(table_.readable().begin(), table_.readable().end());
    s.partials.assign(bank_.amplitudes().begin(), bank_.amplitudes().end());
    s.recurrent_count = last_recurrent_;
    return s;
  }

 private:
  void set_param_unchecked(std::string_view name, double value) {
    sonopt::set_param(config_.params, name, value);
    table_.set_scale(config_.params.sample_value_scaling);
    table_.set_frequency_hz(config_.params.oscillator_hz);
    bank_.set_fundamental_hz(config_.params.fundamental_hz);
  }

  EngineConfig config_;
  Wavetable table_;
  PartialBank bank_;
  std::optional<GenerationFront> prev_;
  std::size_t last_recurrent_ = 0;
  std::vector<double> p1_, p2_;
  double rms_p1_ = 0.0;
  double rms_p2_ = 0.0;
};

inline constexpr std::size_t kRenderBlockFrames = 512;

struct RenderResult {
  std::vector<double> audio;
  std::vector<GenerationSnapshot> snapshots;
};

inline std::size_t frames_per_generation(const EngineParams& p) {
  return static_cast<std::size_t>(std::llround(p.seconds_per_generation * p.sample_rate_hz));
}

/// Offline rendering of a whole log: parameter changes, then the front, then
/// seconds_per_generation of audio, for every generation in order.
inline RenderResult render_run(const RunEventLog& log, const EngineConfig& config) {
  check_well_ordered(log);
  Engine engine(config);
  RenderResult result;
  result.audio.reserve(log.front_count() * frames_per_generation(config.params));
  std::vector<double> block;
  for (const auto& event : log.events) {
    if (const auto* p = std::get_if<ParamEvent>(&event)) {
      engine.set_param(p->name, p->value);
      continue;
    }
    engine.ingest(std::get<FrontEvent>(event).front);
    result.snapshots.push_back(engine.snapshot());
    std::size_t remaining = frames_per_generation(engine.params());
    while (remaining > 0) {
      block.resize(std::min(remaining, kRenderBlockFrames));
      engine.render(block);
      result.audio.insert(result.audio.end(), block.begin(), block.end());
      remaining -= block.size();
    }
  }
  return result;
}

inline nlohmann::json snapshots_json(const std::vector<GenerationSnapshot>& snaps) {
  auto gens = nlohmann::json::array();
  for (const auto& s : snaps) {
    gens.push_back({{"generation_index", s.generation_index},
                    {"point_count", s.point_count},
                    {"readable_len", s.buffer.size()},
                    {"recurrent_count", s.recurrent_count},
                    {"buffer", s.buffer},
                    {"partials", s.partials}});
  }
  return {{"generations", gens}};
}

/// Rows are time frames, columns are magnitude bins.
inline void write_spectrogram_csv(std::ostream& os, const Spectrogram& spec) {
  char buf[32];
  for (const auto& row : spec) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) os << ',';
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, row[k]);
      os.write(buf, end - buf);
    }
    os << '\n';
  }
}

}  // namespace sonopt
