#pragma once

// Recurrence harmonics: points that reappear between consecutive generations
// raise the level of the harmonic partial at their index in the sorted front.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "sonopt/error.hpp"
#include "sonopt/front_model.hpp"
#include "sonopt/rng.hpp"

namespace sonopt {

inline constexpr double kDefaultRecurrenceEpsilon = 1e-9;
inline constexpr double kDefaultAmplitudeIncrement = 0.05;

struct RecurrenceReport {
  std::uint64_t generation_index = 0;
  std::vector<std::size_t> recurrent_indices;  // ascending, unique
  double epsilon = kDefaultRecurrenceEpsilon;
};

/// Marks index i of `cur` when some point of `prev` matches it within
/// `epsilon` in both objectives.
inline RecurrenceReport detect_recurrence(const GenerationFront& prev, const GenerationFront& cur,
                                          double epsilon = kDefaultRecurrenceEpsilon) {
  if (prev.generation_index + 1 != cur.generation_index) {
    throw Error(Errc::NonConsecutive, "generations " + std::to_string(prev.generation_index) + " and " +
                                          std::to_string(cur.generation_index) + " are not adjacent");
  }
  RecurrenceReport report{cur.generation_index, {}, epsilon};
  for (std::size_t i = 0; i < cur.points.size(); ++i) {
    const Point& c = cur.points[i];
    const bool hit = std::any_of(prev.points.begin(), prev.points.end(), [&](const Point& q) {
      return std::abs(c.f1 - q.f1) <= epsilon && std::abs(c.f2 - q.f2) <= epsilon;
    });
    if (hit) report.recurrent_indices.push_back(i);
  }
  return report;
}

/// Keeps a uniformly drawn subset of round(keep_fraction * |indices|)
/// recurrent indices. The draw depends only on the seed and the generation.
inline RecurrenceReport throttle_recurrence(const RecurrenceReport& report, double keep_fraction,
                                            std::uint64_t rng_seed) {
  keep_fraction = std::clamp(keep_fraction, 0.0, 1.0);
  if (keep_fraction >= 1.0) return report;
  RecurrenceReport out = report;
  auto& idx = out.recurrent_indices;
  const auto keep = static_cast<std::size_t>(std::lround(keep_fraction * static_cast<double>(idx.size())));
  Rng rng = Rng::stream(rng_seed, "throttle", report.generation_index);
  // Partial Fisher-Yates: the first `keep` slots become the sample.
  for (std::size_t i = 0; i < keep; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return out;
}

/// One counter, amplitude and free-running phase per harmonic partial.
class PartialBank {
 public:
  explicit PartialBank(std::size_t max_partials, double fundamental_hz = 80.0,
                       double increment = kDefaultAmplitudeIncrement)
      : counters_(max_partials, 0),
        amplitudes_(max_partials, 0.0),
        phases_(max_partials, 0.0),
        fundamental_hz_(fundamental_hz),
        increment_(increment) {}

  std::size_t size() const noexcept { return counters_.size(); }
  std::span<const std::uint32_t> counters() const noexcept { return counters_; }
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }
  double fundamental_hz() const noexcept { return fundamental_hz_; }
  double increment() const noexcept { return increment_; }
  void set_fundamental_hz(double hz) noexcept { fundamental_hz_ = hz; }

  std::size_t active_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(amplitudes_.begin(), amplitudes_.end(), [](double a) { return a > 0.0; }));
  }

  /// Recurrent partials count one more consecutive generation; every other
  /// partial drops straight back to zero.
  void update(const RecurrenceReport& report) {
    for (std::size_t k : report.recurrent_indices) {
      if (k >= counters_.size()) {
        throw Error(Errc::IndexOutOfRange,
                    "recurrent index " + std::to_string(k) + " exceeds " + std::to_string(counters_.size()) + " partials",
                    k);
      }
    }
    std::vector<std::uint32_t> next(counters_.size(), 0);
    for (std::size_t k : report.recurrent_indices) next[k] = counters_[k] + 1;
    counters_ = std::move(next);
    recompute_amplitudes();
  }

  void reset() {
    std::fill(counters_.begin(), counters_.end(), 0);
    recompute_amplitudes();
  }

  /// Test hook: sets raw counters and keeps amplitudes consistent with them.
  void set_counters(std::span<const std::uint32_t> counters) {
    if (counters.size() != counters_.size()) throw Error(Errc::LengthMismatch, "counter count");
    counters_.assign(counters.begin(), counters.end());
    recompute_amplitudes();
  }

  /// Adds sum_k a_k sin(2 pi (k+1) f0 t + phi_k), scaled by master_gain, into
  /// a zeroed block. Partials at or above Nyquist stay silent.
  void render(double sample_rate_hz, std::span<double> out, double master_gain = 1.0) {
    std::fill(out.begin(), out.end(), 0.0);
    const double nyquist = sample_rate_hz / 2.0;
    const double two_pi = 2.0 * std::numbers::pi;
    const auto frames = static_cast<double>(out.size());
    for (std::size_t k = 0; k < amplitudes_.size(); ++k) {
      const double freq = static_cast<double>(k + 1) * fundamental_hz_;
      const double omega = two_pi * freq / sample_rate_hz;
      const double a = amplitudes_[k] * master_gain;
      if (a != 0.0 && freq < nyquist) {
        const double phi = phases_[k];
        for (std::size_t n = 0; n < out.size(); ++n) {
          out[n] += a * std::sin(phi + omega * static_cast<double>(n));
        }
      }
      phases_[k] = std::fmod(phases_[k] + omega * frames, two_pi);
    }
  }

 private:
  void recompute_amplitudes() {
    for (std::size_t k = 0; k < counters_.size(); ++k) {
      amplitudes_[k] = std::min(1.0, static_cast<double>(counters_[k]) * increment_);
    }
  }

  std::vector<std::uint32_t> counters_;
  std::vector<double> amplitudes_;
  std::vector<double> phases_;
  double fundamental_hz_;
  double increment_;
};

}  // namespace sonopt
