#pragma once

// Shape audification: each point's distance from the chord between the two
// extremes of the front becomes one sample of a single-cycle waveform.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sonopt/error.hpp"
#include "sonopt/front_model.hpp"

namespace sonopt {

struct Chord {
  Point p_start;  // minimizer of objective one (first in front order)
  Point p_end;    // minimizer of objective two
  bool degenerate = false;
};

/// Distances below this are normalization rounding noise, not shape.
inline constexpr double kOnChordTolerance = 1e-12;

inline Chord chord_of(const GenerationFront& front) {
  if (front.points.empty()) throw Error(Errc::EmptyFront, "chord of empty front");
  Chord c;
  c.p_start = front.points.front();
  // Last index among the objective-two minimizers: the end of the front in sort order.
  std::size_t end = 0;
  for (std::size_t i = 1; i < front.points.size(); ++i) {
    if (front.points[i].f2 <= front.points[end].f2) end = i;
  }
  c.p_end = front.points[end];
  c.degenerate = c.p_start == c.p_end;
  return c;
}

inline std::vector<double> chord_distances(const GenerationFront& front, const Chord& chord) {
  std::vector<double> out;
  out.reserve(front.count());
  const double x1 = chord.p_start.f1, y1 = chord.p_start.f2;
  const double x2 = chord.p_end.f1, y2 = chord.p_end.f2;
  const double len = std::hypot(x2 - x1, y2 - y1);
  for (const auto& p : front.points) {
    double d = 0.0;
    if (chord.degenerate || len == 0.0) {
      d = std::hypot(p.f1 - x1, p.f2 - y1);
    } else {
      d = std::abs((x2 - x1) * (y1 - p.f2) - (x1 - p.f1) * (y2 - y1)) / len;
    }
    out.push_back(d < kOnChordTolerance ? 0.0 : d);
  }
  return out;
}

/// Fixed-size lookup buffer plus the scanning oscillator that plays it.
///
/// Only the leading readable_len() samples (twice the last generation's point
/// count) are ever read. Whatever lies beyond is left over from larger
/// earlier generations and is ignored.
class Wavetable {
 public:
  explicit Wavetable(std::size_t buffer_size, double scale = 500.0, double frequency_hz = 80.0)
      : buffer_(buffer_size, 0.0), scale_(scale), frequency_hz_(frequency_hz) {}

  std::size_t capacity() const noexcept { return buffer_.size(); }
  std::size_t readable_len() const noexcept { return readable_len_; }
  double phase() const noexcept { return phase_; }
  double scale() const noexcept { return scale_; }
  double frequency_hz() const noexcept { return frequency_hz_; }
  std::span<const double> buffer() const noexcept { return buffer_; }
  std::span<const double> readable() const noexcept { return std::span(buffer_).first(readable_len_); }

  void set_scale(double scale) noexcept { scale_ = scale; }
  void set_frequency_hz(double hz) noexcept { frequency_hz_ = hz; }

  /// Raw buffer access for tests that plant stale content.
  std::span<double> mutable_buffer() noexcept { return buffer_; }

  /// Writes scaled distances followed by their negatives.
  void write(std::span<const double> distances) {
    const std::size_t n = distances.size();
    if (2 * n > buffer_.size()) {
      throw Error(Errc::BufferOverflow,
                  std::to_string(n) + " points need " + std::to_string(2 * n) + " samples, buffer holds " +
                      std::to_string(buffer_.size()));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::clamp(scale_ * distances[i], -1.0, 1.0);
      buffer_[i] = v;
      buffer_[n + i] = -v;
    }
    readable_len_ = 2 * n;
    if (readable_len_ == 0) {
      phase_ = 0.0;
    } else {
      phase_ = std::fmod(phase_, static_cast<double>(readable_len_));
    }
  }

  /// Fills `out` by scanning the readable region with linear interpolation.
  void render(double sample_rate_hz, std::span<double> out) {
    if (readable_len_ == 0) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double len = static_cast<double>(readable_len_);
    const double step = frequency_hz_ * len / sample_rate_hz;
    for (double& s : out) {
      const auto i0 = static_cast<std::size_t>(phase_);
      const std::size_t i1 = i0 + 1 == readable_len_ ? 0 : i0 + 1;
      const double frac = phase_ - static_cast<double>(i0);
      s = buffer_[i0] + (buffer_[i1] - buffer_[i0]) * frac;
      phase_ += step;
      if (phase_ >= len) phase_ = std::fmod(phase_, len);
    }
  }

 private:
  std::vector<double> buffer_;
  std::size_t readable_len_ = 0;
  double phase_ = 0.0;
  double scale_;
  double frequency_hz_;
};

/// Chord, distances and buffer write in one step.
inline void write_front(Wavetable& table, const GenerationFront& front) {
  table.write(chord_distances(front, chord_of(front)));
}

}  // namespace sonopt
