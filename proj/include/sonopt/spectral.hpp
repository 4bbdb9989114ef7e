#pragma once

// Magnitude spectra and short-time analysis, backed by FFTW.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "sonopt/error.hpp"

namespace sonopt {

using Spectrogram = std::vector<std::vector<double>>;  // rows = frames, cols = bins 0..window/2

/// Real-input FFT of a fixed size. Not thread-safe to construct concurrently
/// (FFTW planning is global); each instance may be used from one thread.
class RealFft {
 public:
  explicit RealFft(std::size_t size)
      : size_(size),
        in_(static_cast<double*>(fftw_malloc(sizeof(double) * size))),
        out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (size / 2 + 1)))) {
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(size), in_.get(), out_.get(), FFTW_ESTIMATE);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() { fftw_destroy_plan(plan_); }

  std::size_t size() const noexcept { return size_; }

  /// |X[k]| for k = 0..size/2.
  std::vector<double> magnitudes(std::span<const double> frame) {
    std::copy_n(frame.begin(), size_, in_.get());
    fftw_execute(plan_);
    std::vector<double> mag(size_ / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::hypot(out_.get()[k][0], out_.get()[k][1]);
    return mag;
  }

 private:
  struct FftwFree {
    void operator()(void* p) const noexcept { fftw_free(p); }
  };
  std::size_t size_;
  std::unique_ptr<double, FftwFree> in_;
  std::unique_ptr<fftw_complex, FftwFree> out_;
  fftw_plan plan_;
};

/// Periodic Hann window.
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

inline Spectrogram spectrogram_export(std::span<const double> audio, std::size_t window, std::size_t hop) {
  if (window == 0 || (window & (window - 1)) != 0) {
    throw Error(Errc::InvalidParam, "window must be a power of two");
  }
  if (hop == 0 || hop > window) throw Error(Errc::InvalidParam, "hop must be in [1, window]");
  if (audio.size() < window) {
    throw Error(Errc::AudioTooShort,
                std::to_string(audio.size()) + " samples is shorter than window " + std::to_string(window));
  }
  const std::size_t rows = (audio.size() - window) / hop + 1;
  const auto w = hann_window(window);
  RealFft fft(window);
  std::vector<double> frame(window);
  Spectrogram out;
  out.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto seg = audio.subspan(r * hop, window);
    for (std::size_t i = 0; i < window; ++i) frame[i] = seg[i] * w[i];
    out.push_back(fft.magnitudes(frame));
  }
  return out;
}

/// Index of the largest magnitude.
inline std::size_t peak_bin(std::span<const double> magnitudes) {
  return static_cast<std::size_t>(std::distance(magnitudes.begin(), std::max_element(magnitudes.begin(), magnitudes.end())));
}

inline constexpr double kFlatnessFloor = 1e-12;

/// Geometric over arithmetic mean of magnitudes, DC excluded. Magnitudes are
/// floored at kFlatnessFloor, so an all-zero spectrum reads as flat (1).
inline double spectral_flatness(std::span<const double> magnitudes) {
  if (magnitudes.size() < 2) return 1.0;
  if (std::all_of(magnitudes.begin() + 1, magnitudes.end(), [](double m) { return m == 0.0; })) return 1.0;
  double log_sum = 0.0;
  double sum = 0.0;
  for (std::size_t k = 1; k < magnitudes.size(); ++k) {
    const double m = magnitudes[k] + kFlatnessFloor;
    log_sum += std::log(m);
    sum += m;
  }
  const auto n = static_cast<double>(magnitudes.size() - 1);
  return std::exp(log_sum / n) / (sum / n);
}

/// Mean flatness over the rows of a spectrogram.
inline double mean_flatness(const Spectrogram& spec) {
  if (spec.empty()) return 1.0;
  double acc = 0.0;
  for (const auto& row : spec) acc += spectral_flatness(row);
  return acc / static_cast<double>(spec.size());
}

inline double rms(std::span<const double> block) {
  if (block.empty()) return 0.0;
  const double ss = std::inner_product(block.begin(), block.end(), block.begin(), 0.0);
  return std::sqrt(ss / static_cast<double>(block.size()));
}

}  // namespace sonopt
