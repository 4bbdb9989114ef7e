#pragma once

// Bi-objective benchmark problems (both objectives minimized).

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sonopt/error.hpp"
#include "sonopt/front_model.hpp"

namespace sonopt {

struct Evaluation {
  Point f;
  double violation = 0.0;  // sum of max(0, g_j(x)) over g_j(x) <= 0 constraints
};

struct Problem {
  std::string name;
  std::vector<double> lower;
  std::vector<double> upper;
  std::function<Evaluation(std::span<const double>)> evaluate;
  bool constrained = false;

  std::size_t dimension() const noexcept { return lower.size(); }
};

namespace detail {

inline void check_bounds(std::string_view problem, std::span<const double> x, std::size_t n,
                         const std::function<std::pair<double, double>(std::size_t)>& bounds) {
  if (x.size() != n) {
    throw Error(Errc::OutOfBounds, std::string(problem) + " expects " + std::to_string(n) + " variables, got " +
                                       std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [lo, hi] = bounds(i);
    if (!(x[i] >= lo && x[i] <= hi)) {
      throw Error(Errc::OutOfBounds, std::string(problem) + " variable " + std::to_string(i) + " outside bounds", i);
    }
  }
}

}  // namespace detail

inline constexpr std::size_t kZdt1Dim = 30;
inline constexpr std::size_t kZdt4Dim = 10;

inline Point eval_zdt1(std::span<const double> x) {
  detail::check_bounds("zdt1", x, kZdt1Dim, [](std::size_t) { return std::pair{0.0, 1.0}; });
  const double f1 = x[0];
  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += x[i];
  const double g = 1.0 + 9.0 * tail / static_cast<double>(x.size() - 1);
  return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

inline Point eval_zdt4(std::span<const double> x) {
  detail::check_bounds("zdt4", x, kZdt4Dim,
                       [](std::size_t i) { return i == 0 ? std::pair{0.0, 1.0} : std::pair{-5.0, 5.0}; });
  const double f1 = x[0];
  double g = 1.0 + 10.0 * static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) g += x[i] * x[i] - 10.0 * std::cos(4.0 * std::numbers::pi * x[i]);
  return {f1, g * (1.0 - std::sqrt(f1 / g))};
}

inline Point eval_kursawe(std::span<const double> x) {
  detail::check_bounds("kursawe", x, 3, [](std::size_t) { return std::pair{-5.0, 5.0}; });
  double f1 = 0.0;
  for (std::size_t i = 0; i + 1 < 3; ++i) f1 += -10.0 * std::exp(-0.2 * std::sqrt(x[i] * x[i] + x[i + 1] * x[i + 1]));
  double f2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) f2 += std::pow(std::abs(x[i]), 0.8) + 5.0 * std::sin(x[i] * x[i] * x[i]);
  return {f1, f2};
}

/// Objectives are the variables themselves; feasibility is
///   x1^2 + x2^2 - 1 - 0.1 cos(16 atan(x1/x2)) >= 0  and  (x1-0.5)^2 + (x2-0.5)^2 <= 0.5.
/// atan2 supplies the x2 -> 0 limit.
inline Evaluation eval_tanaka(std::span<const double> x) {
  detail::check_bounds("tanaka", x, 2, [](std::size_t) { return std::pair{0.0, std::numbers::pi}; });
  const double c1 = x[0] * x[0] + x[1] * x[1] - 1.0 - 0.1 * std::cos(16.0 * std::atan2(x[0], x[1]));
  const double c2 = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
  return {{x[0], x[1]}, std::max(0.0, -c1) + std::max(0.0, c2 - 0.5)};
}

inline Problem zdt1() {
  return {"zdt1", std::vector<double>(kZdt1Dim, 0.0), std::vector<double>(kZdt1Dim, 1.0),
          [](std::span<const double> x) { return Evaluation{eval_zdt1(x), 0.0}; }};
}

inline Problem zdt4() {
  std::vector<double> lo(kZdt4Dim, -5.0), hi(kZdt4Dim, 5.0);
  lo[0] = 0.0;
  hi[0] = 1.0;
  return {"zdt4", lo, hi, [](std::span<const double> x) { return Evaluation{eval_zdt4(x), 0.0}; }};
}

inline Problem kursawe() {
  return {"kursawe", std::vector<double>(3, -5.0), std::vector<double>(3, 5.0),
          [](std::span<const double> x) { return Evaluation{eval_kursawe(x), 0.0}; }};
}

inline Problem tanaka() {
  return {"tanaka", std::vector<double>(2, 0.0), std::vector<double>(2, std::numbers::pi),
          [](std::span<const double> x) { return eval_tanaka(x); }, true};
}

inline Problem make_problem(std::string_view name) {
  if (name == "zdt1") return zdt1();
  if (name == "zdt4") return zdt4();
  if (name == "kursawe") return kursawe();
  if (name == "tanaka") return tanaka();
  throw Error(Errc::InvalidParam, "unknown problem '" + std::string(name) + "'");
}

/// Mean distance from each reference point to its nearest obtained point.
inline double igd(std::span<const Point> reference, std::span<const Point> obtained) {
  if (reference.empty() || obtained.empty()) throw Error(Errc::EmptyFront, "igd needs both sets non-empty");
  double acc = 0.0;
  for (const auto& r : reference) {
    double best = INFINITY;
    for (const auto& p : obtained) best = std::min(best, std::hypot(r.f1 - p.f1, r.f2 - p.f2));
    acc += best;
  }
  return acc / static_cast<double>(reference.size());
}

/// f2 = 1 - sqrt(f1), sampled evenly in f1.
inline std::vector<Point> zdt1_pareto_front(std::size_t samples) {
  std::vector<Point> out;
  out.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double f1 = samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(samples - 1);
    out.push_back({f1, 1.0 - std::sqrt(f1)});
  }
  return out;
}

}  // namespace sonopt
