#pragma once

// Per-generation approximation sets: validation, dominance filtering,
// min-max scaling and the canonical objective-one ordering shared by both
// sonification paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sonopt/error.hpp"

namespace sonopt {

/// A bi-objective point. Both objectives are minimized.
struct Point {
  double f1 = 0.0;
  double f2 = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Unnormalized objective matrix as produced by an optimizer for one generation.
struct RawFront {
  std::uint64_t generation_index = 0;
  std::vector<Point> points;
  std::string source_id;

  friend bool operator==(const RawFront&, const RawFront&) = default;
};

/// One generation, scaled to [0,1] per objective and sorted by objective one.
struct GenerationFront {
  std::uint64_t generation_index = 0;
  std::vector<Point> points;

  std::size_t count() const noexcept { return points.size(); }
};

inline const RawFront& validate_raw(const RawFront& front) {
  if (front.points.empty()) {
    throw Error(Errc::EmptyFront, "generation " + std::to_string(front.generation_index) + " has no points");
  }
  for (std::size_t i = 0; i < front.points.size(); ++i) {
    const auto& p = front.points[i];
    if (!std::isfinite(p.f1) || !std::isfinite(p.f2)) {
      throw Error(Errc::NonFiniteValue, "point " + std::to_string(i) + " is not finite", i);
    }
  }
  return front;
}

/// p dominates q: no worse in both objectives, strictly better in one.
constexpr bool dominates(const Point& p, const Point& q) noexcept {
  return p.f1 <= q.f1 && p.f2 <= q.f2 && (p.f1 < q.f1 || p.f2 < q.f2);
}

/// Keeps the points no other point dominates, in their original order.
/// Duplicates never dominate each other, so all copies survive.
inline std::vector<Point> nondominated_filter(std::span<const Point> points) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool dominated = std::any_of(points.begin(), points.end(),
                                       [&](const Point& other) { return dominates(other, points[i]); });
    if (!dominated) out.push_back(points[i]);
  }
  return out;
}

/// Objective-one ascending, ties by objective-two descending, so the sequence
/// walks the front from its upper-left to its lower-right end.
constexpr bool front_order(const Point& a, const Point& b) noexcept {
  if (a.f1 != b.f1) return a.f1 < b.f1;
  return a.f2 > b.f2;
}

inline void sort_front(std::vector<Point>& points) { std::stable_sort(points.begin(), points.end(), front_order); }

namespace detail {

inline void scale_axis(std::vector<Point>& pts, double Point::*axis) {
  const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                            [axis](const Point& a, const Point& b) { return a.*axis < b.*axis; });
  const double min = (*lo).*axis;
  const double range = (*hi).*axis - min;
  for (auto& p : pts) {
    // A flat objective contributes no shape; map it to 0.
    p.*axis = range > 0.0 ? (p.*axis - min) / range : 0.0;
  }
}

}  // namespace detail

/// Scales each objective to [0,1] over this generation only and sorts.
inline GenerationFront normalize(const RawFront& front) {
  validate_raw(front);
  GenerationFront out;
  out.generation_index = front.generation_index;
  out.points = front.points;
  detail::scale_axis(out.points, &Point::f1);
  detail::scale_axis(out.points, &Point::f2);
  sort_front(out.points);
  return out;
}

}  // namespace sonopt
