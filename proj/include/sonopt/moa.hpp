#pragma once

// Shared pieces of the population-based optimizers: individuals,
// constraint domination, non-dominated sorting, crowding and the real-coded
// variation operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "sonopt/front_model.hpp"
#include "sonopt/problems.hpp"
#include "sonopt/rng.hpp"

namespace sonopt {

struct Individual {
  std::vector<double> x;
  Point f;
  double violation = 0.0;
  std::size_t rank = 0;
  double crowding = 0.0;
};

struct Population {
  std::vector<Individual> individuals;
  std::uint64_t generation_index = 0;

  std::size_t size() const noexcept { return individuals.size(); }
};

inline Individual evaluate(const Problem& problem, std::vector<double> x) {
  const Evaluation e = problem.evaluate(x);
  Individual ind;
  ind.x = std::move(x);
  ind.f = e.f;
  ind.violation = e.violation;
  return ind;
}

/// Feasible beats infeasible, the smaller violation wins among infeasible,
/// and Pareto dominance decides among feasible.
inline bool constrained_dominates(const Individual& a, const Individual& b) noexcept {
  const bool fa = a.violation <= 0.0;
  const bool fb = b.violation <= 0.0;
  if (fa && fb) return dominates(a.f, b.f);
  if (fa != fb) return fa;
  return a.violation < b.violation;
}

/// Fronts of indices, best first.
inline std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<const Individual> pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (constrained_dominates(pop[p], pop[q])) dominated_by[p].push_back(q);
      else if (constrained_dominates(pop[q], pop[p])) ++domination_count[p];
    }
    if (domination_count[p] == 0) fronts[0].push_back(p);
  }
  for (std::size_t i = 0; !fronts[i].empty(); ++i) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts[i]) {
      for (std::size_t q : dominated_by[p]) {
        if (--domination_count[q] == 0) next.push_back(q);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

inline std::vector<std::size_t> ranks_of(std::span<const Individual> pop) {
  std::vector<std::size_t> ranks(pop.size(), 0);
  const auto fronts = fast_nondominated_sort(pop);
  for (std::size_t r = 0; r < fronts.size(); ++r)
    for (std::size_t i : fronts[r]) ranks[i] = r;
  return ranks;
}

/// Crowding distance of each member of `front` (indices into pop), in the
/// same order. Boundary points get +infinity.
inline std::vector<double> crowding_distance(std::span<const Individual> pop, std::span<const std::size_t> front) {
  const std::size_t m = front.size();
  std::vector<double> dist(m, 0.0);
  if (m <= 2) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    return dist;
  }
  std::vector<std::size_t> order(m);
  for (double Point::*axis : {&Point::f1, &Point::f2}) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[front[a]].f.*axis < pop[front[b]].f.*axis; });
    const double lo = pop[front[order.front()]].f.*axis;
    const double hi = pop[front[order.back()]].f.*axis;
    dist[order.front()] = std::numeric_limits<double>::infinity();
    dist[order.back()] = std::numeric_limits<double>::infinity();
    if (hi - lo <= 0.0) continue;
    for (std::size_t k = 1; k + 1 < m; ++k) {
      dist[order[k]] += (pop[front[order[k + 1]]].f.*axis - pop[front[order[k - 1]]].f.*axis) / (hi - lo);
    }
  }
  return dist;
}

struct VariationSettings {
  double crossover_prob = 0.9;
  double crossover_eta = 15.0;
  double mutation_eta = 20.0;
  double mutation_prob = -1.0;  // per variable; negative means 1/n
};

/// SBX spread factor for a uniform draw u.
inline double sbx_beta(double u, double eta) {
  return u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
}

inline std::pair<double, double> sbx_pair(double p1, double p2, double u, double eta) {
  const double beta = sbx_beta(u, eta);
  return {0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2), 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)};
}

/// Simulated binary crossover. Each variable recombines with probability 1/2,
/// the two offspring values are exchanged with probability 1/2, and children
/// are clamped into the box.
inline std::pair<std::vector<double>, std::vector<double>> sbx_crossover(const std::vector<double>& a,
                                                                         const std::vector<double>& b,
                                                                         const Problem& problem,
                                                                         const VariationSettings& s, Rng& rng) {
  std::vector<double> c1 = a, c2 = b;
  if (!rng.chance(s.crossover_prob)) return {c1, c2};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!rng.chance(0.5) || std::abs(a[i] - b[i]) <= 1e-14) continue;
    auto [y1, y2] = sbx_pair(a[i], b[i], rng.uniform(), s.crossover_eta);
    if (rng.chance(0.5)) std::swap(y1, y2);
    c1[i] = std::clamp(y1, problem.lower[i], problem.upper[i]);
    c2[i] = std::clamp(y2, problem.lower[i], problem.upper[i]);
  }
  return {std::move(c1), std::move(c2)};
}

/// Bounded polynomial mutation.
inline void polynomial_mutation(std::vector<double>& x, const Problem& problem, const VariationSettings& s, Rng& rng) {
  const double pm = s.mutation_prob < 0.0 ? 1.0 / static_cast<double>(x.size()) : s.mutation_prob;
  const double pow_exp = 1.0 / (s.mutation_eta + 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!rng.chance(pm)) continue;
    const double lo = problem.lower[i], hi = problem.upper[i];
    const double span = hi - lo;
    if (span <= 0.0) continue;
    const double d1 = (x[i] - lo) / span;
    const double d2 = (hi - x[i]) / span;
    const double r = rng.uniform();
    double dq = 0.0;
    if (r < 0.5) {
      const double val = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, s.mutation_eta + 1.0);
      dq = std::pow(val, pow_exp) - 1.0;
    } else {
      const double val = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, s.mutation_eta + 1.0);
      dq = 1.0 - std::pow(val, pow_exp);
    }
    x[i] = std::clamp(x[i] + dq * span, lo, hi);
  }
}

inline std::vector<double> random_point(const Problem& problem, Rng& rng) {
  std::vector<double> x(problem.dimension());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(problem.lower[i], problem.upper[i]);
  return x;
}

/// Objective vectors of the first constraint-domination front.
inline std::vector<Point> first_front(std::span<const Individual> pop) {
  const auto fronts = fast_nondominated_sort(pop);
  std::vector<Point> out;
  if (fronts.empty()) return out;
  out.reserve(fronts[0].size());
  for (std::size_t i : fronts[0]) out.push_back(pop[i].f);
  return out;
}

}  // namespace sonopt
