#pragma once

// Decomposition-based search: one scalar subproblem per weight vector,
// Tchebycheff aggregation, mating and replacement within weight neighborhoods.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sonopt/moa.hpp"

namespace sonopt {

using Weight = std::array<double, 2>;

/// Evenly spaced weights on the 2-simplex: (k/H, 1 - k/H) for k = 0..H.
inline std::vector<Weight> das_dennis_2d(std::size_t partitions) {
  std::vector<Weight> w;
  w.reserve(partitions + 1);
  for (std::size_t k = 0; k <= partitions; ++k) {
    const double a = static_cast<double>(k) / static_cast<double>(partitions);
    w.push_back({a, 1.0 - a});
  }
  return w;
}

/// max_i lambda_i |f_i - z_i|
inline double tchebycheff(const Point& f, const Weight& lambda, const Point& ideal) {
  return std::max(lambda[0] * std::abs(f.f1 - ideal.f1), lambda[1] * std::abs(f.f2 - ideal.f2));
}

/// Indices of the `size` nearest weights (Euclidean) to each weight, itself included.
inline std::vector<std::vector<std::size_t>> weight_neighborhoods(const std::vector<Weight>& weights, std::size_t size) {
  const std::size_t n = weights.size();
  size = std::min(size, n);
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    auto dist = [&](std::size_t j) {
      return std::hypot(weights[i][0] - weights[j][0], weights[i][1] - weights[j][1]);
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist(a) < dist(b); });
    out[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
  }
  return out;
}

struct MoeadSettings {
  std::size_t partitions = 100;
  std::size_t neighborhood_size = 15;
  double neighbor_mating_prob = 0.7;
  double violation_penalty = 1e3;
  VariationSettings variation{1.0, 20.0, 20.0, -1.0};
};

class Moead {
 public:
  Moead(Problem problem, std::uint64_t seed, MoeadSettings settings = {})
      : problem_(std::move(problem)),
        settings_(settings),
        weights_(das_dennis_2d(settings.partitions)),
        neighbors_(weight_neighborhoods(weights_, settings.neighborhood_size)),
        init_rng_(Rng::stream(seed, "moead/init")),
        mating_rng_(Rng::stream(seed, "moead/mating")),
        crossover_rng_(Rng::stream(seed, "moead/sbx")),
        mutation_rng_(Rng::stream(seed, "moead/mutation")) {
    pop_.individuals.reserve(weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      pop_.individuals.push_back(evaluate(problem_, random_point(problem_, init_rng_)));
    }
    ideal_ = pop_.individuals.front().f;
    for (const auto& ind : pop_.individuals) update_ideal(ind.f);
  }

  const Population& population() const noexcept { return pop_; }
  const std::vector<Weight>& weights() const noexcept { return weights_; }
  const std::vector<std::vector<std::size_t>>& neighborhoods() const noexcept { return neighbors_; }
  const Point& ideal() const noexcept { return ideal_; }

  double aggregate(const Individual& ind, std::size_t subproblem) const {
    return tchebycheff(ind.f, weights_[subproblem], ideal_) + settings_.violation_penalty * ind.violation;
  }

  /// One pass over every subproblem in random order.
  void step() {
    const std::size_t n = weights_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[mating_rng_.below(i)]);

    std::vector<std::size_t> everyone(n);
    std::iota(everyone.begin(), everyone.end(), 0);

    for (std::size_t sub : order) {
      const auto& pool = mating_rng_.chance(settings_.neighbor_mating_prob) ? neighbors_[sub] : everyone;
      const std::size_t a = pool[mating_rng_.below(pool.size())];
      std::size_t b = pool[mating_rng_.below(pool.size())];
      if (pool.size() > 1) {
        while (b == a) b = pool[mating_rng_.below(pool.size())];
      }
      auto [c1, c2] = sbx_crossover(pop_.individuals[a].x, pop_.individuals[b].x, problem_, settings_.variation,
                                    crossover_rng_);
      auto child_x = mating_rng_.chance(0.5) ? std::move(c1) : std::move(c2);
      polynomial_mutation(child_x, problem_, settings_.variation, mutation_rng_);
      Individual child = evaluate(problem_, std::move(child_x));
      update_ideal(child.f);
      for (std::size_t j : pool) {
        if (aggregate(child, j) < aggregate(pop_.individuals[j], j)) pop_.individuals[j] = child;
      }
    }
    ++pop_.generation_index;
  }

  std::vector<Point> current_front() const { return first_front(pop_.individuals); }

 private:
  void update_ideal(const Point& f) {
    ideal_.f1 = std::min(ideal_.f1, f.f1);
    ideal_.f2 = std::min(ideal_.f2, f.f2);
  }

  Problem problem_;
  MoeadSettings settings_;
  std::vector<Weight> weights_;
  std::vector<std::vector<std::size_t>> neighbors_;
  Population pop_;
  Point ideal_;
  Rng init_rng_, mating_rng_, crossover_rng_, mutation_rng_;
};

}  // namespace sonopt
