#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "sonopt/moa.hpp"

namespace sonopt {

struct Nsga2Settings {
  std::size_t population_size = 100;
  VariationSettings variation{0.9, 15.0, 20.0, -1.0};
};

namespace nsga2 {

/// Ranks and crowds `pop` in place.
inline void assign_rank_and_crowding(std::vector<Individual>& pop) {
  const auto fronts = fast_nondominated_sort(pop);
  for (std::size_t r = 0; r < fronts.size(); ++r) {
    const auto cd = crowding_distance(pop, fronts[r]);
    for (std::size_t k = 0; k < fronts[r].size(); ++k) {
      pop[fronts[r][k]].rank = r;
      pop[fronts[r][k]].crowding = cd[k];
    }
  }
}

/// (mu + lambda) survival: whole fronts while they fit, then the least
/// crowded members of the split front.
inline std::vector<Individual> survive(std::vector<Individual> merged, std::size_t n) {
  const auto fronts = fast_nondominated_sort(merged);
  std::vector<Individual> next;
  next.reserve(n);
  for (std::size_t r = 0; r < fronts.size() && next.size() < n; ++r) {
    const auto& front = fronts[r];
    const auto cd = crowding_distance(merged, front);
    std::vector<std::size_t> order(front.size());
    std::iota(order.begin(), order.end(), 0);
    if (next.size() + front.size() > n) {
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
      order.resize(n - next.size());
    }
    for (std::size_t k : order) {
      Individual ind = merged[front[k]];
      ind.rank = r;
      next.push_back(std::move(ind));
    }
  }
  // Crowding is recomputed over the surviving members of each front.
  assign_rank_and_crowding(next);
  return next;
}

inline const Individual& tournament(const std::vector<Individual>& pop, Rng& rng) {
  const auto& a = pop[rng.below(pop.size())];
  const auto& b = pop[rng.below(pop.size())];
  if (a.rank != b.rank) return a.rank < b.rank ? a : b;
  if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
  return rng.chance(0.5) ? a : b;
}

}  // namespace nsga2

class Nsga2 {
 public:
  Nsga2(Problem problem, std::uint64_t seed, Nsga2Settings settings = {})
      : problem_(std::move(problem)),
        settings_(settings),
        init_rng_(Rng::stream(seed, "nsga2/init")),
        mating_rng_(Rng::stream(seed, "nsga2/mating")),
        crossover_rng_(Rng::stream(seed, "nsga2/sbx")),
        mutation_rng_(Rng::stream(seed, "nsga2/mutation")) {
    pop_.individuals.reserve(settings_.population_size);
    for (std::size_t i = 0; i < settings_.population_size; ++i) {
      pop_.individuals.push_back(evaluate(problem_, random_point(problem_, init_rng_)));
    }
    nsga2::assign_rank_and_crowding(pop_.individuals);
  }

  const Population& population() const noexcept { return pop_; }
  const Problem& problem() const noexcept { return problem_; }

  void step() {
    const std::size_t n = settings_.population_size;
    std::vector<Individual> merged = pop_.individuals;
    merged.reserve(2 * n);
    while (merged.size() < 2 * n) {
      const auto& p1 = nsga2::tournament(pop_.individuals, mating_rng_);
      const auto& p2 = nsga2::tournament(pop_.individuals, mating_rng_);
      auto [c1, c2] = sbx_crossover(p1.x, p2.x, problem_, settings_.variation, crossover_rng_);
      polynomial_mutation(c1, problem_, settings_.variation, mutation_rng_);
      merged.push_back(evaluate(problem_, std::move(c1)));
      if (merged.size() < 2 * n) {
        polynomial_mutation(c2, problem_, settings_.variation, mutation_rng_);
        merged.push_back(evaluate(problem_, std::move(c2)));
      }
    }
    pop_.individuals = nsga2::survive(std::move(merged), n);
    ++pop_.generation_index;
  }

  std::vector<Point> current_front() const { return first_front(pop_.individuals); }

 private:
  Problem problem_;
  Nsga2Settings settings_;
  Population pop_;
  Rng init_rng_, mating_rng_, crossover_rng_, mutation_rng_;
};

}  // namespace sonopt
