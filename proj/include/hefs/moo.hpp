#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "hefs/individual.hpp"
#include "hefs/rng.hpp"

namespace hefs {

using Point2 = std::array<double, 2>;

/// Both objectives are maximized.
bool dominates(const FitnessPair& a, const FitnessPair& b);

/// Fronts of indices into `fitnesses`, best first; every index appears once.
std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const FitnessPair> fitnesses);

/// Reference-point partition count for a front of the given size:
/// max(1, ceil(ln(|F| + 1) * sqrt(|F|))).
std::size_t adaptive_partitions(std::size_t front_size);

struct ReferencePointSet {
    std::vector<Point2> points;  // (i/P, 1 - i/P), i = 0..P
};

ReferencePointSet generate_reference_points(std::size_t partitions);

/// Per-objective min-max scaling; a degenerate objective maps to 0.
std::vector<Point2> normalize_front(std::span<const FitnessPair> front);

/// Pick `quota` members of `front` (indices into `fitnesses`), spreading picks
/// across reference-point niches: each round takes the least-picked niche that
/// still has members and draws one of them uniformly.
std::vector<std::size_t> niche_select(std::span<const std::size_t> front,
                                      std::span<const FitnessPair> fitnesses, std::size_t quota,
                                      Rng& rng);

/// First front of an evaluated population after dropping repeated masks
/// (first occurrence kept). Order follows the input.
std::vector<Individual> pareto_solutions(std::span<const Individual> population);

}  // namespace hefs
