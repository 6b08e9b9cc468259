#pragma once

#include <span>

#include "twoloop/core/types.hpp"

namespace twoloop {

/// Scalarizes a fitness vector as the dot product with the weights.
/// Length mismatch is a Config error; a non-finite component is EvaluationFailed.
double weight_fitness(std::span<const double> fitness, std::span<const double> weights);

/// Clamps every component into its bounds; integer parameters are rounded
/// half away from zero after clamping.
Individual clip_individual(const Individual& individual, const Bounds& bounds);

/// Rounds half away from zero (std::round semantics), spelled out for readers.
double round_half_away(double x) noexcept;

struct BestEntry {
  Individual individual;
  FitnessVector fitness;
  double weighted_fitness = 0.0;
  std::size_t generation = 0;
};

/// Highest weighted fitness over all ok entries. Ties go to the lower
/// generation, then the lower index.
BestEntry best_entry(const Trajectory& trajectory);

}  // namespace twoloop
