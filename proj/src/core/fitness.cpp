#include "twoloop/core/fitness.hpp"

#include <algorithm>
#include <cmath>

#include "twoloop/core/error.hpp"

namespace twoloop {

double weight_fitness(std::span<const double> fitness, std::span<const double> weights) {
  if (fitness.size() != weights.size()) {
    throw config_error("fitness vector has " + std::to_string(fitness.size()) +
                       " components but " + std::to_string(weights.size()) +
                       " fitness weights were given");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < fitness.size(); ++k) {
    if (!std::isfinite(fitness[k])) {
      throw Error(ErrorKind::EvaluationFailed,
                  "fitness component " + std::to_string(k) + " is not finite");
    }
    total += weights[k] * fitness[k];
  }
  return total;
}

double round_half_away(double x) noexcept { return std::round(x); }

Individual clip_individual(const Individual& individual, const Bounds& bounds) {
  Individual out = individual;
  for (auto& param : out.params) {
    const ParameterBounds* b = bounds.find(param.name);
    if (b == nullptr) throw config_error("no bounds for parameter '" + param.name + "'");
    if (b->size() != param.value.size()) {
      throw config_error("parameter '" + param.name + "' has dimension " +
                         std::to_string(param.value.size()) + ", bounds have " +
                         std::to_string(b->size()));
    }
    for (std::size_t i = 0; i < param.value.size(); ++i) {
      double v = std::clamp(param.value[i], b->lower[i], b->upper[i]);
      if (b->integer) v = round_half_away(v);
      param.value[i] = v;
    }
  }
  return out;
}

BestEntry best_entry(const Trajectory& trajectory) {
  const Entry* best = nullptr;
  std::size_t best_generation = 0;
  for (const auto& record : trajectory.records()) {
    for (const auto& entry : record.entries) {
      if (entry.status != EvalStatus::Ok) continue;
      // Records and entries are visited in (generation, index) order, so a
      // strict comparison keeps the earliest of equal entries.
      if (best == nullptr || entry.weighted_fitness > best->weighted_fitness) {
        best = &entry;
        best_generation = record.generation;
      }
    }
  }
  if (best == nullptr) {
    throw Error(ErrorKind::EmptyTrajectory, "trajectory has no successfully evaluated entries");
  }
  return {best->individual, best->fitness, best->weighted_fitness, best_generation};
}

}  // namespace twoloop
