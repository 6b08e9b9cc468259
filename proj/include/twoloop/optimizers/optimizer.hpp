#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "twoloop/core/engine.hpp"
#include "twoloop/core/types.hpp"

namespace twoloop::optimizers {

/// What an optimizer needs to know about the run it is part of.
struct OptimizerContext {
  Bounds bounds;
  std::size_t population_size = 1;
  /// Observation target for ensemble Kalman inversion.
  std::optional<std::vector<double>> target;
};

/// Registered optimizer ids, which double as their parameter block names.
const std::vector<std::string>& optimizer_ids();

/// Builds an optimizer from its parameter block. `pointer` locates the block
/// in the config document for error messages.
std::unique_ptr<Optimizer> make_optimizer(const std::string& id, const Json& params,
                                          const OptimizerContext& context,
                                          const std::string& pointer = "");

/// Parameter block with every default filled in.
Json normalized_optimizer_params(const std::string& id, const Json& params,
                                 const std::string& pointer = "");

/// Indices sorted best first by fitness; ties go to the lower index.
std::vector<std::size_t> rank_descending(std::span<const double> fitness);

std::vector<double> weighted_fitness_of(const std::vector<Entry>& entries);
std::vector<std::vector<double>> flat_params_of(const std::vector<Entry>& entries);

/// Clamps a flat vector into flat bounds.
void clamp_into(std::vector<double>& x, std::span<const double> lower,
                std::span<const double> upper);

Json matrix_to_json(const std::vector<std::vector<double>>& rows);
std::vector<std::vector<double>> matrix_from_json(const Json& j);

}  // namespace twoloop::optimizers
