#pragma once

#include <span>
#include <vector>

#include "twoloop/core/rng.hpp"
#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

struct EsParams {
  /// Perturbation scale, in parameter units.
  double sigma = 0.1;
  double learning_rate = 0.05;
  /// Antithetic sampling: perturbations come in +eps / -eps pairs.
  bool mirrored = true;

  static EsParams from_json(const Json& j, const std::string& pointer);
  Json to_json() const;
};

struct EsState {
  std::vector<double> mean;
  double sigma = 0.1;
  double learning_rate = 0.05;
  bool mirrored = true;
  /// Perturbations of the population currently under evaluation.
  std::vector<std::vector<double>> epsilons;

  Json to_json() const;
  static EsState from_json(const Json& j);
};

/// Centered rank transform into [-0.5, 0.5]; tied values share their
/// average rank, so a constant input maps to all zeros.
std::vector<double> centered_ranks(std::span<const double> fitness);

struct EsStepResult {
  std::vector<std::vector<double>> population;
  EsState state;
};

/// mean += learning_rate / (J sigma) * sum_j rank_j eps_j, then resample.
EsStepResult evolution_strategies_step(const std::vector<Entry>& evaluated, const EsState& state,
                                       std::span<const double> lower,
                                       std::span<const double> upper, Rng& rng);

/// Draws `count` perturbations and the matching population around the mean.
void es_sample(EsState& state, std::size_t count, std::span<const double> lower,
               std::span<const double> upper, Rng& rng,
               std::vector<std::vector<double>>& population);

class EvolutionStrategiesOptimizer : public Optimizer {
 public:
  EvolutionStrategiesOptimizer(EsParams params, OptimizerContext context);

  std::string_view id() const override { return "es"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  Json snapshot() const override { return state_.to_json(); }
  void restore(const Json& snapshot) override { state_ = EsState::from_json(snapshot); }

  const EsState& state() const { return state_; }

 private:
  OptimizerContext context_;
  EsState state_;
};

}  // namespace twoloop::optimizers
