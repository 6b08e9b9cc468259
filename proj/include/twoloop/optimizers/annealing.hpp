#pragma once

#include <span>
#include <vector>

#include "twoloop/core/rng.hpp"
#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

struct SaParams {
  double initial_temperature = 1.0;
  double cooling_rate = 0.95;
  /// Proposal sigma at temperature 1, as a fraction of each bound range.
  double step_fraction = 0.1;

  static SaParams from_json(const Json& j, const std::string& pointer);
  Json to_json() const;
};

struct SaState {
  double temperature = 1.0;
  double cooling_rate = 0.95;
  double step_fraction = 0.1;
  /// Accepted point and its fitness per chain; empty before the first step.
  std::vector<std::vector<double>> current;
  std::vector<double> current_fitness;

  Json to_json() const;
  static SaState from_json(const Json& j);
};

/// Metropolis rule for maximization: improvements are always accepted,
/// otherwise accept when u < exp(delta / temperature).
bool metropolis_accept(double delta, double temperature, double u);

struct SaStepResult {
  std::vector<std::vector<double>> population;
  SaState state;
  std::size_t accepted = 0;
};

/// One chain per individual. Each evaluated entry is the chain's proposal;
/// after acceptance the temperature cools and fresh proposals are drawn with
/// sigma = temperature * step_fraction * range.
SaStepResult simulated_annealing_step(const std::vector<Entry>& evaluated, const SaState& state,
                                      std::span<const double> lower,
                                      std::span<const double> upper, Rng& rng);

class AnnealingOptimizer : public Optimizer {
 public:
  AnnealingOptimizer(SaParams params, OptimizerContext context);

  std::string_view id() const override { return "sa"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  Json snapshot() const override { return state_.to_json(); }
  void restore(const Json& snapshot) override { state_ = SaState::from_json(snapshot); }

 private:
  OptimizerContext context_;
  SaState state_;
};

}  // namespace twoloop::optimizers
