#pragma once

#include <span>
#include <vector>

#include "twoloop/core/rng.hpp"
#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

struct CeParams {
  double elite_fraction = 0.2;
  /// Weight of the freshly fitted moments; 1 disables smoothing.
  double smoothing = 0.7;
  /// Sigma floor as a fraction of each bound range.
  double sigma_floor_fraction = 1e-8;

  static CeParams from_json(const Json& j, const std::string& pointer);
  Json to_json() const;
};

struct CeState {
  std::vector<double> mean;
  std::vector<double> sigma;
  double elite_fraction = 0.2;

  Json to_json() const;
  static CeState from_json(const Json& j);
};

struct CeStepResult {
  std::vector<std::vector<double>> population;
  CeState state;
};

/// Fits a diagonal Gaussian to the top ceil(elite_fraction * J) ok entries,
/// blends it with the previous moments and samples the next population.
CeStepResult cross_entropy_step(const std::vector<Entry>& evaluated, const CeState& state,
                                const CeParams& params, std::size_t population_size,
                                std::span<const double> lower, std::span<const double> upper,
                                Rng& rng);

class CrossEntropyOptimizer : public Optimizer {
 public:
  CrossEntropyOptimizer(CeParams params, OptimizerContext context);

  std::string_view id() const override { return "ce"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  Json snapshot() const override { return state_.to_json(); }
  void restore(const Json& snapshot) override { state_ = CeState::from_json(snapshot); }

 private:
  CeParams params_;
  OptimizerContext context_;
  CeState state_;
};

}  // namespace twoloop::optimizers
