#pragma once

#include <span>
#include <vector>

#include "twoloop/core/rng.hpp"
#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

struct GradientEstimate {
  std::vector<double> gradient;
  /// All samples coincide; the gradient is reported as zero.
  bool degenerate = false;
};

/// Least-squares fit f ~ a + g . x over the samples; returns g. Rank-deficient
/// designs get the minimum-norm solution.
GradientEstimate estimate_gradient(const std::vector<std::vector<double>>& points,
                                   std::span<const double> fitness);

struct GdParams {
  double learning_rate = 0.01;
  /// Standard deviation of the exploration samples, in parameter units.
  double exploration_radius = 0.1;

  static GdParams from_json(const Json& j, const std::string& pointer);
  Json to_json() const;
};

struct GdState {
  std::vector<double> point;
  double learning_rate = 0.01;
  double exploration_radius = 0.1;

  Json to_json() const;
  static GdState from_json(const Json& j);
};

struct GdStepResult {
  std::vector<std::vector<double>> population;
  GdState state;
};

/// Gradient ascent on a sampled population: the ok entries are regressed,
/// the point moves by learning_rate * gradient, and the next population is the
/// new point followed by Gaussian exploration samples around it.
GdStepResult gradient_step(const std::vector<Entry>& evaluated, const GdState& state,
                           std::size_t population_size, std::span<const double> lower,
                           std::span<const double> upper, Rng& rng);

class GradientOptimizer : public Optimizer {
 public:
  GradientOptimizer(GdParams params, OptimizerContext context);

  std::string_view id() const override { return "gd"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  Json snapshot() const override { return state_.to_json(); }
  void restore(const Json& snapshot) override { state_ = GdState::from_json(snapshot); }

 private:
  OptimizerContext context_;
  GdState state_;
};

/// Point plus Gaussian samples around it, clamped into bounds.
std::vector<std::vector<double>> sample_around(const std::vector<double>& point, double radius,
                                               std::size_t count, std::span<const double> lower,
                                               std::span<const double> upper, Rng& rng);

}  // namespace twoloop::optimizers
