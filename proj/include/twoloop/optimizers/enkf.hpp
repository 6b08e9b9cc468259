#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "twoloop/core/rng.hpp"
#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

/// Ensemble Kalman inversion step. `ensemble` is D x J (one member per
/// column), `outputs` is K x J with column j = g(u_j). Each member moves by
///
///   u_j += C_ug (C_gg + gamma I)^-1 (target - g_j)
///
/// with sample covariances normalized by J - 1.
Eigen::MatrixXd enkf_update(const Eigen::MatrixXd& ensemble, const Eigen::MatrixXd& outputs,
                            const Eigen::VectorXd& target, double gamma);

/// Replaces the worst floor(fraction * J) members by copies of the best ones
/// plus per-component Gaussian noise. Ranking is by fitness, best first, with
/// the lower index winning ties.
std::vector<std::vector<double>> rank_replace(const std::vector<std::vector<double>>& members,
                                              std::span<const double> fitness, double fraction,
                                              double noise_sigma, Rng& rng);

struct EnkfParams {
  double gamma = 0.5;
  double replace_fraction = 0.10;
  /// Noise added to replacing members, in normalized [0, 1] units.
  double noise_sigma = 0.05;

  static EnkfParams from_json(const Json& j, const std::string& pointer);
  Json to_json() const;
};

/// Works on parameters mapped affinely from their bounds to [0, 1].
class EnkfOptimizer : public Optimizer {
 public:
  EnkfOptimizer(EnkfParams params, OptimizerContext context);

  std::string_view id() const override { return "enkf"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  Json snapshot() const override;
  void restore(const Json& snapshot) override;

  std::vector<double> normalize(std::span<const double> x) const;
  std::vector<double> denormalize(std::span<const double> u) const;

 private:
  EnkfParams params_;
  OptimizerContext context_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  /// Normalized ensemble proposed for the next generation, one row per member.
  std::vector<std::vector<double>> ensemble_;
  std::size_t steps_ = 0;
};

}  // namespace twoloop::optimizers
