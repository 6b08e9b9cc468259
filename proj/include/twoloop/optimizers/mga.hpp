#pragma once

#include <optional>
#include <span>
#include <vector>

#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

/// Axis-aligned box: center +/- half_width per dimension.
struct ParameterRange {
  std::vector<double> center;
  std::vector<double> half_width;
};

/// Expanded batch: every parameter combination paired with its fitness.
struct FitnessBatch {
  std::vector<std::vector<double>> points;
  std::vector<double> fitness;
};

struct MgaParams {
  double learning_rate = 0.01;
  /// Half-width multiplier applied every generation.
  double shrink = 0.5;
  /// Grid points per dimension inside one range.
  std::size_t resolution = 16;
  /// Initial half-width as a fraction of half the bound range.
  double initial_width_fraction = 0.5;
  /// Carry each batch's best-so-far point into its next grid.
  bool keep_incumbent = true;

  static MgaParams from_json(const Json& j, const std::string& pointer);
  Json to_json() const;
};

/// One gradient-ascent move per batch: picks the best point, moves it by
/// learning_rate times the regression gradient of the batch, and returns a
/// range centered there with shrunken half-width. Ranges are shifted to stay
/// inside the bounds when they fit.
std::vector<ParameterRange> mga_step(const std::vector<FitnessBatch>& batches,
                                     const std::vector<ParameterRange>& ranges,
                                     const MgaParams& params, std::span<const double> lower,
                                     std::span<const double> upper);

/// Endpoint-inclusive grid of `resolution` points per dimension over the
/// range, first dimension slowest.
std::vector<std::vector<double>> expand_range(const ParameterRange& range, std::size_t resolution);

/// Moves a range inside [lower, upper] without changing its width, or clamps
/// it when it is wider than the bounds.
ParameterRange fit_into(ParameterRange range, std::span<const double> lower,
                        std::span<const double> upper);

struct Incumbent {
  std::vector<double> point;
  double fitness = 0.0;
};

/// Multi-gradient ascent. The population is the concatenation of one grid per
/// batch (batch count = population / resolution^D).
class MgaOptimizer : public Optimizer {
 public:
  MgaOptimizer(MgaParams params, OptimizerContext context);

  std::string_view id() const override { return "mga"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  Json snapshot() const override;
  void restore(const Json& snapshot) override;

  std::size_t batch_count() const { return batches_; }
  std::size_t batch_size() const { return batch_size_; }
  const std::vector<ParameterRange>& ranges() const { return ranges_; }

 private:
  std::vector<std::vector<double>> compress() const;

  MgaParams params_;
  OptimizerContext context_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::size_t batch_size_ = 0;
  std::size_t batches_ = 0;
  std::vector<ParameterRange> ranges_;
  std::vector<std::optional<Incumbent>> incumbents_;
};

}  // namespace twoloop::optimizers
