#pragma once

#include <span>
#include <vector>

#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

struct GridAxis {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t resolution = 1;
};

inline constexpr std::size_t kDefaultGridCap = 10'000'000;

/// Endpoint-inclusive linear spacing; a single point sits at the lower bound.
std::vector<double> axis_values(const GridAxis& axis);

/// Product of resolutions. Throws a Config error reporting the count when it
/// exceeds `cap`.
std::size_t grid_point_count(std::span<const GridAxis> axes, std::size_t cap = kDefaultGridCap);

/// Point number `n` of the Cartesian product in row-major order of
/// declaration (last axis fastest).
std::vector<double> grid_point(std::span<const GridAxis> axes, std::size_t n);

/// The whole enumeration split into generations of `population_size`. The
/// final generation wraps around to the start of the grid when the count is
/// not a multiple of the population size.
std::vector<std::vector<std::vector<double>>> grid_search_plan(std::span<const GridAxis> axes,
                                                               std::size_t population_size,
                                                               std::size_t cap = kDefaultGridCap);

struct GridParams {
  /// Resolution per scalar component, flattened in declaration order.
  std::vector<std::size_t> resolutions;
  std::size_t max_points = kDefaultGridCap;
  /// Original block, kept for round-tripping.
  Json resolution_spec = 10;

  static GridParams from_json(const Json& j, const Bounds& bounds, const std::string& pointer);
  Json to_json() const;
};

class GridSearchOptimizer : public Optimizer {
 public:
  GridSearchOptimizer(const GridParams& params, OptimizerContext context);

  std::string_view id() const override { return "grid"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  /// True once every grid point has been evaluated.
  bool exhausted() const override { return evaluated_ >= total_; }
  Json snapshot() const override;
  void restore(const Json& snapshot) override;

  std::size_t total_points() const { return total_; }

 private:
  std::vector<std::vector<double>> next_batch();

  OptimizerContext context_;
  std::vector<GridAxis> axes_;
  std::size_t total_ = 0;
  /// Number of grid points handed out so far.
  std::size_t cursor_ = 0;
  std::size_t evaluated_ = 0;
};

}  // namespace twoloop::optimizers
