#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace twoloop::benchmarks {

/// Softmax with max-subtraction; sums to one for any finite input.
std::vector<double> softmax(std::span<const double> x);

/// 1 - (1/n) sum_i ||y_i - yhat_i||^2: squared error summed over components,
/// averaged over samples. Throws a Config error on count or size mismatch.
double mse_fitness(const std::vector<std::vector<double>>& predictions,
                   const std::vector<std::vector<double>>& labels);

/// Event counts of one ant during one simulation step.
struct ColonyEvents {
  long rotations = 0;
  long pheromone_drops = 0;
  long movements = 0;
  long rests = 0;
  long nest_returns = 0;
  long food_touches = 0;
};

/// Per-event rewards (positive) and costs (subtracted).
struct ColonyConstants {
  double rotation = 0.02;
  double pheromone = 0.05;
  double movement = 0.25;
  double rest = 0.5;
  double nest_return = 220.0;
  double food_touch = 1.5;
};

/// log[t][j]: events of ant j in step t.
using ColonyEventLog = std::vector<std::vector<ColonyEvents>>;

/// Sum over steps and ants of rewards minus costs.
double colony_fitness(const ColonyEventLog& log, const ColonyConstants& constants = {});

inline constexpr double kRateFloor = 1e-6;

/// 1 / max(0.8 |le - ee| + 0.2 |li - ei|, floor).
double sp_fitness_two_pop(double rate_e, double rate_i, double target_e, double target_i,
                          double floor = kRateFloor);

/// Four layers of (excitatory, inhibitory) rates.
struct LayerRates {
  double excitatory = 0.0;
  double inhibitory = 0.0;
};

/// 1 / max(sum over the 8 populations of |rate - target|, floor).
double sp_fitness_microcircuit(std::span<const LayerRates, 4> rates,
                               std::span<const LayerRates, 4> targets,
                               double floor = kRateFloor);

/// Negated sphere, Rastrigin or Rosenbrock; maxima are 0. Unknown names are
/// Config errors.
double analytic_function(std::string_view name, std::span<const double> x);

double negated_sphere(std::span<const double> x);
double negated_rastrigin(std::span<const double> x);
double negated_rosenbrock(std::span<const double> x);

/// Pearson correlation of two equally long samples. Throws
/// Error(EvaluationFailed) when either has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace twoloop::benchmarks
