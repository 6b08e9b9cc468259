#include "twoloop/benchmarks/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "twoloop/core/error.hpp"

namespace twoloop::benchmarks {

std::vector<double> softmax(std::span<const double> x) {
  std::vector<double> out(x.size());
  if (x.empty()) return out;
  const double m = *std::max_element(x.begin(), x.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

double mse_fitness(const std::vector<std::vector<double>>& predictions,
                   const std::vector<std::vector<double>>& labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw config_error("mse_fitness needs equally many, and at least one, predictions and labels");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].size() != labels[i].size()) {
      throw config_error("mse_fitness sample " + std::to_string(i) + " has mismatched dimensions");
    }
    double sample = 0.0;
    for (std::size_t k = 0; k < labels[i].size(); ++k) {
      const double d = labels[i][k] - predictions[i][k];
      sample += d * d;
    }
    total += sample;
  }
  return 1.0 - total / static_cast<double>(predictions.size());
}

double colony_fitness(const ColonyEventLog& log, const ColonyConstants& c) {
  // Integer totals first: the sum is exact and independent of traversal order.
  ColonyEvents total;
  for (const auto& step : log) {
    for (const auto& e : step) {
      total.rotations += e.rotations;
      total.pheromone_drops += e.pheromone_drops;
      total.movements += e.movements;
      total.rests += e.rests;
      total.nest_returns += e.nest_returns;
      total.food_touches += e.food_touches;
    }
  }
  const double reward = c.nest_return * static_cast<double>(total.nest_returns) +
                        c.food_touch * static_cast<double>(total.food_touches);
  const double cost = c.rotation * static_cast<double>(total.rotations) +
                      c.pheromone * static_cast<double>(total.pheromone_drops) +
                      c.movement * static_cast<double>(total.movements) +
                      c.rest * static_cast<double>(total.rests);
  return reward - cost;
}

double sp_fitness_two_pop(double rate_e, double rate_i, double target_e, double target_i,
                          double floor) {
  const double d = 0.8 * std::abs(rate_e - target_e) + 0.2 * std::abs(rate_i - target_i);
  return 1.0 / std::max(d, floor);
}

double sp_fitness_microcircuit(std::span<const LayerRates, 4> rates,
                               std::span<const LayerRates, 4> targets, double floor) {
  double d = 0.0;
  for (std::size_t l = 0; l < 4; ++l) {
    d += std::abs(rates[l].excitatory - targets[l].excitatory);
    d += std::abs(rates[l].inhibitory - targets[l].inhibitory);
  }
  return 1.0 / std::max(d, floor);
}

double negated_sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return 0.0 - s;
}

double negated_rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
  return 0.0 - s;
}

double negated_rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i];
    const double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return 0.0 - s;
}

double analytic_function(std::string_view name, std::span<const double> x) {
  if (name == "sphere") return negated_sphere(x);
  if (name == "rastrigin") return negated_rastrigin(x);
  if (name == "rosenbrock") return negated_rosenbrock(x);
  throw config_error("unknown analytic function '" + std::string(name) +
                     "' (known: sphere, rastrigin, rosenbrock)");
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::EvaluationFailed, "pearson needs two samples of equal length >= 2");
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw Error(ErrorKind::EvaluationFailed, "correlation of a constant signal is undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace twoloop::benchmarks
