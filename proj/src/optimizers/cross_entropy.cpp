#include "twoloop/optimizers/cross_entropy.hpp"

#include <algorithm>
#include <cmath>

#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::optimizers {

CeParams CeParams::from_json(const Json& j, const std::string& pointer) {
  ParamReader r(j, pointer);
  CeParams p;
  p.elite_fraction = r.get("elite_fraction", p.elite_fraction);
  p.smoothing = r.get("smoothing", p.smoothing);
  p.sigma_floor_fraction = r.get("sigma_floor_fraction", p.sigma_floor_fraction);
  r.finish();
  if (!(p.elite_fraction > 0.0 && p.elite_fraction <= 1.0)) {
    throw config_error("elite_fraction must lie in (0, 1]", r.pointer("elite_fraction"));
  }
  if (!(p.smoothing > 0.0 && p.smoothing <= 1.0)) {
    throw config_error("smoothing must lie in (0, 1]", r.pointer("smoothing"));
  }
  if (!(p.sigma_floor_fraction > 0.0)) {
    throw config_error("sigma_floor_fraction must be positive", r.pointer("sigma_floor_fraction"));
  }
  return p;
}

Json CeParams::to_json() const {
  return Json{{"elite_fraction", elite_fraction},
              {"smoothing", smoothing},
              {"sigma_floor_fraction", sigma_floor_fraction}};
}

Json CeState::to_json() const {
  return Json{{"kind", "ce"}, {"mean", mean}, {"sigma", sigma}, {"elite_fraction", elite_fraction}};
}

CeState CeState::from_json(const Json& j) {
  CeState s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.sigma = j.at("sigma").get<std::vector<double>>();
  s.elite_fraction = j.at("elite_fraction").get<double>();
  return s;
}

CeStepResult cross_entropy_step(const std::vector<Entry>& evaluated, const CeState& state,
                                const CeParams& params, std::size_t population_size,
                                std::span<const double> lower, std::span<const double> upper,
                                Rng& rng) {
  std::vector<std::vector<double>> points;
  std::vector<double> fitness;
  for (const auto& e : evaluated) {
    if (e.status != EvalStatus::Ok) continue;
    points.push_back(e.individual.flatten());
    fitness.push_back(e.weighted_fitness);
  }
  if (points.empty()) throw Error(ErrorKind::EvaluationFailed, "every individual failed");

  const auto elites = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(state.elite_fraction * static_cast<double>(points.size()))));
  const auto order = rank_descending(fitness);
  const std::size_t d = state.mean.size();

  std::vector<double> mean(d, 0.0);
  for (std::size_t e = 0; e < elites; ++e) {
    for (std::size_t i = 0; i < d; ++i) mean[i] += points[order[e]][i];
  }
  for (auto& m : mean) m /= static_cast<double>(elites);
  std::vector<double> sigma(d, 0.0);
  for (std::size_t e = 0; e < elites; ++e) {
    for (std::size_t i = 0; i < d; ++i) {
      const double delta = points[order[e]][i] - mean[i];
      sigma[i] += delta * delta;
    }
  }
  for (auto& s : sigma) s = std::sqrt(s / static_cast<double>(elites));

  CeStepResult result;
  result.state = state;
  const double a = params.smoothing;
  for (std::size_t i = 0; i < d; ++i) {
    result.state.mean[i] = a * mean[i] + (1.0 - a) * state.mean[i];
    const double floor = params.sigma_floor_fraction * (upper[i] - lower[i]);
    result.state.sigma[i] = std::max(a * sigma[i] + (1.0 - a) * state.sigma[i], floor);
  }

  result.population.reserve(population_size);
  for (std::size_t j = 0; j < population_size; ++j) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = result.state.mean[i] + result.state.sigma[i] * rng.normal();
    }
    clamp_into(x, lower, upper);
    result.population.push_back(std::move(x));
  }
  return result;
}

CrossEntropyOptimizer::CrossEntropyOptimizer(CeParams params, OptimizerContext context)
    : params_(params), context_(std::move(context)) {
  state_.elite_fraction = params_.elite_fraction;
  const auto lo = context_.bounds.flat_lower();
  const auto hi = context_.bounds.flat_upper();
  // Start from the moments of the uniform distribution over the bounds.
  for (std::size_t i = 0; i < lo.size(); ++i) {
    state_.mean.push_back(0.5 * (lo[i] + hi[i]));
    state_.sigma.push_back((hi[i] - lo[i]) / std::sqrt(12.0));
  }
}

std::vector<std::vector<double>> CrossEntropyOptimizer::initial_population(
    const Optimizee& optimizee, Rng& rng) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < context_.population_size; ++i) {
    out.push_back(optimizee.create_individual(rng).flatten());
  }
  return out;
}

std::vector<std::vector<double>> CrossEntropyOptimizer::step(const std::vector<Entry>& evaluated,
                                                             Rng& rng) {
  auto result = cross_entropy_step(evaluated, state_, params_, context_.population_size,
                                   context_.bounds.flat_lower(), context_.bounds.flat_upper(), rng);
  state_ = std::move(result.state);
  return std::move(result.population);
}

}  // namespace twoloop::optimizers
