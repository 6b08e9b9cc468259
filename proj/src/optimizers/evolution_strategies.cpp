#include "twoloop/optimizers/evolution_strategies.hpp"

#include <algorithm>
#include <numeric>

#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::optimizers {

EsParams EsParams::from_json(const Json& j, const std::string& pointer) {
  ParamReader r(j, pointer);
  EsParams p;
  p.sigma = r.get("sigma", p.sigma);
  p.learning_rate = r.get("learning_rate", p.learning_rate);
  p.mirrored = r.get("mirrored", p.mirrored);
  r.finish();
  if (!(p.sigma > 0.0)) throw config_error("sigma must be positive", r.pointer("sigma"));
  if (!(p.learning_rate > 0.0)) {
    throw config_error("learning_rate must be positive", r.pointer("learning_rate"));
  }
  return p;
}

Json EsParams::to_json() const {
  return Json{{"sigma", sigma}, {"learning_rate", learning_rate}, {"mirrored", mirrored}};
}

Json EsState::to_json() const {
  return Json{{"kind", "es"},
              {"mean", mean},
              {"sigma", sigma},
              {"learning_rate", learning_rate},
              {"mirrored", mirrored},
              {"epsilons", matrix_to_json(epsilons)}};
}

EsState EsState::from_json(const Json& j) {
  EsState s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.sigma = j.at("sigma").get<double>();
  s.learning_rate = j.at("learning_rate").get<double>();
  s.mirrored = j.at("mirrored").get<bool>();
  s.epsilons = matrix_from_json(j.at("epsilons"));
  return s;
}

std::vector<double> centered_ranks(std::span<const double> fitness) {
  const std::size_t n = fitness.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && fitness[order[j + 1]] == fitness[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) {
      out[order[k]] = rank / static_cast<double>(n - 1) - 0.5;
    }
    i = j + 1;
  }
  return out;
}

void es_sample(EsState& state, std::size_t count, std::span<const double> lower,
               std::span<const double> upper, Rng& rng,
               std::vector<std::vector<double>>& population) {
  const std::size_t d = state.mean.size();
  state.epsilons.clear();
  population.clear();
  for (std::size_t j = 0; j < count; ++j) {
    std::vector<double> eps;
    if (state.mirrored && j % 2 == 1) {
      eps = state.epsilons.back();
      for (auto& v : eps) v = -v;
    } else {
      eps = rng.normal_vector(d);
    }
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = state.mean[i] + state.sigma * eps[i];
    clamp_into(x, lower, upper);
    population.push_back(std::move(x));
    state.epsilons.push_back(std::move(eps));
  }
}

EsStepResult evolution_strategies_step(const std::vector<Entry>& evaluated, const EsState& state,
                                       std::span<const double> lower,
                                       std::span<const double> upper, Rng& rng) {
  if (!(state.sigma > 0.0)) throw config_error("evolution strategies sigma must be positive");
  if (state.epsilons.size() != evaluated.size()) {
    throw Error(ErrorKind::State, "recorded perturbations do not match the population");
  }
  if (std::none_of(evaluated.begin(), evaluated.end(),
                   [](const Entry& e) { return e.status == EvalStatus::Ok; })) {
    throw Error(ErrorKind::EvaluationFailed, "every individual failed");
  }
  const auto ranks = centered_ranks(weighted_fitness_of(evaluated));
  const std::size_t n = evaluated.size();
  EsStepResult result;
  result.state = state;
  auto& mean = result.state.mean;
  const double scale = state.learning_rate / (static_cast<double>(n) * state.sigma);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += ranks[j] * state.epsilons[j][i];
    mean[i] += scale * acc;
  }
  clamp_into(mean, lower, upper);
  es_sample(result.state, n, lower, upper, rng, result.population);
  return result;
}

EvolutionStrategiesOptimizer::EvolutionStrategiesOptimizer(EsParams params,
                                                           OptimizerContext context)
    : context_(std::move(context)) {
  state_.sigma = params.sigma;
  state_.learning_rate = params.learning_rate;
  state_.mirrored = params.mirrored;
}

std::vector<std::vector<double>> EvolutionStrategiesOptimizer::initial_population(
    const Optimizee& optimizee, Rng& rng) {
  state_.mean = optimizee.create_individual(rng).flatten();
  std::vector<std::vector<double>> population;
  es_sample(state_, context_.population_size, context_.bounds.flat_lower(),
            context_.bounds.flat_upper(), rng, population);
  return population;
}

std::vector<std::vector<double>> EvolutionStrategiesOptimizer::step(
    const std::vector<Entry>& evaluated, Rng& rng) {
  auto result = evolution_strategies_step(evaluated, state_, context_.bounds.flat_lower(),
                                          context_.bounds.flat_upper(), rng);
  state_ = std::move(result.state);
  return std::move(result.population);
}

}  // namespace twoloop::optimizers
