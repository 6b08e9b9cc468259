#include "twoloop/optimizers/annealing.hpp"

#include <cmath>

#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::optimizers {

SaParams SaParams::from_json(const Json& j, const std::string& pointer) {
  ParamReader r(j, pointer);
  SaParams p;
  p.initial_temperature = r.get("initial_temperature", p.initial_temperature);
  p.cooling_rate = r.get("cooling_rate", p.cooling_rate);
  p.step_fraction = r.get("step_fraction", p.step_fraction);
  r.finish();
  if (!(p.initial_temperature > 0.0)) {
    throw config_error("initial_temperature must be positive", r.pointer("initial_temperature"));
  }
  if (!(p.cooling_rate > 0.0 && p.cooling_rate <= 1.0)) {
    throw config_error("cooling_rate must lie in (0, 1]", r.pointer("cooling_rate"));
  }
  if (!(p.step_fraction > 0.0)) {
    throw config_error("step_fraction must be positive", r.pointer("step_fraction"));
  }
  return p;
}

Json SaParams::to_json() const {
  return Json{{"initial_temperature", initial_temperature},
              {"cooling_rate", cooling_rate},
              {"step_fraction", step_fraction}};
}

Json SaState::to_json() const {
  return Json{{"kind", "sa"},
              {"temperature", temperature},
              {"cooling_rate", cooling_rate},
              {"step_fraction", step_fraction},
              {"current", matrix_to_json(current)},
              {"current_fitness", current_fitness}};
}

SaState SaState::from_json(const Json& j) {
  SaState s;
  s.temperature = j.at("temperature").get<double>();
  s.cooling_rate = j.at("cooling_rate").get<double>();
  s.step_fraction = j.at("step_fraction").get<double>();
  s.current = matrix_from_json(j.at("current"));
  s.current_fitness = j.at("current_fitness").get<std::vector<double>>();
  return s;
}

bool metropolis_accept(double delta, double temperature, double u) {
  if (delta >= 0.0) return true;
  return u < std::exp(delta / temperature);
}

SaStepResult simulated_annealing_step(const std::vector<Entry>& evaluated, const SaState& state,
                                      std::span<const double> lower,
                                      std::span<const double> upper, Rng& rng) {
  if (!(state.temperature > 0.0)) throw config_error("temperature must be positive");
  if (!(state.cooling_rate > 0.0 && state.cooling_rate <= 1.0)) {
    throw config_error("cooling_rate must lie in (0, 1]");
  }
  const std::size_t n = evaluated.size();
  SaStepResult result;
  result.state = state;
  auto& s = result.state;
  const bool first = s.current.empty();
  if (first) {
    s.current.resize(n);
    s.current_fitness.assign(n, 0.0);
  } else if (s.current.size() != n) {
    throw Error(ErrorKind::State, "annealing chain count does not match the population");
  }

  std::vector<bool> has_current(n, !first);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = evaluated[i];
    const double u = rng.uniform();
    if (e.status != EvalStatus::Ok) continue;
    const bool accept =
        !has_current[i] || metropolis_accept(e.weighted_fitness - s.current_fitness[i],
                                             s.temperature, u);
    if (accept) {
      s.current[i] = e.individual.flatten();
      s.current_fitness[i] = e.weighted_fitness;
      has_current[i] = true;
      ++result.accepted;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    // A chain whose very first evaluation failed restarts from that point.
    if (!has_current[i]) {
      s.current[i] = evaluated[i].individual.flatten();
      s.current_fitness[i] = evaluated[i].weighted_fitness;
    }
  }

  s.temperature *= s.cooling_rate;
  result.population.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = s.current[i];
    for (std::size_t d = 0; d < x.size(); ++d) {
      x[d] += s.temperature * s.step_fraction * (upper[d] - lower[d]) * rng.normal();
    }
    clamp_into(x, lower, upper);
    result.population.push_back(std::move(x));
  }
  return result;
}

AnnealingOptimizer::AnnealingOptimizer(SaParams params, OptimizerContext context)
    : context_(std::move(context)) {
  state_.temperature = params.initial_temperature;
  state_.cooling_rate = params.cooling_rate;
  state_.step_fraction = params.step_fraction;
}

std::vector<std::vector<double>> AnnealingOptimizer::initial_population(const Optimizee& optimizee,
                                                                        Rng& rng) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < context_.population_size; ++i) {
    out.push_back(optimizee.create_individual(rng).flatten());
  }
  return out;
}

std::vector<std::vector<double>> AnnealingOptimizer::step(const std::vector<Entry>& evaluated,
                                                          Rng& rng) {
  auto result = simulated_annealing_step(evaluated, state_, context_.bounds.flat_lower(),
                                         context_.bounds.flat_upper(), rng);
  state_ = std::move(result.state);
  return std::move(result.population);
}

}  // namespace twoloop::optimizers
