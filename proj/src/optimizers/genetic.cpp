#include "twoloop/optimizers/genetic.hpp"

#include <algorithm>
#include <numeric>

#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::optimizers {

GaParams GaParams::from_json(const Json& j, const std::string& pointer) {
  ParamReader r(j, pointer);
  GaParams p;
  p.tournament_size = r.get("tournament_size", p.tournament_size);
  p.blend_alpha = r.get("blend_alpha", p.blend_alpha);
  p.crossover_probability = r.get("crossover_probability", p.crossover_probability);
  p.mutation_probability = r.get("mutation_probability", p.mutation_probability);
  p.gene_mutation_probability = r.get("gene_mutation_probability", p.gene_mutation_probability);
  p.mutation_sigma_fraction = r.get("mutation_sigma_fraction", p.mutation_sigma_fraction);
  p.hall_of_fame_size = r.get("hall_of_fame_size", p.hall_of_fame_size);
  p.elite_count = r.get("elite_count", p.hall_of_fame_size);
  r.finish();

  if (p.tournament_size < 1) {
    throw config_error("tournament_size must be at least 1", r.pointer("tournament_size"));
  }
  auto probability = [&](double v, const char* key) {
    if (!(v >= 0.0 && v <= 1.0)) throw config_error(std::string(key) + " must lie in [0, 1]", r.pointer(key));
  };
  probability(p.crossover_probability, "crossover_probability");
  probability(p.mutation_probability, "mutation_probability");
  probability(p.gene_mutation_probability, "gene_mutation_probability");
  if (p.blend_alpha < 0.0) throw config_error("blend_alpha must be >= 0", r.pointer("blend_alpha"));
  if (p.mutation_sigma_fraction < 0.0) {
    throw config_error("mutation_sigma_fraction must be >= 0", r.pointer("mutation_sigma_fraction"));
  }
  if (p.elite_count > p.hall_of_fame_size) {
    throw config_error("elite_count cannot exceed hall_of_fame_size", r.pointer("elite_count"));
  }
  return p;
}

Json GaParams::to_json() const {
  return Json{{"tournament_size", tournament_size},
              {"blend_alpha", blend_alpha},
              {"crossover_probability", crossover_probability},
              {"mutation_probability", mutation_probability},
              {"gene_mutation_probability", gene_mutation_probability},
              {"mutation_sigma_fraction", mutation_sigma_fraction},
              {"hall_of_fame_size", hall_of_fame_size},
              {"elite_count", elite_count}};
}

Json GaState::to_json() const {
  Json hof = Json::array();
  for (const auto& m : hall_of_fame) {
    hof.push_back(Json{{"params", m.params}, {"weighted_fitness", m.weighted_fitness}});
  }
  return Json{{"kind", "ga"}, {"hall_of_fame", std::move(hof)}, {"steps", steps}};
}

GaState GaState::from_json(const Json& j) {
  GaState s;
  for (const auto& m : j.at("hall_of_fame")) {
    s.hall_of_fame.push_back(
        {m.at("params").get<std::vector<double>>(), m.at("weighted_fitness").get<double>()});
  }
  s.steps = j.at("steps").get<std::size_t>();
  return s;
}

std::vector<HallOfFameMember> update_hall_of_fame(const std::vector<HallOfFameMember>& current,
                                                  const std::vector<Entry>& evaluated,
                                                  std::size_t capacity) {
  std::vector<HallOfFameMember> pool = current;
  for (const auto& e : evaluated) {
    if (e.status != EvalStatus::Ok) continue;
    auto flat = e.individual.flatten();
    const bool known = std::any_of(pool.begin(), pool.end(),
                                   [&](const HallOfFameMember& m) { return m.params == flat; });
    if (!known) pool.push_back({std::move(flat), e.weighted_fitness});
  }
  // Stable sort keeps incumbents ahead of equally fit newcomers.
  std::stable_sort(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
    return a.weighted_fitness > b.weighted_fitness;
  });
  if (pool.size() > capacity) pool.resize(capacity);
  return pool;
}

GaStepResult ga_step(const std::vector<Entry>& evaluated, const GaState& state,
                     const GaParams& params, std::span<const double> lower,
                     std::span<const double> upper, Rng& rng) {
  const std::size_t n = evaluated.size();
  if (n < 2) throw config_error("the genetic algorithm needs a population of at least 2");
  if (std::none_of(evaluated.begin(), evaluated.end(),
                   [](const Entry& e) { return e.status == EvalStatus::Ok; })) {
    throw Error(ErrorKind::EvaluationFailed, "every individual of the generation failed");
  }

  GaStepResult result;
  result.state.hall_of_fame = update_hall_of_fame(state.hall_of_fame, evaluated,
                                                  params.hall_of_fame_size);
  result.state.steps = state.steps + 1;

  const auto fitness = weighted_fitness_of(evaluated);
  const auto parents = flat_params_of(evaluated);

  // Tournament selection with replacement.
  auto& offspring = result.population;
  offspring.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t winner = rng.below(n);
    for (std::size_t t = 1; t < params.tournament_size; ++t) {
      const std::size_t c = rng.below(n);
      if (fitness[c] > fitness[winner] || (fitness[c] == fitness[winner] && c < winner)) winner = c;
    }
    offspring.push_back(parents[winner]);
  }

  // Blend crossover on consecutive pairs.
  for (std::size_t i = 0; i + 1 < n; i += 2) {
    if (rng.uniform() >= params.crossover_probability) continue;
    auto& a = offspring[i];
    auto& b = offspring[i + 1];
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double gamma = (1.0 + 2.0 * params.blend_alpha) * rng.uniform() - params.blend_alpha;
      const double x = a[d];
      const double y = b[d];
      a[d] = (1.0 - gamma) * x + gamma * y;
      b[d] = gamma * x + (1.0 - gamma) * y;
    }
  }

  // Gaussian mutation.
  for (auto& child : offspring) {
    if (rng.uniform() >= params.mutation_probability) continue;
    for (std::size_t d = 0; d < child.size(); ++d) {
      if (rng.uniform() < params.gene_mutation_probability) {
        child[d] += params.mutation_sigma_fraction * (upper[d] - lower[d]) * rng.normal();
      }
    }
  }

  // Elitism: hall-of-fame members take the slots of the worst parents.
  const auto order = rank_descending(fitness);
  const std::size_t elites = std::min({params.elite_count, result.state.hall_of_fame.size(), n});
  for (std::size_t e = 0; e < elites; ++e) {
    offspring[order[n - 1 - e]] = result.state.hall_of_fame[e].params;
  }

  for (auto& child : offspring) clamp_into(child, lower, upper);
  return result;
}

GeneticOptimizer::GeneticOptimizer(GaParams params, OptimizerContext context)
    : params_(params), context_(std::move(context)) {
  if (context_.population_size < 2) {
    throw config_error("the genetic algorithm needs a population of at least 2");
  }
}

std::vector<std::vector<double>> GeneticOptimizer::initial_population(const Optimizee& optimizee,
                                                                      Rng& rng) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < context_.population_size; ++i) {
    out.push_back(optimizee.create_individual(rng).flatten());
  }
  return out;
}

std::vector<std::vector<double>> GeneticOptimizer::step(const std::vector<Entry>& evaluated,
                                                        Rng& rng) {
  auto result = ga_step(evaluated, state_, params_, context_.bounds.flat_lower(),
                        context_.bounds.flat_upper(), rng);
  state_ = std::move(result.state);
  return std::move(result.population);
}

}  // namespace twoloop::optimizers
