#include "twoloop/optimizers/optimizer.hpp"

#include <algorithm>
#include <numeric>

#include "twoloop/core/error.hpp"
#include "twoloop/optimizers/annealing.hpp"
#include "twoloop/optimizers/cross_entropy.hpp"
#include "twoloop/optimizers/enkf.hpp"
#include "twoloop/optimizers/evolution_strategies.hpp"
#include "twoloop/optimizers/genetic.hpp"
#include "twoloop/optimizers/gradient.hpp"
#include "twoloop/optimizers/grid.hpp"
#include "twoloop/optimizers/mga.hpp"

namespace twoloop::optimizers {

const std::vector<std::string>& optimizer_ids() {
  static const std::vector<std::string> ids{"ga", "enkf", "gd", "mga", "ce", "sa", "grid", "es"};
  return ids;
}

namespace {

[[noreturn]] void unknown_optimizer(const std::string& id, const std::string& pointer) {
  std::string known;
  for (const auto& k : optimizer_ids()) known += (known.empty() ? "" : ", ") + k;
  throw config_error("unknown optimizer '" + id + "' (known: " + known + ")", pointer);
}

}  // namespace

std::unique_ptr<Optimizer> make_optimizer(const std::string& id, const Json& params,
                                          const OptimizerContext& context,
                                          const std::string& pointer) {
  if (id == "ga") return std::make_unique<GeneticOptimizer>(GaParams::from_json(params, pointer), context);
  if (id == "enkf") return std::make_unique<EnkfOptimizer>(EnkfParams::from_json(params, pointer), context);
  if (id == "gd") return std::make_unique<GradientOptimizer>(GdParams::from_json(params, pointer), context);
  if (id == "mga") return std::make_unique<MgaOptimizer>(MgaParams::from_json(params, pointer), context);
  if (id == "ce") return std::make_unique<CrossEntropyOptimizer>(CeParams::from_json(params, pointer), context);
  if (id == "sa") return std::make_unique<AnnealingOptimizer>(SaParams::from_json(params, pointer), context);
  if (id == "es") {
    return std::make_unique<EvolutionStrategiesOptimizer>(EsParams::from_json(params, pointer), context);
  }
  if (id == "grid") {
    return std::make_unique<GridSearchOptimizer>(GridParams::from_json(params, context.bounds, pointer),
                                                 context);
  }
  unknown_optimizer(id, pointer);
}

Json normalized_optimizer_params(const std::string& id, const Json& params,
                                 const std::string& pointer) {
  if (id == "ga") return GaParams::from_json(params, pointer).to_json();
  if (id == "enkf") return EnkfParams::from_json(params, pointer).to_json();
  if (id == "gd") return GdParams::from_json(params, pointer).to_json();
  if (id == "mga") return MgaParams::from_json(params, pointer).to_json();
  if (id == "ce") return CeParams::from_json(params, pointer).to_json();
  if (id == "sa") return SaParams::from_json(params, pointer).to_json();
  if (id == "es") return EsParams::from_json(params, pointer).to_json();
  if (id == "grid") {
    // Resolution names are checked against the optimizee bounds when the
    // optimizer is built; here only the block shape is normalized.
    Json out = params.is_object() ? params : Json::object();
    if (!out.contains("resolution")) out["resolution"] = 10;
    if (!out.contains("max_points")) out["max_points"] = kDefaultGridCap;
    return Json{{"resolution", out["resolution"]}, {"max_points", out["max_points"]}};
  }
  unknown_optimizer(id, pointer);
}

std::vector<std::size_t> rank_descending(std::span<const double> fitness) {
  std::vector<std::size_t> order(fitness.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fitness[a] > fitness[b]; });
  return order;
}

std::vector<double> weighted_fitness_of(const std::vector<Entry>& entries) {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.weighted_fitness);
  return out;
}

std::vector<std::vector<double>> flat_params_of(const std::vector<Entry>& entries) {
  std::vector<std::vector<double>> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.individual.flatten());
  return out;
}

void clamp_into(std::vector<double>& x, std::span<const double> lower,
                std::span<const double> upper) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
}

Json matrix_to_json(const std::vector<std::vector<double>>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) out.push_back(r);
  return out;
}

std::vector<std::vector<double>> matrix_from_json(const Json& j) {
  std::vector<std::vector<double>> out;
  for (const auto& r : j) out.push_back(r.get<std::vector<double>>());
  return out;
}

}  // namespace twoloop::optimizers
