#include "twoloop/optimizers/enkf.hpp"

#include <algorithm>
#include <cmath>

#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::optimizers {

Eigen::MatrixXd enkf_update(const Eigen::MatrixXd& ensemble, const Eigen::MatrixXd& outputs,
                            const Eigen::VectorXd& target, double gamma) {
  const Eigen::Index members = ensemble.cols();
  if (members < 2) throw config_error("ensemble Kalman inversion needs at least 2 members");
  if (outputs.cols() != members) {
    throw config_error("model outputs have " + std::to_string(outputs.cols()) +
                       " columns, ensemble has " + std::to_string(members));
  }
  if (outputs.rows() != target.size()) {
    throw config_error("model outputs have " + std::to_string(outputs.rows()) +
                       " rows, target has " + std::to_string(target.size()));
  }
  if (!(gamma > 0.0)) throw config_error("gamma must be positive");
  if (!outputs.allFinite() || !target.allFinite()) {
    throw Error(ErrorKind::EvaluationFailed, "non-finite model output in ensemble update");
  }

  const Eigen::VectorXd u_mean = ensemble.rowwise().mean();
  const Eigen::VectorXd g_mean = outputs.rowwise().mean();
  const Eigen::MatrixXd du = ensemble.colwise() - u_mean;
  const Eigen::MatrixXd dg = outputs.colwise() - g_mean;
  const double norm = 1.0 / static_cast<double>(members - 1);

  const Eigen::MatrixXd c_ug = norm * du * dg.transpose();
  Eigen::MatrixXd c_gg = norm * dg * dg.transpose();
  c_gg.diagonal().array() += gamma;

  const Eigen::MatrixXd innovation = (-outputs).colwise() + target;
  const Eigen::MatrixXd gain_times_innovation = c_ug * c_gg.llt().solve(innovation);
  return ensemble + gain_times_innovation;
}

std::vector<std::vector<double>> rank_replace(const std::vector<std::vector<double>>& members,
                                              std::span<const double> fitness, double fraction,
                                              double noise_sigma, Rng& rng) {
  if (!(fraction > 0.0 && fraction <= 0.5)) {
    throw config_error("replace fraction must lie in (0, 0.5]");
  }
  if (fitness.size() != members.size()) {
    throw config_error("rank_replace needs one fitness per member");
  }
  auto out = members;
  const auto count =
      static_cast<std::size_t>(std::floor(fraction * static_cast<double>(members.size())));
  if (count == 0) return out;
  const auto order = rank_descending(fitness);
  const std::size_t n = members.size();
  for (std::size_t r = 0; r < count; ++r) {
    auto copy = members[order[r]];
    for (auto& v : copy) v += noise_sigma * rng.normal();
    out[order[n - 1 - r]] = std::move(copy);
  }
  return out;
}

EnkfParams EnkfParams::from_json(const Json& j, const std::string& pointer) {
  ParamReader r(j, pointer);
  EnkfParams p;
  p.gamma = r.get("gamma", p.gamma);
  p.replace_fraction = r.get("replace_fraction", p.replace_fraction);
  p.noise_sigma = r.get("noise_sigma", p.noise_sigma);
  r.finish();
  if (!(p.gamma > 0.0)) throw config_error("gamma must be positive", r.pointer("gamma"));
  if (!(p.replace_fraction > 0.0 && p.replace_fraction <= 0.5)) {
    throw config_error("replace_fraction must lie in (0, 0.5]", r.pointer("replace_fraction"));
  }
  if (p.noise_sigma < 0.0) throw config_error("noise_sigma must be >= 0", r.pointer("noise_sigma"));
  return p;
}

Json EnkfParams::to_json() const {
  return Json{{"gamma", gamma}, {"replace_fraction", replace_fraction}, {"noise_sigma", noise_sigma}};
}

EnkfOptimizer::EnkfOptimizer(EnkfParams params, OptimizerContext context)
    : params_(params),
      context_(std::move(context)),
      lower_(context_.bounds.flat_lower()),
      upper_(context_.bounds.flat_upper()) {
  if (!context_.target) {
    throw config_error("the enkf optimizer needs an optimizee with an observation target");
  }
  if (context_.population_size < 2) throw config_error("enkf needs an ensemble of at least 2");
}

std::vector<double> EnkfOptimizer::normalize(std::span<const double> x) const {
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double range = upper_[i] - lower_[i];
    u[i] = range > 0.0 ? (x[i] - lower_[i]) / range : 0.0;
  }
  return u;
}

std::vector<double> EnkfOptimizer::denormalize(std::span<const double> u) const {
  std::vector<double> x(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) x[i] = lower_[i] + u[i] * (upper_[i] - lower_[i]);
  return x;
}

std::vector<std::vector<double>> EnkfOptimizer::initial_population(const Optimizee& optimizee,
                                                                   Rng& rng) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < context_.population_size; ++i) {
    out.push_back(optimizee.create_individual(rng).flatten());
  }
  return out;
}

std::vector<std::vector<double>> EnkfOptimizer::step(const std::vector<Entry>& evaluated,
                                                     Rng& rng) {
  const std::size_t members = evaluated.size();
  const auto& target = *context_.target;
  std::vector<std::vector<double>> normalized;
  normalized.reserve(members);
  std::vector<std::size_t> ok;
  for (std::size_t j = 0; j < members; ++j) {
    normalized.push_back(normalize(evaluated[j].individual.flatten()));
    if (evaluated[j].status == EvalStatus::Ok) {
      if (evaluated[j].model_output.size() != target.size()) {
        throw Error(ErrorKind::EvaluationFailed,
                    "individual " + std::to_string(j) + " returned " +
                        std::to_string(evaluated[j].model_output.size()) +
                        " model outputs, target has " + std::to_string(target.size()));
      }
      ok.push_back(j);
    }
  }
  if (ok.empty()) throw Error(ErrorKind::EvaluationFailed, "every ensemble member failed");

  // Failed members keep their position; rank_replace discards them first.
  if (ok.size() >= 2) {
    const Eigen::Index d = static_cast<Eigen::Index>(normalized.front().size());
    const Eigen::Index k = static_cast<Eigen::Index>(target.size());
    const Eigen::Index j_ok = static_cast<Eigen::Index>(ok.size());
    Eigen::MatrixXd u(d, j_ok);
    Eigen::MatrixXd g(k, j_ok);
    for (Eigen::Index c = 0; c < j_ok; ++c) {
      const auto idx = ok[static_cast<std::size_t>(c)];
      u.col(c) = Eigen::Map<const Eigen::VectorXd>(normalized[idx].data(), d);
      g.col(c) = Eigen::Map<const Eigen::VectorXd>(evaluated[idx].model_output.data(), k);
    }
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(target.data(), k);
    const Eigen::MatrixXd updated = enkf_update(u, g, y, params_.gamma);
    for (Eigen::Index c = 0; c < j_ok; ++c) {
      auto& col = normalized[ok[static_cast<std::size_t>(c)]];
      for (Eigen::Index i = 0; i < d; ++i) col[static_cast<std::size_t>(i)] = updated(i, c);
    }
  }

  ensemble_ = rank_replace(normalized, weighted_fitness_of(evaluated), params_.replace_fraction,
                           params_.noise_sigma, rng);
  ++steps_;
  std::vector<std::vector<double>> next;
  next.reserve(members);
  for (auto& member : ensemble_) {
    for (auto& v : member) v = std::clamp(v, 0.0, 1.0);
    next.push_back(denormalize(member));
  }
  return next;
}

Json EnkfOptimizer::snapshot() const {
  return Json{{"kind", "enkf"},
              {"gamma", params_.gamma},
              {"replace_fraction", params_.replace_fraction},
              {"noise_sigma", params_.noise_sigma},
              {"steps", steps_},
              {"ensemble", matrix_to_json(ensemble_)}};
}

void EnkfOptimizer::restore(const Json& snapshot) {
  params_.gamma = snapshot.at("gamma").get<double>();
  params_.replace_fraction = snapshot.at("replace_fraction").get<double>();
  params_.noise_sigma = snapshot.at("noise_sigma").get<double>();
  steps_ = snapshot.at("steps").get<std::size_t>();
  ensemble_ = matrix_from_json(snapshot.at("ensemble"));
}

}  // namespace twoloop::optimizers
