#include "twoloop/optimizers/gradient.hpp"

#include <Eigen/Dense>

#include "twoloop/core/error.hpp"
#include "twoloop/core/log.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::optimizers {

GradientEstimate estimate_gradient(const std::vector<std::vector<double>>& points,
                                   std::span<const double> fitness) {
  if (points.empty()) throw config_error("gradient estimate needs at least one sample");
  if (points.size() != fitness.size()) {
    throw config_error("gradient estimate needs one fitness per sample");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  const auto d = static_cast<Eigen::Index>(points.front().size());
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(p.size()) != d) {
      throw config_error("gradient samples have inconsistent dimensions");
    }
    x.row(i) = Eigen::Map<const Eigen::RowVectorXd>(p.data(), d);
    y(i) = fitness[static_cast<std::size_t>(i)];
  }
  // Centering absorbs the intercept.
  x.rowwise() -= x.colwise().mean();
  y.array() -= y.mean();

  GradientEstimate out;
  out.gradient.assign(static_cast<std::size_t>(d), 0.0);
  if (x.cwiseAbs().maxCoeff() == 0.0) {
    out.degenerate = true;
    return out;
  }
  // Full rank: LDLT on the centered normal equations, exact on small
  // integer designs. Rank deficient: minimum-norm solution.
  const auto cod = x.completeOrthogonalDecomposition();
  Eigen::VectorXd g;
  if (cod.rank() == d) {
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(x.transpose() * x);
    g = ldlt.solve(x.transpose() * y);
    if (ldlt.info() != Eigen::Success || !g.allFinite()) g = cod.solve(y);
  } else {
    g = cod.solve(y);
  }
  for (Eigen::Index i = 0; i < d; ++i) out.gradient[static_cast<std::size_t>(i)] = g(i);
  return out;
}

std::vector<std::vector<double>> sample_around(const std::vector<double>& point, double radius,
                                               std::size_t count, std::span<const double> lower,
                                               std::span<const double> upper, Rng& rng) {
  std::vector<std::vector<double>> out;
  out.reserve(count);
  if (count == 0) return out;
  out.push_back(point);
  for (std::size_t i = 1; i < count; ++i) {
    auto p = point;
    for (auto& v : p) v += radius * rng.normal();
    clamp_into(p, lower, upper);
    out.push_back(std::move(p));
  }
  return out;
}

GdParams GdParams::from_json(const Json& j, const std::string& pointer) {
  ParamReader r(j, pointer);
  GdParams p;
  p.learning_rate = r.get("learning_rate", p.learning_rate);
  p.exploration_radius = r.get("exploration_radius", p.exploration_radius);
  r.finish();
  if (!(p.learning_rate > 0.0)) {
    throw config_error("learning_rate must be positive", r.pointer("learning_rate"));
  }
  if (!(p.exploration_radius > 0.0)) {
    throw config_error("exploration_radius must be positive", r.pointer("exploration_radius"));
  }
  return p;
}

Json GdParams::to_json() const {
  return Json{{"learning_rate", learning_rate}, {"exploration_radius", exploration_radius}};
}

Json GdState::to_json() const {
  return Json{{"kind", "gd"},
              {"point", point},
              {"learning_rate", learning_rate},
              {"exploration_radius", exploration_radius}};
}

GdState GdState::from_json(const Json& j) {
  GdState s;
  s.point = j.at("point").get<std::vector<double>>();
  s.learning_rate = j.at("learning_rate").get<double>();
  s.exploration_radius = j.at("exploration_radius").get<double>();
  return s;
}

GdStepResult gradient_step(const std::vector<Entry>& evaluated, const GdState& state,
                           std::size_t population_size, std::span<const double> lower,
                           std::span<const double> upper, Rng& rng) {
  std::vector<std::vector<double>> points;
  std::vector<double> fitness;
  for (const auto& e : evaluated) {
    if (e.status != EvalStatus::Ok) continue;
    points.push_back(e.individual.flatten());
    fitness.push_back(e.weighted_fitness);
  }
  if (points.empty()) throw Error(ErrorKind::EvaluationFailed, "every sample failed");

  GdStepResult result;
  result.state = state;
  const auto estimate = estimate_gradient(points, fitness);
  if (estimate.degenerate) {
    log_warning("gradient samples coincide; resampling around the current point");
  } else {
    for (std::size_t i = 0; i < result.state.point.size(); ++i) {
      result.state.point[i] += state.learning_rate * estimate.gradient[i];
    }
    clamp_into(result.state.point, lower, upper);
  }
  result.population = sample_around(result.state.point, state.exploration_radius,
                                    population_size, lower, upper, rng);
  return result;
}

GradientOptimizer::GradientOptimizer(GdParams params, OptimizerContext context)
    : context_(std::move(context)) {
  state_.learning_rate = params.learning_rate;
  state_.exploration_radius = params.exploration_radius;
}

std::vector<std::vector<double>> GradientOptimizer::initial_population(const Optimizee& optimizee,
                                                                       Rng& rng) {
  state_.point = optimizee.create_individual(rng).flatten();
  return sample_around(state_.point, state_.exploration_radius, context_.population_size,
                       context_.bounds.flat_lower(), context_.bounds.flat_upper(), rng);
}

std::vector<std::vector<double>> GradientOptimizer::step(const std::vector<Entry>& evaluated,
                                                         Rng& rng) {
  auto result = gradient_step(evaluated, state_, context_.population_size,
                              context_.bounds.flat_lower(), context_.bounds.flat_upper(), rng);
  state_ = std::move(result.state);
  return std::move(result.population);
}

}  // namespace twoloop::optimizers
