#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "support/enkf_oracle.hpp"
#include "twoloop/benchmarks/formulas.hpp"
#include "twoloop/benchmarks/optimizees.hpp"
#include "twoloop/core/engine.hpp"
#include "twoloop/core/error.hpp"
#include "twoloop/core/log.hpp"
#include "twoloop/optimizers/annealing.hpp"
#include "twoloop/optimizers/cross_entropy.hpp"
#include "twoloop/optimizers/enkf.hpp"
#include "twoloop/optimizers/evolution_strategies.hpp"
#include "twoloop/optimizers/genetic.hpp"
#include "twoloop/optimizers/gradient.hpp"
#include "twoloop/optimizers/grid.hpp"
#include "twoloop/optimizers/mga.hpp"

using namespace twoloop;
using namespace twoloop::optimizers;

namespace {

struct QuietLogs {
  QuietLogs() { set_log_sink({}); }
};

std::vector<Entry> entries_of(const std::vector<std::vector<double>>& points,
                              const std::function<double(const std::vector<double>&)>& f) {
  std::vector<Entry> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Entry e;
    e.individual.index = i;
    e.individual.params = {{"x", points[i]}};
    e.fitness = {f(points[i])};
    e.weighted_fitness = e.fitness[0];
    e.model_output = points[i];
    out.push_back(e);
  }
  return out;
}

double sphere(const std::vector<double>& x) { return benchmarks::negated_sphere(x); }

Eigen::MatrixXd to_matrix(const oracle::Mat& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m[0].size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[0].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
  }
  return out;
}

double max_abs_diff(const Eigen::MatrixXd& a, const oracle::Mat& b) {
  double worst = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b[0].size(); ++j) {
      worst = std::max(worst, std::abs(a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - b[i][j]));
    }
  }
  return worst;
}

}  // namespace

// ---------------------------------------------------------------- GA

TEST_CASE("ga without crossover or mutation only copies selected parents") {
  GaParams p;
  p.crossover_probability = 0.0;
  p.mutation_sigma_fraction = 0.0;
  const std::vector<double> lo{-5, -5}, hi{5, 5};
  Rng rng(3);
  std::vector<std::vector<double>> pop;
  for (int i = 0; i < 12; ++i) pop.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
  const auto evaluated = entries_of(pop, sphere);
  const auto result = ga_step(evaluated, GaState{}, p, lo, hi, rng);
  REQUIRE(result.population.size() == pop.size());
  const std::set<std::vector<double>> parents(pop.begin(), pop.end());
  for (const auto& child : result.population) CHECK(parents.count(child) == 1);
}

TEST_CASE("ga hall of fame tracks the best-so-far and never gets worse") {
  const std::vector<double> lo{-5, -5, -5}, hi{5, 5, 5};
  GaParams p;
  Rng init(8);
  std::vector<std::vector<double>> pop;
  for (int i = 0; i < 10; ++i) pop.push_back({init.uniform(-5, 5), init.uniform(-5, 5), init.uniform(-5, 5)});
  GaState state;
  double best_so_far = -1e300;
  double previous_hof = -1e300;
  Rng rng(9);
  // Rugged landscape with a strong mutation so that later generations can be
  // worse than earlier ones.
  p.mutation_probability = 0.9;
  p.mutation_sigma_fraction = 0.3;
  const auto rugged = [](const std::vector<double>& x) { return benchmarks::negated_rastrigin(x); };
  for (int g = 0; g < 40; ++g) {
    auto evaluated = entries_of(pop, rugged);
    for (const auto& e : evaluated) best_so_far = std::max(best_so_far, e.weighted_fitness);
    auto result = ga_step(evaluated, state, p, lo, hi, rng);
    state = result.state;
    pop = result.population;
    REQUIRE(!state.hall_of_fame.empty());
    CHECK(state.hall_of_fame.front().weighted_fitness == best_so_far);
    CHECK(state.hall_of_fame.front().weighted_fitness >= previous_hof);
    for (std::size_t i = 1; i < state.hall_of_fame.size(); ++i) {
      CHECK(state.hall_of_fame[i - 1].weighted_fitness >= state.hall_of_fame[i].weighted_fitness);
    }
    previous_hof = state.hall_of_fame.front().weighted_fitness;
  }
}

TEST_CASE("ga elitism reinjects the hall of fame") {
  const std::vector<double> lo{-5}, hi{5};
  GaParams p;
  p.hall_of_fame_size = 2;
  p.elite_count = 2;
  Rng rng(4);
  std::vector<std::vector<double>> pop{{4.0}, {0.1}, {-3.0}, {2.0}, {-0.2}, {1.0}};
  const auto result = ga_step(entries_of(pop, sphere), GaState{}, p, lo, hi, rng);
  const auto has = [&](double v) {
    return std::count(result.population.begin(), result.population.end(), std::vector{v}) >= 1;
  };
  CHECK(has(0.1));
  CHECK(has(-0.2));
}

TEST_CASE("ga step with no ok entry fails and leaves the state alone") {
  const std::vector<double> lo{-1}, hi{1};
  auto evaluated = entries_of({{0.5}, {0.2}}, sphere);
  for (auto& e : evaluated) e.status = EvalStatus::Failed;
  GaState state;
  state.hall_of_fame = {{{0.3}, -0.09}};
  state.steps = 4;
  const auto before = state.to_json();
  Rng rng(1);
  CHECK_THROWS_AS(ga_step(evaluated, state, GaParams{}, lo, hi, rng), Error);
  CHECK(state.to_json() == before);
}

TEST_CASE("ga accepts a population of 100 over 200 generations") {
  QuietLogs quiet;
  benchmarks::AnalyticOptimizee f("sphere", 2, -5.12, 5.12);
  auto opt = make_optimizer("ga", Json::object(), OptimizerContext{f.bounds(), 100, std::nullopt});
  SerialEvaluator ev(f, 5);
  RunSettings s;
  s.population_size = 100;
  s.generations = 200;
  s.seed = 5;
  const auto t = run_generation_loop(s, f, *opt, ev);
  REQUIRE(t.size() == 200);
  for (const auto& rec : t.records()) CHECK(rec.entries.size() == 100);
}

// ---------------------------------------------------------------- EnKF

TEST_CASE("enkf: zero innovation leaves the ensemble unchanged") {
  Rng rng(2);
  Eigen::MatrixXd u(3, 5);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 0.7);
  const Eigen::MatrixXd g = y.replicate(1, 5);
  CHECK((enkf_update(u, g, y, 0.5) - u).norm() == 0.0);
}

TEST_CASE("enkf: a huge gamma freezes the ensemble") {
  Rng rng(3);
  Eigen::MatrixXd u(4, 6), g(2, 6);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 1.0);
  const double innovation = ((-g).colwise() + y).norm();
  CHECK((enkf_update(u, g, y, 1e12) - u).norm() < 1e-6 * innovation);
}

TEST_CASE("enkf: scalar linear model against the covariance oracle") {
  const oracle::Mat ensemble{{0.0, 1.0, 2.0}};
  oracle::Mat outputs{{0.0, 2.0, 4.0}};
  const std::vector<double> target{2.0};
  const auto expected = oracle::enkf_update(ensemble, outputs, target, 0.5);
  const auto got = enkf_update(to_matrix(ensemble), to_matrix(outputs), Eigen::VectorXd::Constant(1, 2.0), 0.5);
  CHECK(max_abs_diff(got, expected) < 1e-12);
  // Hand check: C_ug = 2, C_gg = 4, gain = 2 / 4.5.
  CHECK(got(0, 0) == doctest::Approx(0.0 + 2.0 / 4.5 * 2.0).epsilon(1e-14));
  CHECK(got(0, 2) == doctest::Approx(2.0 + 2.0 / 4.5 * -2.0).epsilon(1e-14));
}

TEST_CASE("enkf: random instances match the covariance oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.below(5), k = 1 + rng.below(3), j = 2 + rng.below(7);
    oracle::Mat u(d, std::vector<double>(j)), g(k, std::vector<double>(j));
    for (auto& row : u) for (auto& v : row) v = rng.uniform(0, 1);
    for (auto& row : g) for (auto& v : row) v = rng.uniform(0, 1);
    std::vector<double> y(k);
    for (auto& v : y) v = rng.uniform(0, 1);
    const double gamma = rng.uniform(0.05, 2.0);
    Eigen::VectorXd ye(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) ye(static_cast<Eigen::Index>(i)) = y[i];
    const auto got = enkf_update(to_matrix(u), to_matrix(g), ye, gamma);
    CHECK(max_abs_diff(got, oracle::enkf_update(u, g, y, gamma)) < 1e-12);
  }
}

TEST_CASE("enkf: update commutes with a reordering of the members") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 3, k = 2, j = 7;
    Eigen::MatrixXd u(d, j), g(k, j);
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = rng.normal();
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
    const Eigen::VectorXd y = Eigen::VectorXd::Random(k);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(j));
    for (Eigen::Index i = 0; i < j; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    Eigen::MatrixXd up(d, j), gp(k, j);
    for (Eigen::Index c = 0; c < j; ++c) {
      up.col(c) = u.col(perm[static_cast<std::size_t>(c)]);
      gp.col(c) = g.col(perm[static_cast<std::size_t>(c)]);
    }
    const auto a = enkf_update(u, g, y, 0.5);
    const auto b = enkf_update(up, gp, y, 0.5);
    for (Eigen::Index c = 0; c < j; ++c) {
      CHECK((b.col(c) - a.col(perm[static_cast<std::size_t>(c)])).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("enkf: non-finite outputs are an evaluation error") {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(1, 3);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(1, 3);
  g(0, 1) = std::nan("");
  try {
    enkf_update(u, g, Eigen::VectorXd::Zero(1), 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EvaluationFailed);
  }
}

TEST_CASE("rank_replace examples") {
  Rng rng(1);
  std::vector<std::vector<double>> members;
  std::vector<double> fitness;
  for (int i = 0; i < 10; ++i) {
    members.push_back({static_cast<double>(i), 10.0 * i});
    fitness.push_back(static_cast<double>((i * 7) % 10));
  }
  SUBCASE("one replacement, no noise") {
    const auto out = rank_replace(members, fitness, 0.1, 0.0, rng);
    const auto best = static_cast<std::size_t>(std::max_element(fitness.begin(), fitness.end()) - fitness.begin());
    const auto worst = static_cast<std::size_t>(std::min_element(fitness.begin(), fitness.end()) - fitness.begin());
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(out[i] == (i == worst ? members[best] : members[i]));
    }
  }
  SUBCASE("floor rule gives no replacement") {
    CHECK(rank_replace(members, fitness, 0.05, 1.0, rng) == members);
  }
}

TEST_CASE("rank_replace replaces floor(0.1 * 98) = 9 members") {
  Rng rng(5);
  std::vector<std::vector<double>> members;
  std::vector<double> fitness;
  for (int i = 0; i < 98; ++i) {
    members.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
    fitness.push_back(rng.uniform(0, 1));
  }
  const auto out = rank_replace(members, fitness, 0.10, 0.01, rng);
  std::vector<std::size_t> order(98);
  for (std::size_t i = 0; i < 98; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return fitness[a] < fitness[b]; });
  const std::set<std::size_t> worst9(order.begin(), order.begin() + 9);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < 98; ++i) {
    if (out[i] != members[i]) {
      ++changed;
      CHECK(worst9.count(i) == 1);
    }
  }
  CHECK(changed == 9);
}

TEST_CASE("rank_replace without noise never lowers the minimum fitness") {
  Rng rng(21);
  const auto f = [](const std::vector<double>& x) { return std::sin(3 * x[0]) + x[1]; };
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<std::vector<double>> members;
    std::vector<double> fitness;
    for (std::size_t i = 0; i < n; ++i) {
      members.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});
      fitness.push_back(f(members.back()));
    }
    const double frac = rng.uniform(0.01, 0.5);
    const auto out = rank_replace(members, fitness, frac, 0.0, rng);
    double before = 1e300, after = 1e300;
    for (std::size_t i = 0; i < n; ++i) {
      before = std::min(before, fitness[i]);
      after = std::min(after, f(out[i]));
    }
    CHECK(after >= before);
  }
}

TEST_CASE("rank_replace rejects fractions outside (0, 0.5]") {
  Rng rng(1);
  const std::vector<std::vector<double>> m{{0}, {1}};
  const std::vector<double> f{0, 1};
  CHECK_THROWS_AS(rank_replace(m, f, 0.0, 0.0, rng), Error);
  CHECK_THROWS_AS(rank_replace(m, f, 0.6, 0.0, rng), Error);
}

// ---------------------------------------------------------------- gradient

TEST_CASE("gradient estimate examples") {
  const std::vector<std::vector<double>> pts{{-1.0}, {0.0}, {1.0}};
  const auto constant = estimate_gradient(pts, std::vector{2.5, 2.5, 2.5});
  CHECK(constant.gradient == std::vector{0.0});
  CHECK_FALSE(constant.degenerate);
  CHECK(estimate_gradient(pts, std::vector{-3.0, 0.0, 3.0}).gradient == std::vector{3.0});
  const auto same = estimate_gradient({{1.0, 2.0}, {1.0, 2.0}}, std::vector{0.0, 1.0});
  CHECK(same.degenerate);
  CHECK(same.gradient == std::vector{0.0, 0.0});
}

TEST_CASE("gradient estimate recovers exact linear coefficients") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.below(6);
    std::vector<double> coef(d);
    for (auto& c : coef) c = rng.uniform(-5, 5);
    const double intercept = rng.uniform(-10, 10);
    std::vector<std::vector<double>> pts;
    std::vector<double> f;
    for (std::size_t i = 0; i < d + 5; ++i) {
      std::vector<double> x(d);
      double v = intercept;
      for (std::size_t k = 0; k < d; ++k) {
        x[k] = rng.uniform(-1, 1);
        v += coef[k] * x[k];
      }
      pts.push_back(x);
      f.push_back(v);
    }
    const auto g = estimate_gradient(pts, f).gradient;
    for (std::size_t k = 0; k < d; ++k) CHECK(std::abs(g[k] - coef[k]) < 1e-9);
  }
}

TEST_CASE("gradient step on a constant landscape keeps the point") {
  QuietLogs quiet;
  const std::vector<double> lo{-5, -5}, hi{5, 5};
  GdState state;
  state.point = {1.0, -2.0};
  Rng rng(4);
  const auto pop = sample_around(state.point, 0.1, 8, lo, hi, rng);
  const auto result = gradient_step(entries_of(pop, [](const auto&) { return 4.0; }), state, 8, lo, hi, rng);
  CHECK(result.state.point == state.point);
  CHECK(result.population.size() == 8);
  CHECK(result.population.front() == state.point);
}

TEST_CASE("gradient step moves by learning_rate times the gradient") {
  const std::vector<double> lo{-5, -5}, hi{5, 5};
  GdState state;
  state.point = {0.5, 0.5};
  state.learning_rate = 0.01;
  Rng rng(6);
  const auto pop = sample_around(state.point, 0.1, 6, lo, hi, rng);
  const auto result =
      gradient_step(entries_of(pop, [](const auto& x) { return 2.0 * x[0] - 7.0 * x[1]; }), state, 6, lo, hi, rng);
  CHECK(result.state.point[0] == doctest::Approx(0.5 + 0.01 * 2.0).epsilon(1e-12));
  CHECK(result.state.point[1] == doctest::Approx(0.5 - 0.01 * 7.0).epsilon(1e-12));
}

TEST_CASE("gradient step with coinciding samples resamples around the point") {
  std::vector<std::string> warnings;
  set_log_sink([&](LogLevel, const std::string& m) { warnings.push_back(m); });
  const std::vector<double> lo{-5}, hi{5};
  GdState state;
  state.point = {1.0};
  Rng rng(1);
  const auto result = gradient_step(entries_of({{1.0}, {1.0}, {1.0}}, [](const auto&) { return 0.0; }), state, 5, lo, hi, rng);
  CHECK(result.state.point == state.point);
  CHECK(result.population.size() == 5);
  CHECK(warnings.size() == 1);
  set_log_sink({});
}

// ---------------------------------------------------------------- MGA

TEST_CASE("mga: a single-point batch recenters on that point") {
  const std::vector<double> lo{-10, -10}, hi{10, 10};
  const std::vector<FitnessBatch> batches{{{{1.5, -2.0}}, {0.3}}};
  const std::vector<ParameterRange> ranges{{{0.0, 0.0}, {4.0, 4.0}}};
  const auto out = mga_step(batches, ranges, MgaParams{}, lo, hi);
  REQUIRE(out.size() == 1);
  CHECK(out[0].center == std::vector{1.5, -2.0});
  CHECK(out[0].half_width == std::vector{2.0, 2.0});
}

TEST_CASE("mga: four batches of 1024 points give four independent ranges") {
  const std::vector<double> lo{-10, -10}, hi{10, 10};
  const std::vector<std::vector<double>> centers{{-5, -5}, {5, -5}, {-5, 5}, {5, 5}};
  std::vector<FitnessBatch> batches;
  std::vector<ParameterRange> ranges;
  for (const auto& c : centers) {
    ParameterRange r{c, {2.0, 2.0}};
    FitnessBatch b;
    b.points = expand_range(r, 32);
    REQUIRE(b.points.size() == 1024);
    for (const auto& p : b.points) b.fitness.push_back(-(p[0] * p[0] + p[1] * p[1]));
    batches.push_back(b);
    ranges.push_back(r);
  }
  const auto out = mga_step(batches, ranges, MgaParams{}, lo, hi);
  REQUIRE(out.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    // Each range stays in its own quadrant.
    CHECK(out[i].center[0] * centers[i][0] > 0.0);
    CHECK(out[i].center[1] * centers[i][1] > 0.0);
    // Re-running a batch alone gives the same range.
    const auto alone = mga_step({batches[i]}, {ranges[i]}, MgaParams{}, lo, hi);
    CHECK(alone[0].center == out[i].center);
    CHECK(alone[0].half_width == out[i].half_width);
  }
}

TEST_CASE("mga: batch on a 5x5 grid of a concave bowl moves toward the optimum") {
  const std::vector<double> lo{-10, -10}, hi{10, 10};
  const ParameterRange r{{3.0, -2.0}, {1.0, 1.0}};
  FitnessBatch b;
  b.points = expand_range(r, 5);
  for (const auto& p : b.points) b.fitness.push_back(-(p[0] * p[0] + p[1] * p[1]));
  const auto out = mga_step({b}, {r}, MgaParams{}, lo, hi);
  const auto dist = [](const std::vector<double>& p) { return std::hypot(p[0], p[1]); };
  CHECK(dist(out[0].center) < dist(r.center));
}

TEST_CASE("mga: expand_range is an endpoint-inclusive grid, first dimension slowest") {
  const auto pts = expand_range(ParameterRange{{0.0, 10.0}, {1.0, 2.0}}, 3);
  REQUIRE(pts.size() == 9);
  CHECK(pts[0] == std::vector{-1.0, 8.0});
  CHECK(pts[1] == std::vector{-1.0, 10.0});
  CHECK(pts[2] == std::vector{-1.0, 12.0});
  CHECK(pts[8] == std::vector{1.0, 12.0});
}

TEST_CASE("mga: empty batch is an error") {
  const std::vector<double> lo{0}, hi{1};
  CHECK_THROWS_AS(mga_step({FitnessBatch{}}, {ParameterRange{{0.5}, {0.1}}}, MgaParams{}, lo, hi), Error);
}

// ---------------------------------------------------------------- CE

TEST_CASE("ce: identical elites pin the mean and floor the sigma") {
  const std::vector<double> lo{-4, 0}, hi{4, 2};
  CeParams p;
  p.smoothing = 1.0;
  CeState state{{0.0, 0.0}, {1.0, 1.0}, 0.5};
  std::vector<std::vector<double>> pop(4, {1.25, 0.5});
  pop.push_back({3.0, 1.9});
  pop.push_back({-3.0, 0.1});
  Rng rng(1);
  // Elites are the four copies: fitness peaks at (1.25, 0.5).
  const auto result = cross_entropy_step(
      entries_of(pop, [](const auto& x) { return -std::abs(x[0] - 1.25) - std::abs(x[1] - 0.5); }), state, p, 6, lo,
      hi, rng);
  CHECK(result.state.mean == std::vector{1.25, 0.5});
  CHECK(result.state.sigma[0] == 1e-8 * 8.0);
  CHECK(result.state.sigma[1] == 1e-8 * 2.0);
}

TEST_CASE("ce: elite fraction 1 fits the sample moments of the whole population") {
  const std::vector<double> lo{-100}, hi{100};
  CeParams p;
  p.smoothing = 1.0;
  CeState state{{0.0}, {1.0}, 1.0};
  const std::vector<std::vector<double>> pop{{1.0}, {2.0}, {4.0}, {9.0}};
  Rng rng(1);
  const auto result = cross_entropy_step(entries_of(pop, sphere), state, p, 4, lo, hi, rng);
  CHECK(result.state.mean[0] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(result.state.sigma[0] == doctest::Approx(std::sqrt((9.0 + 4.0 + 0.0 + 25.0) / 4.0)).epsilon(1e-15));
}

TEST_CASE("ce: elites of a concave bowl pull the mean toward the optimum") {
  const std::vector<double> lo{-100}, hi{100};
  int closer = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const double old_mean = 2.0;
    std::vector<std::vector<double>> pop;
    for (int i = 0; i < 16; ++i) pop.push_back({old_mean + rng.normal()});
    CeState state{{old_mean}, {1.0}, 0.5};
    const auto result = cross_entropy_step(entries_of(pop, sphere), state, CeParams{}, 16, lo, hi, rng);
    if (std::abs(result.state.mean[0]) < std::abs(old_mean)) ++closer;
  }
  CHECK(closer == 100);
}

// ---------------------------------------------------------------- SA

TEST_CASE("sa: metropolis rule") {
  for (double u : {0.0, 0.5, 0.999999}) {
    CHECK(metropolis_accept(0.1, 1.0, u));
    CHECK(metropolis_accept(5.0, 1e-9, u));
    CHECK(metropolis_accept(0.0, 1.0, u));
  }
  CHECK_FALSE(metropolis_accept(-0.1, 1e-300, 1e-300));
  CHECK_FALSE(metropolis_accept(-1e-3, 1e-6, 0.0 + 1e-12));
}

TEST_CASE("sa: acceptance frequency matches exp(delta / T) within 3 sigma") {
  Rng rng(2025);
  const int n = 20000;
  for (const auto& [delta, temp] : std::vector<std::pair<double, double>>{{-0.5, 1.0}, {-1.0, 0.5}, {-0.1, 2.0}, {-3.0, 1.0}}) {
    const double p = std::exp(delta / temp);
    int accepted = 0;
    for (int i = 0; i < n; ++i) accepted += metropolis_accept(delta, temp, rng.uniform()) ? 1 : 0;
    CHECK(std::abs(accepted - n * p) <= 3.0 * std::sqrt(n * p * (1 - p)));
  }
}

TEST_CASE("sa: every proposal on a flat landscape is accepted") {
  const std::vector<double> lo{-1, -1}, hi{1, 1};
  Bounds bounds;
  bounds.add("x", 2, -1.0, 1.0);
  auto opt = make_optimizer("sa", Json::object(), OptimizerContext{bounds, 10, std::nullopt});
  benchmarks::AnalyticOptimizee dummy("sphere", 2, -1, 1);
  Rng rng(3);
  auto pop = opt->initial_population(dummy, rng);
  SaState state = SaState::from_json(opt->snapshot());
  std::size_t accepted = 0;
  for (int g = 0; g < 101; ++g) {
    const auto result = simulated_annealing_step(entries_of(pop, [](const auto&) { return 1.0; }), state, lo, hi, rng);
    if (g > 0) accepted += result.accepted;  // the first step only initializes the chains
    state = result.state;
    pop = result.population;
  }
  CHECK(accepted == 1000);
}

TEST_CASE("sa: temperature cools geometrically and improvements are kept") {
  const std::vector<double> lo{-5}, hi{5};
  SaState state;
  state.temperature = 2.0;
  state.cooling_rate = 0.5;
  state.current = {{3.0}};
  state.current_fitness = {-9.0};
  Rng rng(1);
  const auto result = simulated_annealing_step(entries_of({{1.0}}, sphere), state, lo, hi, rng);
  CHECK(result.accepted == 1);
  CHECK(result.state.current[0] == std::vector{1.0});
  CHECK(result.state.temperature == 1.0);
}

TEST_CASE("sa: cooling rate outside (0, 1] is a config error") {
  CHECK_THROWS_AS(SaParams::from_json(Json{{"cooling_rate", 0.0}}, "/sa"), Error);
  CHECK_THROWS_AS(SaParams::from_json(Json{{"cooling_rate", 1.5}}, "/sa"), Error);
  CHECK(SaParams::from_json(Json{{"cooling_rate", 1.0}}, "/sa").cooling_rate == 1.0);
}

// ---------------------------------------------------------------- grid

TEST_CASE("grid examples") {
  CHECK(axis_values({2.0, 9.0, 1}) == std::vector{2.0});
  const std::vector<GridAxis> axes{{0, 1, 3}, {0, 1, 2}};
  CHECK(grid_point_count(axes) == 6);
  const std::vector<std::vector<double>> expected{{0, 0}, {0, 1}, {0.5, 0}, {0.5, 1}, {1, 0}, {1, 1}};
  for (std::size_t n = 0; n < 6; ++n) CHECK(grid_point(axes, n) == expected[n]);
  CHECK(grid_point_count(std::vector<GridAxis>{{-1, 1, 20}, {-1, 1, 20}}) == 400);
}

TEST_CASE("grid refuses products above the cap and reports the count") {
  const std::vector<GridAxis> axes{{0, 1, 1000}, {0, 1, 1000}, {0, 1, 1000}};
  try {
    grid_point_count(axes);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    CHECK(std::string(e.what()).find("1000000000") != std::string::npos);
  }
  CHECK_THROWS_AS(grid_point_count(std::vector<GridAxis>{{0, 1, 11}}, 10), Error);
}

TEST_CASE("grid enumerates every point exactly once") {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<GridAxis> axes;
    std::size_t product = 1;
    for (std::size_t k = 0, n = 1 + rng.below(3); k < n; ++k) {
      axes.push_back({rng.uniform(-5, 0), rng.uniform(0.1, 5), 1 + rng.below(6)});
      product *= axes.back().resolution;
    }
    const std::size_t pop = 1 + rng.below(7);
    const auto plan = grid_search_plan(axes, pop);
    CHECK(plan.size() == (product + pop - 1) / pop);
    std::map<std::vector<double>, int> seen;
    std::size_t emitted = 0;
    for (const auto& gen : plan) {
      CHECK(gen.size() == pop);
      for (const auto& p : gen) {
        if (emitted++ < product) ++seen[p];
      }
    }
    CHECK(seen.size() == product);
    for (const auto& [p, c] : seen) CHECK(c == 1);
  }
}

// ---------------------------------------------------------------- ES

TEST_CASE("es: centered ranks") {
  CHECK(centered_ranks(std::vector{3.0, 3.0, 3.0}) == std::vector{0.0, 0.0, 0.0});
  CHECK(centered_ranks(std::vector{1.0, 3.0, 2.0}) == std::vector{-0.5, 0.5, 0.0});
  const auto r = centered_ranks(std::vector{5.0, 1.0, 5.0, 0.0});
  double sum = 0;
  for (double v : r) sum += v;
  CHECK(sum == 0.0);
  CHECK(r[0] == r[2]);
}

TEST_CASE("es: equal fitness leaves the mean unchanged") {
  const std::vector<double> lo{-10, -10}, hi{10, 10};
  EsState state;
  state.mean = {1.0, 2.0};
  Rng rng(4);
  std::vector<std::vector<double>> pop;
  es_sample(state, 8, lo, hi, rng, pop);
  const auto result = evolution_strategies_step(entries_of(pop, [](const auto&) { return 0.0; }), state, lo, hi, rng);
  CHECK(result.state.mean == state.mean);
}

TEST_CASE("es: a linear slope moves the mean uphill") {
  const std::vector<double> lo{-10}, hi{10};
  EsState state;
  state.mean = {0.0};
  state.sigma = 1.0;
  state.learning_rate = 0.1;
  state.epsilons = {{-1.0}, {1.0}};
  Rng rng(1);
  const auto result =
      evolution_strategies_step(entries_of({{-1.0}, {1.0}}, [](const auto& x) { return x[0]; }), state, lo, hi, rng);
  CHECK(result.state.mean[0] > 0.0);
  CHECK(result.state.mean[0] == doctest::Approx(0.1 / 2.0 * (0.5 * 1.0 + -0.5 * -1.0)));
}

TEST_CASE("es: converges on a quadratic bowl from 3.0") {
  const std::vector<double> lo{-10, -10}, hi{10, 10};
  EsState state;
  state.mean = {3.0, 3.0};
  state.sigma = 0.1;
  state.learning_rate = 0.05;
  Rng rng(123);
  std::vector<std::vector<double>> pop;
  es_sample(state, 16, lo, hi, rng, pop);
  for (int g = 0; g < 200; ++g) {
    auto result = evolution_strategies_step(entries_of(pop, sphere), state, lo, hi, rng);
    state = result.state;
    pop = result.population;
  }
  CHECK(std::hypot(state.mean[0], state.mean[1]) < 0.1);
}

// ---------------------------------------------------------------- shared properties

TEST_CASE("every optimizer keeps the population size and round-trips its state") {
  QuietLogs quiet;
  Bounds bounds;
  bounds.add("x", 2, -3.0, 3.0);
  const benchmarks::AnalyticOptimizee dummy("sphere", 2, -3, 3);
  const std::map<std::string, Json> blocks{
      {"ga", Json::object()},
      {"enkf", Json::object()},
      {"gd", Json::object()},
      {"mga", Json{{"resolution", 2}}},
      {"ce", Json::object()},
      {"sa", Json::object()},
      {"grid", Json{{"resolution", 5}}},
      {"es", Json::object()},
  };
  for (const auto& id : optimizer_ids()) {
    CAPTURE(id);
    REQUIRE(blocks.count(id) == 1);
    const OptimizerContext ctx{bounds, 8, std::vector<double>{0.0, 0.0}};
    auto a = make_optimizer(id, blocks.at(id), ctx);
    Rng rng(derive_seed(1, 0, Stream::Init));
    auto pop = a->initial_population(dummy, rng);
    CHECK(pop.size() == 8);
    for (int g = 0; g < 3; ++g) {
      Rng step_rng(derive_seed(1, g, Stream::Optimizer));
      pop = a->step(entries_of(pop, sphere), step_rng);
      CHECK(pop.size() == 8);
      for (const auto& x : pop) CHECK(x.size() == 2);
    }
    const Json snap = a->snapshot();
    auto b = make_optimizer(id, blocks.at(id), ctx);
    b->restore(Json::parse(snap.dump()));
    CHECK(b->snapshot() == snap);
    Rng ra(99), rb(99);
    const auto evaluated = entries_of(pop, sphere);
    CHECK(a->step(evaluated, ra) == b->step(evaluated, rb));
    CHECK(a->snapshot() == b->snapshot());
  }
}

TEST_CASE("optimizer factory rejects unknown ids and unknown keys") {
  Bounds bounds;
  bounds.add("x", -1.0, 1.0);
  const OptimizerContext ctx{bounds, 4, std::nullopt};
  CHECK_THROWS_AS(make_optimizer("nope", Json::object(), ctx), Error);
  CHECK_THROWS_AS(make_optimizer("ga", Json{{"tournament", 3}}, ctx), Error);
  CHECK_THROWS_AS(make_optimizer("es", Json{{"sigma", 0.0}}, ctx), Error);
  CHECK_THROWS_AS(make_optimizer("enkf", Json::object(), ctx), Error);
}
