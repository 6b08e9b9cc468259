// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Every run uses a fixed seed; thresholds are checked as stated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/enkf_oracle.hpp"
#include "support/test_support.hpp"
#include "twoloop/app/commands.hpp"
#include "twoloop/app/config.hpp"
#include "twoloop/benchmarks/classifier.hpp"
#include "twoloop/benchmarks/formulas.hpp"
#include "twoloop/benchmarks/network.hpp"
#include "twoloop/benchmarks/optimizees.hpp"
#include "twoloop/core/engine.hpp"
#include "twoloop/core/log.hpp"
#include "twoloop/core/rng.hpp"
#include "twoloop/core/trajectory_io.hpp"
#include "twoloop/optimizers/enkf.hpp"
#include "twoloop/runner/csv_protocol.hpp"
#include "twoloop/runner/external.hpp"
#include "twoloop/runner/runner.hpp"

using namespace twoloop;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  /// Records a failed check; the first failure's message leads the detail.
  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail.clear();
    pass = false;
    detail += (detail.empty() ? "" : "; ") + what;
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct RunResult {
  app::RunReport report;
  std::vector<app::ExportRow> rows;
  Trajectory trajectory{"", 0};
  fs::path dir;
  double seconds = 0.0;
};

Json config(const fs::path& root, const std::string& name, const std::string& optimizee,
            const std::string& optimizer, std::size_t population, std::size_t generations,
            std::uint64_t seed) {
  return Json{{"version", 1},           {"run_name", name},
              {"results_root", root.string()}, {"optimizee", optimizee},
              {"optimizer", optimizer}, {"population_size", population},
              {"generations", generations},    {"seed", seed}};
}

Trajectory load(const fs::path& dir) {
  Trajectory t("", 0);
  for (auto& rec : read_trajectory_records(dir / kTrajectoryFile)) t.append(std::move(rec));
  return t;
}

RunResult run(const Json& j, const app::Overrides& overrides = {}) {
  const std::string text = j.dump(2);
  RunResult r;
  const auto t0 = Clock::now();
  r.report = app::run_config(app::parse_config(text, "acceptance"), text, "acceptance", overrides);
  r.seconds = seconds_since(t0);
  r.dir = fs::path(j.at("results_root").get<std::string>()) / j.at("run_name").get<std::string>();
  r.trajectory = load(r.dir);
  r.rows = app::export_rows(r.trajectory);
  return r;
}

double best_of(const RunResult& r) { return r.report.summary.at("best_fitness").get<double>(); }

// ---------------------------------------------------------------- 1

Verdict mountain_car(const fs::path& root) {
  Verdict v;
  Json j = config(root, "mountain_car", "mountain_car", "ga", 32, 400, 1);
  j["max_parallel"] = 4;
  const auto r = run(j);
  const double best = best_of(r);
  std::size_t first = r.rows.size();
  for (std::size_t g = 0; g < r.rows.size(); ++g) {
    if (r.rows[g].best_so_far >= 0.45) {
      first = g;
      break;
    }
  }
  v.require(best >= 0.45, "best fitness " + fmt(best) + " < 0.45");
  v.require(r.seconds < 300.0, "runtime " + fmt(r.seconds) + " s >= 300 s");
  v.note("best " + fmt(best) + " (0.45 first reached at generation " + std::to_string(first) +
         "), " + fmt(r.seconds, 3) + " s");
  return v;
}

// ---------------------------------------------------------------- 2

Verdict enkf_classifier(const fs::path& root) {
  Verdict v;
  Json j = config(root, "enkf_classifier", "classifier", "enkf", 32, 100, 1);
  j["enkf"] = Json{{"gamma", 0.5}, {"replace_fraction", 0.1}};
  const auto r = run(j);
  const double best = best_of(r);
  v.require(r.rows.size() == 100, "expected 100 generations");
  const double first = r.rows.front().mean_fitness, last = r.rows.back().mean_fitness;
  v.require(best >= 0.9, "best fitness " + fmt(best) + " < 0.9");
  v.require(last > first, "mean fitness did not increase: " + fmt(first) + " -> " + fmt(last));
  v.require(r.seconds < 120.0, "runtime " + fmt(r.seconds) + " s >= 120 s");
  v.note("best " + fmt(best, 10) + ", mean " + fmt(first) + " -> " + fmt(last, 10) + ", " +
         fmt(r.seconds, 3) + " s");
  return v;
}

// ---------------------------------------------------------------- 3 and 4

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = rng.normal();
  }
  return m;
}

Verdict enkf_zero_innovation(const fs::path&) {
  Verdict v;
  Rng rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = static_cast<Eigen::Index>(1 + rng.below(5));
    const auto k = static_cast<Eigen::Index>(1 + rng.below(3));
    const auto jn = static_cast<Eigen::Index>(2 + rng.below(7));
    const Eigen::MatrixXd u = random_matrix(rng, d, jn);
    const Eigen::VectorXd y = random_matrix(rng, k, 1).col(0);
    const Eigen::MatrixXd g = y.replicate(1, jn);
    const double norm = (optimizers::enkf_update(u, g, y, 0.5) - u).norm();
    worst = std::max(worst, norm);
  }
  v.require(worst < 1e-12, "update norm " + fmt(worst) + " >= 1e-12");
  v.note("max update norm " + fmt(worst) + " over 20 ensembles");
  return v;
}

Verdict enkf_oracle_equivalence(const fs::path&) {
  Verdict v;
  Rng rng(4);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 1 + rng.below(5), k = 1 + rng.below(3), jn = 2 + rng.below(7);
    const double gamma = rng.uniform(0.05, 2.0);
    const Eigen::MatrixXd u = random_matrix(rng, static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(jn));
    const Eigen::MatrixXd g = random_matrix(rng, static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(jn));
    const Eigen::VectorXd y = random_matrix(rng, static_cast<Eigen::Index>(k), 1).col(0);
    oracle::Mat ou(d, std::vector<double>(jn)), og(k, std::vector<double>(jn));
    std::vector<double> oy(k);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t m = 0; m < jn; ++m) ou[i][m] = u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
    }
    for (std::size_t i = 0; i < k; ++i) {
      oy[i] = y(static_cast<Eigen::Index>(i));
      for (std::size_t m = 0; m < jn; ++m) og[i][m] = g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m));
    }
    const auto expected = oracle::enkf_update(ou, og, oy, gamma);
    const Eigen::MatrixXd got = optimizers::enkf_update(u, g, y, gamma);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t m = 0; m < jn; ++m) {
        worst = std::max(worst, std::abs(got(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) - expected[i][m]));
      }
    }
  }
  v.require(worst <= 1e-12, "max deviation " + fmt(worst) + " > 1e-12");
  v.note("max deviation " + fmt(worst) + " over 10 instances");
  return v;
}

// ---------------------------------------------------------------- 5

Verdict mga_fc_match(const fs::path& root) {
  Verdict v;
  const auto t0 = Clock::now();
  const benchmarks::FcMatchOptimizee net(benchmarks::FcMatchSettings{});
  const auto& e = net.bounds().entries();
  double grid_max = -INFINITY;
  for (int a = 0; a < 16; ++a) {
    const double g = e[0].lower[0] + (e[0].upper[0] - e[0].lower[0]) * a / 15.0;
    for (int b = 0; b < 16; ++b) {
      const double speed = e[1].lower[0] + (e[1].upper[0] - e[1].lower[0]) * b / 15.0;
      grid_max = std::max(grid_max, net.fitness_at(g, speed));
    }
  }
  const double grid_seconds = seconds_since(t0);

  Json j = config(root, "mga_fc_match", "fc_match", "mga", 256, 30, 1);
  j["mga"] = Json{{"resolution", 16}};
  const auto r = run(j);
  const double best = best_of(r);
  bool monotone = true;
  for (std::size_t g = 1; g < r.rows.size(); ++g) monotone = monotone && r.rows[g].best_fitness >= r.rows[g - 1].best_fitness;
  v.require(r.rows.size() <= 30, "more than 30 generations");
  v.require(best >= grid_max - 1e-3, "MGA best " + fmt(best, 10) + " below grid max " + fmt(grid_max, 10) + " - 1e-3");
  v.require(monotone, "per-generation best fitness decreased");
  v.require(r.seconds + grid_seconds < 180.0, "runtime " + fmt(r.seconds + grid_seconds) + " s >= 180 s");
  v.note("MGA best " + fmt(best, 10) + ", 16x16 grid max " + fmt(grid_max, 10) + ", " +
         std::to_string(r.rows.size()) + " generations, " + fmt(r.seconds + grid_seconds, 3) + " s");
  return v;
}

// ---------------------------------------------------------------- 6

Verdict trace_fit(const fs::path& root) {
  Verdict v;
  const auto r = run(config(root, "trace_fit", "trace_fit", "ga", 100, 10, 1));
  const double loss = std::abs(best_of(r));
  v.require(r.rows.size() <= 10, "more than 10 generations");
  v.require(loss <= 0.007, "|loss| " + fmt(loss) + " > 0.007");
  v.require(r.seconds < 60.0, "runtime " + fmt(r.seconds) + " s >= 60 s");
  v.note("|loss| " + fmt(loss) + " after " + std::to_string(r.rows.size()) + " generations, " +
         fmt(r.seconds, 3) + " s");
  return v;
}

// ---------------------------------------------------------------- 7

std::vector<double> softmax_oracle(const std::vector<double>& x) {
  long double sum = 0;
  for (double xi : x) sum += std::exp(static_cast<long double>(xi));
  std::vector<double> out;
  for (double xi : x) out.push_back(static_cast<double>(std::exp(static_cast<long double>(xi)) / sum));
  return out;
}

double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx) / std::sqrt(syy);
}

Verdict formula_oracles(const fs::path&) {
  Verdict v;
  Rng rng(7);
  double dev_softmax = 0, dev_mse = 0, dev_fc = 0, dev_colony = 0, dev_sp = 0, dev_micro = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(1 + rng.below(10));
    for (auto& xi : x) xi = rng.uniform(-20, 20);
    const auto p = benchmarks::softmax(x), q = softmax_oracle(x);
    for (std::size_t i = 0; i < x.size(); ++i) dev_softmax = std::max(dev_softmax, std::abs(p[i] - q[i]));

    const std::size_t n = 1 + rng.below(30), c = 2 + rng.below(4);
    std::vector<std::vector<double>> pred(n), labels(n, std::vector<double>(c, 0.0));
    double loss = 0;
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<double> logits(c);
      for (auto& l : logits) l = rng.normal();
      pred[s] = softmax_oracle(logits);
      labels[s][rng.below(c)] = 1.0;
      for (std::size_t k = 0; k < c; ++k) loss += (labels[s][k] - pred[s][k]) * (labels[s][k] - pred[s][k]);
    }
    dev_mse = std::max(dev_mse, std::abs(benchmarks::mse_fitness(pred, labels) - (1.0 - loss / static_cast<double>(n))));

    const std::size_t m = 3 + rng.below(4), t = 50 + rng.below(100);
    benchmarks::Matrix act(m, std::vector<double>(t)), sc(m, std::vector<double>(m, 0.0));
    for (auto& row : act) for (auto& a : row) a = rng.normal();
    double max_sc = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        sc[i][k] = sc[k][i] = rng.uniform(0, 5);
        max_sc = std::max(max_sc, sc[i][k]);
      }
    }
    std::vector<double> fc_flat, sc_flat;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        fc_flat.push_back(pearson_oracle(act[i], act[k]));
        sc_flat.push_back(sc[i][k] / max_sc);
      }
    }
    dev_fc = std::max(dev_fc, std::abs(benchmarks::fc_sc_fitness(act, sc) - pearson_oracle(fc_flat, sc_flat)));

    benchmarks::ColonyEventLog log(1 + rng.below(10));
    double r_sum = 0, c_sum = 0;
    for (auto& step : log) {
      step.resize(1 + rng.below(6));
      for (auto& ev : step) {
        ev.rotations = static_cast<long>(rng.below(4));
        ev.pheromone_drops = static_cast<long>(rng.below(4));
        ev.movements = static_cast<long>(rng.below(4));
        ev.rests = static_cast<long>(rng.below(4));
        ev.nest_returns = static_cast<long>(rng.below(2));
        ev.food_touches = static_cast<long>(rng.below(3));
        r_sum += 220.0 * static_cast<double>(ev.nest_returns) + 1.5 * static_cast<double>(ev.food_touches);
        c_sum += 0.02 * static_cast<double>(ev.rotations) + 0.05 * static_cast<double>(ev.pheromone_drops) +
                 0.25 * static_cast<double>(ev.movements) + 0.5 * static_cast<double>(ev.rests);
      }
    }
    const double colony = r_sum - c_sum;
    dev_colony = std::max(dev_colony, std::abs(benchmarks::colony_fitness(log) - colony) / std::max(1.0, std::abs(colony)));

    const double re = rng.uniform(0, 20), ri = rng.uniform(0, 20), te = rng.uniform(0, 20), ti = rng.uniform(0, 20);
    const double sp = 1.0 / std::max(0.8 * std::abs(re - te) + 0.2 * std::abs(ri - ti), 1e-6);
    dev_sp = std::max(dev_sp, std::abs(benchmarks::sp_fitness_two_pop(re, ri, te, ti) - sp) / std::max(1.0, sp));

    std::array<benchmarks::LayerRates, 4> rates{}, targets{};
    double dsum = 0;
    for (std::size_t l = 0; l < 4; ++l) {
      rates[l] = {rng.uniform(0, 10), rng.uniform(0, 10)};
      targets[l] = {rng.uniform(0, 10), rng.uniform(0, 10)};
      dsum += std::abs(rates[l].excitatory - targets[l].excitatory) + std::abs(rates[l].inhibitory - targets[l].inhibitory);
    }
    const double micro = 1.0 / std::max(dsum, 1e-6);
    dev_micro = std::max(dev_micro, std::abs(benchmarks::sp_fitness_microcircuit(rates, targets) - micro) / std::max(1.0, micro));
  }
  v.require(dev_softmax <= 1e-15, "softmax deviation " + fmt(dev_softmax));
  v.require(dev_mse <= 1e-12, "mse deviation " + fmt(dev_mse));
  v.require(dev_fc <= 1e-12, "fc_sc deviation " + fmt(dev_fc));
  v.require(dev_colony <= 1e-12, "colony deviation " + fmt(dev_colony));
  v.require(dev_sp <= 1e-15, "sp two-population deviation " + fmt(dev_sp));
  v.require(dev_micro <= 1e-15, "sp microcircuit deviation " + fmt(dev_micro));
  v.note("max deviations: softmax " + fmt(dev_softmax, 3) + ", mse " + fmt(dev_mse, 3) + ", fc_sc " +
         fmt(dev_fc, 3) + ", colony " + fmt(dev_colony, 3) + ", sp " + fmt(dev_sp, 3) + "/" + fmt(dev_micro, 3));
  return v;
}

// ---------------------------------------------------------------- 8

runner::ExternalCommandSpec fixture_command(const std::string& script, const std::string& args) {
  runner::ExternalCommandSpec spec;
  spec.command_template = "sh " + test_support::fixture(script) + " " + args;
  return spec;
}

Verdict runner_protocol(const fs::path& root) {
  Verdict v;
  Rng rng(8);
  Bounds bounds;
  bounds.add("w", 3, -1e6, 1e6);

  // Parameters reach the child unchanged.
  std::size_t exact = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Individual ind = bounds.sample(rng);
    ind.params[0].value[trial % 3] = trial % 2 ? 1.0 / 3.0 : 4.9e-320;
    const fs::path copy = root / ("copy" + std::to_string(trial) + ".csv");
    const auto out = runner::run_external(
        fixture_command("echo_params.sh", "{params_file} {fitness_file} " + copy.string()), ind,
        root / ("echo" + std::to_string(trial)), 0.0);
    Individual back = runner::read_params_file(copy);
    if (out.status == EvalStatus::Ok && back.params == ind.params) ++exact;
  }
  v.require(exact == 20, std::to_string(20 - exact) + " of 20 parameter round trips differ");

  // Sum of parameters, serial and with eight workers.
  const auto sum = fixture_command("sum.sh", "{params_file} {fitness_file}");
  const benchmarks::ExternalOptimizee optimizee(bounds, sum);
  std::vector<Individual> pop;
  for (std::size_t i = 0; i < 24; ++i) {
    pop.push_back(bounds.sample(rng));
    pop.back().index = i;
  }
  auto evaluate = [&](std::size_t workers) {
    runner::ParallelSettings s;
    s.results_dir = root / ("sum" + std::to_string(workers));
    s.max_parallel = workers;
    return runner::ParallelEvaluator(optimizee, s, sum).evaluate(pop, 0);
  };
  const auto serial = evaluate(1), parallel = evaluate(8);
  std::size_t sums = 0, same = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    double s = 0.0;
    for (double x : pop[i].params[0].value) s += x;
    if (serial[i].status == EvalStatus::Ok && serial[i].fitness == FitnessVector{s}) ++sums;
    if (serial[i].fitness == parallel[i].fitness && serial[i].status == parallel[i].status) ++same;
  }
  v.require(sums == pop.size(), std::to_string(pop.size() - sums) + " sums not bit-exact");
  v.require(same == pop.size(), std::to_string(pop.size() - same) + " serial/parallel mismatches");

  // Timeout.
  runner::ExternalCommandSpec sleepy = fixture_command("sleep.sh", "5 {fitness_file}");
  sleepy.kill_grace_seconds = 0.5;
  const benchmarks::ExternalOptimizee slow(bounds, sleepy);
  runner::ParallelSettings s;
  s.results_dir = root / "timeout";
  s.max_parallel = 2;
  s.timeout_seconds = 0.3;
  s.worst_fitness = -1e9;
  const auto t0 = Clock::now();
  const auto timed = runner::ParallelEvaluator(slow, s, sleepy).evaluate({pop[0], pop[1]}, 0);
  const double elapsed = seconds_since(t0);
  bool all_timeout = true;
  for (const auto& o : timed) all_timeout = all_timeout && o.status == EvalStatus::Timeout && o.fitness == FitnessVector{-1e9};
  v.require(all_timeout, "timeout fixture did not yield status timeout with worst fitness");
  v.require(elapsed < 4.0, "timeout took " + fmt(elapsed) + " s");
  v.note("20/20 round trips, 24/24 bit-exact sums, serial == 8 workers, timeout in " + fmt(elapsed, 3) + " s");
  return v;
}

// ---------------------------------------------------------------- 9

Json determinism_config(const fs::path& root, const std::string& name, const std::string& optimizer) {
  // The EnKF needs an observation target, which only the classifier has.
  const std::string optimizee = optimizer == "enkf" ? "classifier" : "sphere";
  Json j = config(root, name, optimizee, optimizer, 16, 10, 99);
  if (optimizee == "sphere") j["sphere"] = Json{{"dimension", 2}, {"lower", -4.0}, {"upper", 4.0}};
  j["max_parallel"] = 3;
  if (optimizer == "mga") j["mga"] = Json{{"resolution", 4}};
  if (optimizer == "grid") j["grid"] = Json{{"resolution", 13}};
  return j;
}

Verdict determinism(const fs::path& root) {
  Verdict v;
  std::size_t checked = 0;
  for (const std::string opt : {"ga", "enkf", "gd", "mga", "ce", "sa", "grid", "es"}) {
    const auto a = run(determinism_config(root, opt + "_a", opt));
    const auto b = run(determinism_config(root, opt + "_b", opt));
    app::Overrides stop;
    stop.stop_after = 5;
    const auto c = run(determinism_config(root, opt + "_c", opt), stop);
    const auto resumed = app::resume_command(c.dir, {});
    const std::string ta = test_support::slurp(a.dir / kTrajectoryFile);
    v.require(ta == test_support::slurp(b.dir / kTrajectoryFile), opt + ": repeated runs differ");
    v.require(c.rows.size() == 5, opt + ": interrupted run has " + std::to_string(c.rows.size()) + " generations");
    v.require(resumed.generations_executed == 10, opt + ": resume ended at " + std::to_string(resumed.generations_executed));
    v.require(ta == test_support::slurp(c.dir / kTrajectoryFile), opt + ": resumed run differs");
    ++checked;
  }
  // A larger native run with parallel workers.
  Json mc = config(root, "mc_a", "mountain_car", "ga", 32, 8, 5);
  mc["max_parallel"] = 4;
  const auto a = run(mc);
  mc["run_name"] = "mc_b";
  mc["max_parallel"] = 1;
  const auto b = run(mc);
  v.require(test_support::slurp(a.dir / kTrajectoryFile) == test_support::slurp(b.dir / kTrajectoryFile),
            "mountain car: 4 workers and 1 worker differ");
  v.note(std::to_string(checked) + " optimizers: repeat and stop-at-5 + resume byte-identical; mountain car 1 vs 4 workers identical");
  return v;
}

// ---------------------------------------------------------------- 10

Verdict grid_search(const fs::path& root) {
  Verdict v;
  Json j = config(root, "grid", "rastrigin", "grid", 64, 100, 1);
  j["rastrigin"] = Json{{"dimension", 2}, {"lower", -5.12}, {"upper", 5.12}};
  j["grid"] = Json{{"resolution", 20}};
  const auto r = run(j);
  std::set<std::vector<double>> points;
  for (const auto& rec : r.trajectory.records()) {
    for (const auto& e : rec.entries) points.insert(e.individual.flatten());
  }
  double brute = -INFINITY;
  for (int a = 0; a < 20; ++a) {
    for (int b = 0; b < 20; ++b) {
      const double x = -5.12 + 10.24 * a / 19.0, y = -5.12 + 10.24 * b / 19.0;
      const double f = -(20.0 + x * x - 10.0 * std::cos(2 * std::numbers::pi * x) + y * y -
                         10.0 * std::cos(2 * std::numbers::pi * y));
      brute = std::max(brute, f);
    }
  }
  const double best = best_of(r);
  v.require(points.size() == 400, std::to_string(points.size()) + " unique points instead of 400");
  v.require(std::abs(best - brute) <= 1e-12, "best " + fmt(best, 17) + " vs brute force " + fmt(brute, 17));
  v.note("400 unique points over " + std::to_string(r.rows.size()) + " generations, best " + fmt(best, 12) +
         " == brute force " + fmt(brute, 12));
  return v;
}

// ---------------------------------------------------------------- 11

Verdict sanity_suite(const fs::path& root) {
  Verdict v;
  double total = 0;
  std::string summary;
  for (const std::string opt : {"ga", "ce", "sa", "es", "gd"}) {
    Json j = config(root, "sphere_" + opt, "sphere", opt, 16, 200, 7);
    j["sphere"] = Json{{"dimension", 5}, {"lower", -5.0}, {"upper", 5.0}};
    const auto r = run(j);
    total += r.seconds;
    const double start = std::abs(r.rows.front().best_fitness);
    const double end = std::abs(best_of(r));
    const double ratio = start / end;
    v.require(r.rows.size() <= 200, opt + ": more than 200 generations");
    v.require(ratio >= 100.0, opt + ": reduction " + fmt(ratio) + " < 100");
    summary += (summary.empty() ? "" : ", ") + opt + " " + fmt(ratio, 3) + "x";
  }
  v.require(total < 120.0, "runtime " + fmt(total) + " s >= 120 s");
  v.note(summary + ", " + fmt(total, 3) + " s");
  return v;
}

}  // namespace

int main() {
  set_log_sink({});
  test_support::TempDir work;
  const std::vector<std::pair<std::string, std::function<Verdict(const fs::path&)>>> criteria{
      {"mountain car GA", mountain_car},
      {"EnKF classifier", enkf_classifier},
      {"EnKF zero innovation", enkf_zero_innovation},
      {"EnKF oracle equivalence", enkf_oracle_equivalence},
      {"MGA on fc_match", mga_fc_match},
      {"trace fitting", trace_fit},
      {"fitness-formula oracles", formula_oracles},
      {"runner protocol", runner_protocol},
      {"determinism", determinism},
      {"grid search", grid_search},
      {"optimizer sanity suite", sanity_suite},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const fs::path dir = work / ("c" + std::to_string(i + 1));
    fs::create_directories(dir);
    Verdict v;
    try {
      v = criteria[i].second(dir);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
