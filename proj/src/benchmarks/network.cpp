#include "twoloop/benchmarks/network.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "twoloop/benchmarks/formulas.hpp"
#include "twoloop/core/error.hpp"
#include "twoloop/core/rng.hpp"
#include "twoloop/runner/csv_protocol.hpp"

namespace twoloop::benchmarks {

namespace {

void check_square(const Matrix& m, const char* what) {
  for (const auto& row : m) {
    if (row.size() != m.size()) throw config_error(std::string(what) + " must be square");
  }
}

}  // namespace

Matrix simulate_network(const NetworkTask& task) {
  const std::size_t m = task.sc.size();
  check_square(task.sc, "structural connectivity");
  if (m == 0) throw config_error("network needs at least one node");
  if (task.coupling < 0.0) throw config_error("coupling must be nonnegative");
  if (!task.initial_state.empty() && task.initial_state.size() != m) {
    throw config_error("initial state size does not match the node count");
  }
  const std::size_t total = task.warmup + task.steps;
  if (task.delay_steps >= std::max<std::size_t>(total, 1)) {
    throw config_error("delay must be shorter than the simulation");
  }

  // history[t] = x(t), t = 0 .. total-1.
  std::vector<std::vector<double>> history(total, std::vector<double>(m, 0.0));
  if (total == 0) return Matrix(m);
  if (!task.initial_state.empty()) history[0] = task.initial_state;

  Rng rng(task.noise_seed);
  const double keep = 1.0 - task.decay * task.dt;
  const double drive = task.coupling * task.dt;
  const double kick = task.noise_sigma * std::sqrt(task.dt);
  for (std::size_t t = 0; t + 1 < total; ++t) {
    const auto& now = history[t];
    const std::vector<double>* past = t >= task.delay_steps ? &history[t - task.delay_steps] : nullptr;
    auto& next = history[t + 1];
    for (std::size_t i = 0; i < m; ++i) {
      double coupled = 0.0;
      if (past != nullptr) {
        for (std::size_t j = 0; j < m; ++j) coupled += task.sc[i][j] * (*past)[j];
      }
      const double noise = task.noise_sigma != 0.0 ? kick * rng.normal() : 0.0;
      next[i] = keep * now[i] + drive * coupled + noise;
      if (!(std::abs(next[i]) <= 1e6)) {
        throw Error(ErrorKind::EvaluationFailed,
                    "network activity diverged at step " + std::to_string(t + 1));
      }
    }
  }

  Matrix activity(m, std::vector<double>(task.steps));
  for (std::size_t k = 0; k < task.steps; ++k) {
    for (std::size_t i = 0; i < m; ++i) activity[i][k] = history[task.warmup + k][i];
  }
  return activity;
}

std::size_t delay_steps_for(double length, double speed, double dt) {
  if (!(speed > 0.0) || !(dt > 0.0)) throw config_error("speed and dt must be positive");
  return static_cast<std::size_t>(std::llround(length / (speed * dt)));
}

Matrix functional_connectivity(const Matrix& activity) {
  const std::size_t m = activity.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& row = activity[i];
    const bool constant =
        row.empty() || std::all_of(row.begin(), row.end(), [&](double v) { return v == row[0]; });
    if (constant) {
      throw Error(ErrorKind::EvaluationFailed, "node " + std::to_string(i) + " has a constant signal");
    }
  }
  Matrix fc(m, std::vector<double>(m, 1.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) fc[i][j] = fc[j][i] = pearson(activity[i], activity[j]);
  }
  return fc;
}

double fc_sc_fitness(const Matrix& activity, const Matrix& sc) {
  check_square(sc, "structural connectivity");
  if (sc.size() != activity.size()) {
    throw config_error("activity rows do not match the structural connectivity size");
  }
  const Matrix fc = functional_connectivity(activity);
  double max_sc = 0.0;
  for (const auto& row : sc) {
    for (double v : row) max_sc = std::max(max_sc, v);
  }
  if (!(max_sc > 0.0)) throw config_error("structural connectivity must have a positive entry");
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < sc.size(); ++i) {
    for (std::size_t j = 0; j < sc.size(); ++j) {
      a.push_back(fc[i][j]);
      b.push_back(sc[i][j] / max_sc);
    }
  }
  return pearson(a, b);
}

Matrix random_sc(std::size_t nodes, std::uint64_t seed) {
  Rng rng(seed);
  Matrix sc(nodes, std::vector<double>(nodes, 0.0));
  for (std::size_t i = 0; i < nodes; ++i) {
    for (std::size_t j = i + 1; j < nodes; ++j) sc[i][j] = sc[j][i] = rng.uniform();
  }
  return sc;
}

double spectral_radius(const Matrix& m) {
  check_square(m, "matrix");
  const auto n = static_cast<Eigen::Index>(m.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = m[i][j];
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix read_sc_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read connectivity file '" + path.string() + "'");
  Matrix out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      if (!runner::parse_real(cell, v) || !std::isfinite(v)) {
        throw config_error("connectivity file row " + std::to_string(out.size() + 1) +
                           " has an unparsable value '" + cell + "'");
      }
      if (v < 0.0) throw config_error("connectivity entries must be nonnegative");
      row.push_back(v);
    }
    out.push_back(std::move(row));
  }
  if (out.size() < 2) throw config_error("connectivity matrix needs at least 2 nodes");
  check_square(out, "connectivity matrix");
  return out;
}

}  // namespace twoloop::benchmarks
