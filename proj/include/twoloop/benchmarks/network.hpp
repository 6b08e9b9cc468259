#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace twoloop::benchmarks {

using Matrix = std::vector<std::vector<double>>;

/// Linear delayed rate network
///   x(t+1) = (1 - decay dt) x(t) + g dt SC x(t - d) + sigma sqrt(dt) xi(t)
/// with x(t) = 0 for t < 0.
struct NetworkTask {
  Matrix sc;
  double coupling = 0.0;
  /// Delay d in steps.
  std::size_t delay_steps = 0;
  /// Recorded steps after warm-up.
  std::size_t steps = 2000;
  std::size_t warmup = 200;
  double dt = 1.0;
  double decay = 0.1;
  double noise_sigma = 0.1;
  std::uint64_t noise_seed = 1;
  /// x(0); zero when empty.
  std::vector<double> initial_state;
};

/// M x steps activity; column k holds x(warmup + k). Throws
/// Error(EvaluationFailed) once any |x| exceeds 1e6.
Matrix simulate_network(const NetworkTask& task);

/// Delay in steps for a tract of `length` travelled at `speed`:
/// round(length / (speed dt)).
std::size_t delay_steps_for(double length, double speed, double dt);

/// M x M Pearson matrix of the node time series (rows of `activity`).
Matrix functional_connectivity(const Matrix& activity);

/// Pearson correlation between the flattened FC and the flattened SC / max(SC),
/// diagonals included.
double fc_sc_fitness(const Matrix& activity, const Matrix& sc);

/// Symmetric, nonnegative, zero-diagonal matrix with U(0,1) entries.
Matrix random_sc(std::size_t nodes, std::uint64_t seed);

/// Largest absolute eigenvalue.
double spectral_radius(const Matrix& m);

/// Square, headerless, comma-separated matrix. Throws a Config error when
/// the file is unreadable, ragged, not square or holds a negative entry.
Matrix read_sc_csv(const std::filesystem::path& path);

}  // namespace twoloop::benchmarks
