#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "twoloop/core/rng.hpp"
#include "twoloop/core/types.hpp"

namespace twoloop {

/// Per-evaluation context handed to an optimizee.
struct EvalContext {
  std::size_t generation = 0;
  std::size_t index = 0;
  /// Seed of this individual's private random substream.
  std::uint64_t seed = 0;
  std::filesystem::path work_dir;
  /// Set by the runner when the evaluation exceeded its time budget.
  const std::atomic<bool>* cancel = nullptr;

  bool cancelled() const { return cancel != nullptr && cancel->load(std::memory_order_relaxed); }
};

struct Evaluation {
  FitnessVector fitness;
  /// Optional model observations, consumed by ensemble Kalman inversion.
  std::vector<double> model_output;
};

/// Inner-loop program under optimization.
class Optimizee {
 public:
  virtual ~Optimizee() = default;

  virtual std::string_view id() const = 0;
  virtual const Bounds& bounds() const = 0;
  virtual std::size_t fitness_length() const = 0;
  /// Initial individual; uniform in bounds unless overridden.
  virtual Individual create_individual(Rng& rng) const { return bounds().sample(rng); }
  /// Runs the simulation and computes the fitness vector. Throws on failure.
  virtual Evaluation simulate(const Individual& individual, const EvalContext& context) const = 0;
  /// Observation target for ensemble methods, when the optimizee has one.
  virtual std::optional<std::vector<double>> observation_target() const { return std::nullopt; }
};

/// Outer-loop algorithm. Works on flat parameter vectors laid out by Bounds.
class Optimizer {
 public:
  virtual ~Optimizer() = default;

  virtual std::string_view id() const = 0;
  virtual std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                              Rng& rng) = 0;
  /// Consumes the evaluated population, returns the next one.
  virtual std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) = 0;
  /// True once the optimizer has nothing left to propose (grid exhaustion).
  virtual bool exhausted() const { return false; }
  virtual Json snapshot() const = 0;
  virtual void restore(const Json& snapshot) = 0;
};

struct EvalOutcome {
  FitnessVector fitness;
  std::vector<double> model_output;
  EvalStatus status = EvalStatus::Ok;
  double wall_time_s = 0.0;
  std::string diagnostic;
};

/// Evaluates one generation, returning outcomes in population order.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::vector<EvalOutcome> evaluate(const std::vector<Individual>& population,
                                            std::size_t generation) = 0;
};

struct RunSettings {
  std::string run_name = "run";
  /// Output directory; empty keeps the run in memory.
  std::filesystem::path results_dir;
  std::size_t population_size = 1;
  std::size_t generations = 1;
  FitnessWeights fitness_weights{1.0};
  std::uint64_t seed = 0;
  double worst_fitness = 0.0;
  /// Record measured wall times in trajectory.jsonl (breaks byte-identity).
  bool record_wall_time = false;
  /// Stop after this many generations have been completed in total, as if
  /// the process had been interrupted. Zero disables.
  std::size_t stop_after = 0;
};

/// Runs the two-loop optimization from generation 0. When results_dir is
/// set, trajectory.jsonl and checkpoint.json are written after every
/// generation.
Trajectory run_generation_loop(const RunSettings& settings, const Optimizee& optimizee,
                               Optimizer& optimizer, Evaluator& evaluator);

/// Continues a persisted run from its checkpoint.
Trajectory resume_generation_loop(const RunSettings& settings, const Optimizee& optimizee,
                                  Optimizer& optimizer, Evaluator& evaluator);

/// Evaluates individuals in-process, one after another. The runner module
/// provides the parallel implementation.
class SerialEvaluator : public Evaluator {
 public:
  SerialEvaluator(const Optimizee& optimizee, std::uint64_t seed)
      : optimizee_(optimizee), seed_(seed) {}
  std::vector<EvalOutcome> evaluate(const std::vector<Individual>& population,
                                    std::size_t generation) override;

 private:
  const Optimizee& optimizee_;
  std::uint64_t seed_;
};

/// Shared by every evaluator: calls simulate and maps exceptions, wrong
/// fitness length and non-finite values onto a failed outcome.
EvalOutcome evaluate_native(const Optimizee& optimizee, const Individual& individual,
                            const EvalContext& context);

inline constexpr const char* kTrajectoryFile = "trajectory.jsonl";
inline constexpr const char* kCheckpointFile = "checkpoint.json";
inline constexpr const char* kTimingFile = "timing.jsonl";

}  // namespace twoloop
