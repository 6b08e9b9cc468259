#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "twoloop/core/engine.hpp"
#include "twoloop/runner/external.hpp"

namespace twoloop::runner {

enum class EvaluatorKind { Native, External };

struct EvaluationTask {
  Individual individual;
  std::filesystem::path work_dir;
  /// Zero or negative disables the timeout.
  double timeout_seconds = 0.0;
  EvaluatorKind kind = EvaluatorKind::Native;
  /// Seed of the individual's evaluation substream.
  std::uint64_t seed = 0;
};

/// Runs one task. `cancel` is raised once the task's time budget is spent.
using TaskFunction = std::function<EvalOutcome(const EvaluationTask&, const std::atomic<bool>& cancel)>;

struct RunnerOptions {
  std::size_t max_parallel = 1;
  double worst_fitness = 0.0;
  std::size_t fitness_length = 1;
};

/// Executes every task with at most `max_parallel` in flight and returns the
/// outcomes in task order. A task that outlives its timeout is cancelled and
/// reported as Timeout; failed and timed-out outcomes carry
/// `[worst_fitness] * fitness_length`. Returns only after every task has
/// finished.
///
/// Native tasks are cancelled cooperatively: a task that ignores the flag
/// still holds its worker until it returns, but its result is discarded.
std::vector<EvalOutcome> evaluate_generation(const std::vector<EvaluationTask>& tasks,
                                             const TaskFunction& evaluate,
                                             const RunnerOptions& options);

/// Work directory of one evaluation: `<results_dir>/work/g<generation>_i<index>`.
std::filesystem::path task_work_dir(const std::filesystem::path& results_dir,
                                    std::size_t generation, std::size_t index);

struct ParallelSettings {
  std::filesystem::path results_dir;
  std::size_t max_parallel = 1;
  double timeout_seconds = 0.0;
  double worst_fitness = 0.0;
  bool keep_workdirs = false;
  std::uint64_t seed = 0;
};

/// Evaluator for the generation loop. Native optimizees run in-process on a
/// thread pool; with an external command each individual runs as a child
/// process through the file protocol.
class ParallelEvaluator : public Evaluator {
 public:
  ParallelEvaluator(const Optimizee& optimizee, ParallelSettings settings,
                    std::optional<ExternalCommandSpec> external = std::nullopt);

  std::vector<EvalOutcome> evaluate(const std::vector<Individual>& population,
                                    std::size_t generation) override;

 private:
  EvalOutcome run_task(const EvaluationTask& task, const std::atomic<bool>& cancel) const;

  const Optimizee& optimizee_;
  ParallelSettings settings_;
  std::optional<ExternalCommandSpec> external_;
};

}  // namespace twoloop::runner
