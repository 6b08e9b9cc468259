#include "twoloop/runner/runner.hpp"

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>

#include "twoloop/core/error.hpp"
#include "twoloop/core/log.hpp"

namespace twoloop::runner {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Slot {
  std::atomic<bool> cancel{false};
  bool started = false;
  bool done = false;
  Clock::time_point start;
};

}  // namespace

std::vector<EvalOutcome> evaluate_generation(const std::vector<EvaluationTask>& tasks,
                                             const TaskFunction& evaluate,
                                             const RunnerOptions& options) {
  if (options.max_parallel < 1) throw config_error("max_parallel must be at least 1");
  const std::size_t n = tasks.size();
  std::vector<EvalOutcome> results(n);
  if (n == 0) return results;

  auto slots = std::make_unique<Slot[]>(n);
  std::mutex mutex;
  std::condition_variable changed;
  std::size_t next = 0;
  std::size_t finished = 0;

  auto worker = [&] {
    while (true) {
      std::size_t i = 0;
      {
        std::lock_guard lock(mutex);
        if (next >= n) return;
        i = next++;
        slots[i].started = true;
        slots[i].start = Clock::now();
      }
      EvalOutcome outcome;
      try {
        outcome = evaluate(tasks[i], slots[i].cancel);
      } catch (const std::exception& ex) {
        outcome.status = EvalStatus::Failed;
        outcome.diagnostic = ex.what();
      }
      {
        std::lock_guard lock(mutex);
        results[i] = std::move(outcome);
        slots[i].done = true;
        ++finished;
      }
      changed.notify_all();
    }
  };

  {
    std::vector<std::jthread> pool;
    const std::size_t workers = std::min(options.max_parallel, n);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);

    // Watchdog: raise the cancel flag of every running task past its budget.
    std::unique_lock lock(mutex);
    while (finished < n) {
      changed.wait_for(lock, std::chrono::milliseconds(5));
      const auto now = Clock::now();
      for (std::size_t i = 0; i < n; ++i) {
        const auto& task = tasks[i];
        Slot& slot = slots[i];
        if (!slot.started || slot.done || task.timeout_seconds <= 0.0) continue;
        if (std::chrono::duration<double>(now - slot.start).count() >= task.timeout_seconds) {
          slot.cancel.store(true, std::memory_order_relaxed);
        }
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto& r = results[i];
    if (slots[i].cancel.load(std::memory_order_relaxed) && r.status == EvalStatus::Ok) {
      r.status = EvalStatus::Timeout;
      r.diagnostic = "evaluation exceeded its time limit";
    }
    if (r.status != EvalStatus::Ok) {
      r.fitness.assign(options.fitness_length, options.worst_fitness);
      r.model_output.clear();
    }
  }
  return results;
}

fs::path task_work_dir(const fs::path& results_dir, std::size_t generation, std::size_t index) {
  return results_dir / "work" / ("g" + std::to_string(generation) + "_i" + std::to_string(index));
}

ParallelEvaluator::ParallelEvaluator(const Optimizee& optimizee, ParallelSettings settings,
                                     std::optional<ExternalCommandSpec> external)
    : optimizee_(optimizee), settings_(std::move(settings)), external_(std::move(external)) {
  if (settings_.max_parallel < 1) throw config_error("max_parallel must be at least 1");
  if (external_) {
    external_->validate();
    if (external_->expected_fitness_length != optimizee_.fitness_length()) {
      throw config_error("external fitness length does not match the optimizee");
    }
  }
}

EvalOutcome ParallelEvaluator::run_task(const EvaluationTask& task,
                                        const std::atomic<bool>& cancel) const {
  EvalOutcome outcome;
  if (task.kind == EvaluatorKind::External) {
    outcome = run_external(*external_, task.individual, task.work_dir, task.timeout_seconds, &cancel);
  } else {
    EvalContext ctx;
    ctx.generation = task.individual.generation;
    ctx.index = task.individual.index;
    ctx.seed = task.seed;
    ctx.work_dir = task.work_dir;
    ctx.cancel = &cancel;
    outcome = evaluate_native(optimizee_, task.individual, ctx);
  }
  if (outcome.status == EvalStatus::Ok && !settings_.keep_workdirs && !task.work_dir.empty()) {
    std::error_code ec;
    fs::remove_all(task.work_dir, ec);
  }
  return outcome;
}

std::vector<EvalOutcome> ParallelEvaluator::evaluate(const std::vector<Individual>& population,
                                                     std::size_t generation) {
  std::vector<EvaluationTask> tasks;
  tasks.reserve(population.size());
  for (const auto& ind : population) {
    EvaluationTask task;
    task.individual = ind;
    task.timeout_seconds = settings_.timeout_seconds;
    task.kind = external_ ? EvaluatorKind::External : EvaluatorKind::Native;
    task.seed = derive_seed(settings_.seed, generation, Stream::Evaluation, ind.index);
    if (external_) {
      const fs::path root = settings_.results_dir.empty() ? fs::temp_directory_path() / "twoloop"
                                                          : settings_.results_dir;
      task.work_dir = task_work_dir(root, generation, ind.index);
    }
    tasks.push_back(std::move(task));
  }
  RunnerOptions options;
  options.max_parallel = settings_.max_parallel;
  options.worst_fitness = settings_.worst_fitness;
  options.fitness_length = optimizee_.fitness_length();
  auto outcomes = evaluate_generation(
      tasks, [this](const EvaluationTask& t, const std::atomic<bool>& c) { return run_task(t, c); },
      options);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].status != EvalStatus::Ok) {
      log_warning("generation " + std::to_string(generation) + " individual " +
                  std::to_string(population[i].index) + " " + to_string(outcomes[i].status) +
                  ": " + outcomes[i].diagnostic);
    }
  }
  return outcomes;
}

}  // namespace twoloop::runner
