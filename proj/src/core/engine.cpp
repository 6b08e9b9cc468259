#include "twoloop/core/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "twoloop/core/error.hpp"
#include "twoloop/core/fitness.hpp"
#include "twoloop/core/log.hpp"
#include "twoloop/core/trajectory_io.hpp"

namespace twoloop {

namespace fs = std::filesystem;

EvalOutcome evaluate_native(const Optimizee& optimizee, const Individual& individual,
                            const EvalContext& context) {
  EvalOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    Evaluation ev = optimizee.simulate(individual, context);
    if (ev.fitness.size() != optimizee.fitness_length()) {
      out.status = EvalStatus::Failed;
      out.diagnostic = "fitness length mismatch: expected " +
                       std::to_string(optimizee.fitness_length()) + ", got " +
                       std::to_string(ev.fitness.size());
    } else {
      for (double v : ev.fitness) {
        if (!std::isfinite(v)) {
          out.status = EvalStatus::Failed;
          out.diagnostic = "non-finite fitness";
          break;
        }
      }
    }
    if (out.status == EvalStatus::Ok) {
      out.fitness = std::move(ev.fitness);
      out.model_output = std::move(ev.model_output);
    }
  } catch (const std::exception& ex) {
    out.status = EvalStatus::Failed;
    out.diagnostic = ex.what();
  }
  if (context.cancelled()) {
    out.status = EvalStatus::Timeout;
    out.diagnostic = "evaluation exceeded its time limit";
  }
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<EvalOutcome> SerialEvaluator::evaluate(const std::vector<Individual>& population,
                                                   std::size_t generation) {
  std::vector<EvalOutcome> out;
  out.reserve(population.size());
  for (const auto& ind : population) {
    EvalContext ctx;
    ctx.generation = generation;
    ctx.index = ind.index;
    ctx.seed = derive_seed(seed_, generation, Stream::Evaluation, ind.index);
    out.push_back(evaluate_native(optimizee_, ind, ctx));
  }
  return out;
}

namespace {

struct Persistence {
  fs::path dir;
  std::unique_ptr<LineAppender> trajectory;
  std::unique_ptr<LineAppender> timing;
};

std::vector<Individual> materialize(const std::vector<std::vector<double>>& flat,
                                    const Bounds& bounds, std::size_t generation) {
  std::vector<Individual> out;
  out.reserve(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    out.push_back(clip_individual(bounds.unflatten(flat[i], generation, i), bounds));
  }
  return out;
}

void validate(const RunSettings& s, const Optimizee& optimizee) {
  if (s.population_size < 1) throw config_error("population size must be at least 1");
  if (s.generations < 1) throw config_error("generation budget must be at least 1");
  if (s.fitness_weights.size() != optimizee.fitness_length()) {
    throw config_error("optimizee '" + std::string(optimizee.id()) + "' reports " +
                       std::to_string(optimizee.fitness_length()) + " fitness values but " +
                       std::to_string(s.fitness_weights.size()) + " weights were given");
  }
}

Trajectory run_loop(const RunSettings& s, const Optimizee& optimizee, Optimizer& optimizer,
                    Evaluator& evaluator, Trajectory trajectory, std::size_t start,
                    std::vector<Individual> population) {
  Persistence persist;
  if (!s.results_dir.empty()) {
    persist.dir = s.results_dir;
    fs::create_directories(persist.dir);
    persist.trajectory = std::make_unique<LineAppender>(persist.dir / kTrajectoryFile);
    persist.timing = std::make_unique<LineAppender>(persist.dir / kTimingFile);
  }
  const Bounds& bounds = optimizee.bounds();
  const std::size_t k = optimizee.fitness_length();
  bool warned_below_worst = false;

  for (std::size_t g = start; g < s.generations; ++g) {
    if (population.size() != s.population_size) {
      throw Error(ErrorKind::State, "optimizer '" + std::string(optimizer.id()) + "' produced " +
                                        std::to_string(population.size()) +
                                        " individuals, expected " +
                                        std::to_string(s.population_size));
    }
    auto outcomes = evaluator.evaluate(population, g);
    if (outcomes.size() != population.size()) {
      throw Error(ErrorKind::State, "evaluator returned the wrong number of results");
    }

    GenerationRecord record;
    record.generation = g;
    Json timing = Json::array();
    for (std::size_t i = 0; i < population.size(); ++i) {
      Entry e;
      e.individual = population[i];
      e.status = outcomes[i].status;
      e.wall_time_s = outcomes[i].wall_time_s;
      e.diagnostic = std::move(outcomes[i].diagnostic);
      if (e.status == EvalStatus::Ok) {
        e.fitness = std::move(outcomes[i].fitness);
        e.model_output = std::move(outcomes[i].model_output);
        e.weighted_fitness = weight_fitness(e.fitness, s.fitness_weights);
        if (!warned_below_worst && e.weighted_fitness < s.worst_fitness) {
          log_warning("observed weighted fitness " + std::to_string(e.weighted_fitness) +
                      " is below the configured worst fitness " +
                      std::to_string(s.worst_fitness) +
                      "; failed evaluations will rank above it");
          warned_below_worst = true;
        }
      } else {
        e.fitness.assign(k, s.worst_fitness);
        e.weighted_fitness = s.worst_fitness;
      }
      timing.push_back(e.wall_time_s);
      record.entries.push_back(std::move(e));
    }

    Rng rng(derive_seed(s.seed, g, Stream::Optimizer));
    auto next_flat = optimizer.step(record.entries, rng);
    record.optimizer_snapshot = optimizer.snapshot();
    auto next = materialize(next_flat, bounds, g + 1);

    if (persist.trajectory) {
      persist.trajectory->append(record_to_line(record, s.record_wall_time));
      persist.timing->append(Json{{"generation", g}, {"wall_time_s", timing}}.dump());
      Checkpoint ckpt{s.run_name, s.seed, g, optimizer.exhausted(), next,
                      record.optimizer_snapshot};
      write_text_atomic(persist.dir / kCheckpointFile, checkpoint_to_json(ckpt).dump());
    }
    trajectory.append(std::move(record));
    population = std::move(next);

    if (optimizer.exhausted()) break;
    if (s.stop_after != 0 && trajectory.size() >= s.stop_after) break;
  }
  return trajectory;
}

}  // namespace

Trajectory run_generation_loop(const RunSettings& s, const Optimizee& optimizee,
                               Optimizer& optimizer, Evaluator& evaluator) {
  validate(s, optimizee);
  if (!s.results_dir.empty()) {
    fs::create_directories(s.results_dir);
    // A fresh run starts from empty files.
    fs::remove(s.results_dir / kTrajectoryFile);
    fs::remove(s.results_dir / kTimingFile);
    fs::remove(s.results_dir / kCheckpointFile);
  }
  Rng init_rng(derive_seed(s.seed, 0, Stream::Init));
  auto flat = optimizer.initial_population(optimizee, init_rng);
  auto population = materialize(flat, optimizee.bounds(), 0);
  return run_loop(s, optimizee, optimizer, evaluator, Trajectory(s.run_name, s.seed), 0,
                  std::move(population));
}

Trajectory resume_generation_loop(const RunSettings& s, const Optimizee& optimizee,
                                  Optimizer& optimizer, Evaluator& evaluator) {
  validate(s, optimizee);
  if (s.results_dir.empty()) throw config_error("resume needs a results directory");
  const fs::path ckpt_path = s.results_dir / kCheckpointFile;
  if (!fs::exists(ckpt_path)) {
    throw Error(ErrorKind::State, "no checkpoint at '" + ckpt_path.string() + "'");
  }
  Json ckpt_json;
  try {
    ckpt_json = Json::parse(read_text(ckpt_path));
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::State, std::string("corrupt checkpoint: ") + ex.what());
  }
  Checkpoint ckpt = checkpoint_from_json(ckpt_json);
  if (ckpt.seed != s.seed) {
    throw Error(ErrorKind::State, "checkpoint seed " + std::to_string(ckpt.seed) +
                                      " does not match the run seed " + std::to_string(s.seed));
  }

  // Drop any record written after the checkpoint (interrupted between the
  // trajectory append and the checkpoint rename).
  const std::size_t completed = ckpt.generation + 1;
  truncate_trajectory(s.results_dir / kTrajectoryFile, completed);
  if (const auto timing = s.results_dir / kTimingFile; fs::exists(timing)) {
    const auto text = read_text(timing);
    const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    truncate_trajectory(timing, std::min(completed, lines));
  }
  Trajectory trajectory(s.run_name, s.seed);
  for (auto& rec : read_trajectory_records(s.results_dir / kTrajectoryFile)) {
    trajectory.append(std::move(rec));
  }
  if (trajectory.size() != completed) {
    throw Error(ErrorKind::State, "trajectory and checkpoint disagree on the generation count");
  }
  try {
    optimizer.restore(ckpt.optimizer_snapshot);
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::State, std::string("corrupt optimizer snapshot: ") + ex.what());
  }
  if (ckpt.converged || completed >= s.generations) return trajectory;
  return run_loop(s, optimizee, optimizer, evaluator, std::move(trajectory), completed,
                  std::move(ckpt.next_population));
}

}  // namespace twoloop
