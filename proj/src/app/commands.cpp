#include "twoloop/app/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "twoloop/benchmarks/optimizees.hpp"
#include "twoloop/core/error.hpp"
#include "twoloop/core/fitness.hpp"
#include "twoloop/core/log.hpp"
#include "twoloop/core/trajectory_io.hpp"
#include "twoloop/optimizers/optimizer.hpp"
#include "twoloop/runner/csv_protocol.hpp"
#include "twoloop/runner/runner.hpp"

namespace twoloop::app {

namespace fs = std::filesystem;

namespace {

std::string read_or(Phase phase, const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) throw CommandError(phase, "no " + what + " at '" + path.string() + "'");
  try {
    return read_text(path);
  } catch (const std::exception& ex) {
    throw CommandError(phase, ex.what());
  }
}

Trajectory load_trajectory(const fs::path& results_dir, const RunConfig* config) {
  const fs::path path = results_dir / kTrajectoryFile;
  if (!fs::exists(path)) {
    throw CommandError(Phase::EmptyTrajectory, "no trajectory at '" + path.string() + "'");
  }
  Trajectory t(config ? config->run_name : results_dir.filename().string(), config ? config->seed : 0);
  try {
    for (auto& rec : read_trajectory_records(path)) t.append(std::move(rec));
  } catch (const std::exception& ex) {
    throw CommandError(Phase::EmptyTrajectory, std::string("unreadable trajectory: ") + ex.what());
  }
  return t;
}

void write_summary(const RunConfig& config, const fs::path& results_dir, const Trajectory& t,
                   RunReport& report) {
  report.summary = make_summary(config, t);
  write_text_atomic(results_dir / kSummaryFile, report.summary.dump(2) + "\n");
}

}  // namespace

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.max_parallel) {
    if (*o.max_parallel < 1) throw config_error("--max-parallel must be at least 1");
    config.max_parallel = *o.max_parallel;
  }
  if (o.generations) {
    if (*o.generations < 1) throw config_error("--generations must be at least 1");
    config.generations = *o.generations;
  }
}

Experiment build_experiment(const RunConfig& config, std::size_t stop_after,
                            const fs::path& results_dir) {
  const fs::path dir = results_dir.empty() ? config.results_dir() : results_dir;
  Experiment e;
  e.config = config;
  e.optimizee = benchmarks::make_optimizee(config.optimizee, config.optimizee_params(),
                                           "/" + config.optimizee);
  const std::size_t k = e.optimizee->fitness_length();
  std::vector<double> weights = config.fitness_weights;
  if (weights.empty()) weights.assign(k, 1.0);
  if (weights.size() != k) {
    throw config_error("optimizee '" + config.optimizee + "' reports " + std::to_string(k) +
                           " fitness values but " + std::to_string(weights.size()) +
                           " weights were given",
                       "/fitness_weights");
  }

  optimizers::OptimizerContext ctx;
  ctx.bounds = e.optimizee->bounds();
  ctx.population_size = config.population_size;
  ctx.target = e.optimizee->observation_target();
  try {
    e.optimizer = optimizers::make_optimizer(config.optimizer, config.optimizer_params(), ctx,
                                             "/" + config.optimizer);
  } catch (const Error& ex) {
    if (!ex.pointer().empty()) throw;
    throw config_error(ex.what(), "/" + config.optimizer);
  }

  e.settings.run_name = config.run_name;
  e.settings.results_dir = dir;
  e.settings.population_size = config.population_size;
  e.settings.generations = config.generations;
  e.settings.fitness_weights = weights;
  e.settings.seed = config.seed;
  e.settings.worst_fitness = config.worst_fitness;
  e.settings.record_wall_time = config.record_wall_time;
  e.settings.stop_after = stop_after;

  runner::ParallelSettings ps;
  ps.results_dir = dir;
  ps.max_parallel = config.max_parallel;
  ps.timeout_seconds = config.timeout_seconds;
  ps.worst_fitness = config.worst_fitness;
  ps.keep_workdirs = config.keep_workdirs;
  ps.seed = config.seed;
  std::optional<runner::ExternalCommandSpec> external;
  if (const auto* ext = dynamic_cast<const benchmarks::ExternalOptimizee*>(e.optimizee.get())) {
    external = ext->command();
  }
  e.evaluator = std::make_unique<runner::ParallelEvaluator>(*e.optimizee, ps, external);
  return e;
}

std::vector<std::string> config_warnings(const Experiment& e) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < e.settings.fitness_weights.size(); ++i) {
    if (e.settings.fitness_weights[i] < 0.0) {
      out.push_back("fitness weight " + std::to_string(i) +
                    " is negative; that component is minimized");
    }
  }
  if (e.config.timeout_seconds > 0.0 && e.config.optimizee != "external") {
    out.push_back("in-process evaluations stop at the timeout only if the optimizee polls for "
                  "cancellation");
  }
  return out;
}

Json make_summary(const RunConfig& config, const Trajectory& t) {
  std::size_t evaluations = 0;
  std::size_t failed = 0;
  for (const auto& rec : t.records()) {
    for (const auto& e : rec.entries) {
      ++evaluations;
      if (e.status != EvalStatus::Ok) ++failed;
    }
  }
  Json s;
  s["run_name"] = config.run_name;
  s["optimizee"] = config.optimizee;
  s["optimizer"] = config.optimizer;
  s["seed"] = config.seed;
  s["generations_executed"] = t.size();
  s["evaluations"] = evaluations;
  s["unsuccessful_evaluations"] = failed;
  try {
    const BestEntry best = best_entry(t);
    s["best_fitness"] = best.weighted_fitness;
    s["best"] = Json{{"generation", best.generation},
                     {"index", best.individual.index},
                     {"params", individual_to_json(best.individual)["params"]},
                     {"fitness", best.fitness},
                     {"weighted_fitness", best.weighted_fitness}};
  } catch (const Error& ex) {
    if (ex.kind() != ErrorKind::EmptyTrajectory) throw;
    s["best_fitness"] = nullptr;
    s["best"] = nullptr;
  }
  return s;
}

RunReport run_config(const RunConfig& input, const std::string& config_text,
                     const std::string& source, const Overrides& overrides) {
  RunConfig config = input;
  Experiment e;
  try {
    apply_overrides(config, overrides);
    e = build_experiment(config, overrides.stop_after.value_or(0));
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Config, anchor_message(ex, config_text, source));
  }
  for (const auto& w : config_warnings(e)) log_warning(w);

  const fs::path dir = config.results_dir();
  RunReport report;
  try {
    fs::create_directories(dir);
    write_text_atomic(dir / kConfigCopyFile, serialize_config(config));
    const Trajectory t = run_generation_loop(e.settings, *e.optimizee, *e.optimizer, *e.evaluator);
    report.generations_executed = t.size();
    report.completed = t.size() >= config.generations || e.optimizer->exhausted();
    write_summary(config, dir, t, report);
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Run, ex.what());
  }
  return report;
}

RunReport run_command(const fs::path& config_path, const Overrides& overrides) {
  const std::string text = read_or(Phase::Config, config_path, "config");
  RunConfig config;
  try {
    config = parse_config(text, config_path.string());
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Config, ex.what());
  }
  return run_config(config, text, config_path.string(), overrides);
}

RunReport resume_command(const fs::path& results_dir, const Overrides& overrides) {
  const fs::path config_path = results_dir / kConfigCopyFile;
  const std::string text = read_or(Phase::Checkpoint, config_path, "run config");
  RunConfig config;
  try {
    config = parse_config(text, config_path.string());
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Checkpoint, ex.what());
  }
  if (overrides.seed && *overrides.seed != config.seed) {
    throw CommandError(Phase::Config, "the seed of a run cannot change on resume");
  }

  const fs::path ckpt_path = results_dir / kCheckpointFile;
  const std::string ckpt_text = read_or(Phase::Checkpoint, ckpt_path, "checkpoint");
  Checkpoint ckpt;
  try {
    ckpt = checkpoint_from_json(Json::parse(ckpt_text));
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Checkpoint, "corrupt checkpoint '" + ckpt_path.string() + "': " + ex.what());
  }
  if (ckpt.seed != config.seed) {
    throw CommandError(Phase::Checkpoint, "checkpoint seed does not match the run config");
  }

  Experiment e;
  try {
    apply_overrides(config, overrides);
    e = build_experiment(config, overrides.stop_after.value_or(0), results_dir);
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Config, anchor_message(ex, text, config_path.string()));
  }
  RunReport report;
  const std::size_t completed = ckpt.generation + 1;
  if (ckpt.converged || completed >= config.generations) {
    const Trajectory t = load_trajectory(results_dir, &config);
    report.already_complete = true;
    report.completed = true;
    report.generations_executed = t.size();
    report.summary = make_summary(config, t);
    return report;
  }
  try {
    if (overrides.generations) write_text_atomic(config_path, serialize_config(config));
    const Trajectory t = resume_generation_loop(e.settings, *e.optimizee, *e.optimizer, *e.evaluator);
    report.generations_executed = t.size();
    report.completed = t.size() >= config.generations || e.optimizer->exhausted();
    write_summary(config, results_dir, t, report);
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Run, ex.what());
  }
  return report;
}

std::vector<ExportRow> export_rows(const Trajectory& t) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ExportRow> rows;
  double best_so_far = nan;
  for (const auto& rec : t.records()) {
    ExportRow row;
    row.generation = rec.generation;
    std::vector<double> values;
    for (const auto& e : rec.entries) {
      if (e.status == EvalStatus::Ok) values.push_back(e.weighted_fitness);
    }
    if (values.empty()) {
      row.mean_fitness = row.std_fitness = row.best_fitness = nan;
    } else {
      double sum = 0.0;
      double best = values[0];
      for (double v : values) {
        sum += v;
        best = std::max(best, v);
      }
      const double mean = sum / static_cast<double>(values.size());
      double ss = 0.0;
      for (double v : values) ss += (v - mean) * (v - mean);
      row.mean_fitness = mean;
      row.std_fitness = std::sqrt(ss / static_cast<double>(values.size()));
      row.best_fitness = best;
      if (std::isnan(best_so_far) || best > best_so_far) best_so_far = best;
    }
    row.best_so_far = best_so_far;
    rows.push_back(row);
  }
  return rows;
}

std::string export_csv(const std::vector<ExportRow>& rows) {
  std::string out = "generation,mean_fitness,std_fitness,best_fitness,best_so_far\n";
  for (const auto& r : rows) {
    out += std::to_string(r.generation) + "," + runner::format_real(r.mean_fitness) + "," +
           runner::format_real(r.std_fitness) + "," + runner::format_real(r.best_fitness) + "," +
           runner::format_real(r.best_so_far) + "\n";
  }
  return out;
}

std::size_t export_command(const fs::path& results_dir, const fs::path& out_csv) {
  const Trajectory t = load_trajectory(results_dir, nullptr);
  bool any_ok = false;
  for (const auto& rec : t.records()) {
    for (const auto& e : rec.entries) any_ok = any_ok || e.status == EvalStatus::Ok;
  }
  if (!any_ok) {
    throw CommandError(Phase::EmptyTrajectory,
                       "trajectory in '" + results_dir.string() + "' has no successful evaluations");
  }
  const auto rows = export_rows(t);
  try {
    if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
    write_text_atomic(out_csv, export_csv(rows));
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Run, ex.what());
  }
  return rows.size();
}

std::vector<std::string> validate_command(const fs::path& config_path) {
  const std::string text = read_or(Phase::Config, config_path, "config");
  RunConfig config;
  try {
    config = parse_config(text, config_path.string());
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Config, ex.what());
  }
  try {
    return config_warnings(build_experiment(config));
  } catch (const std::exception& ex) {
    throw CommandError(Phase::Config, anchor_message(ex, text, config_path.string()));
  }
}

}  // namespace twoloop::app
