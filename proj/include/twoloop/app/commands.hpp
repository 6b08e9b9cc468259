#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twoloop/app/config.hpp"
#include "twoloop/core/engine.hpp"

namespace twoloop::app {

/// Command-line overrides applied on top of a config.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_parallel;
  std::optional<std::size_t> generations;
  /// Stop once this many generations exist in total, as if interrupted.
  std::optional<std::size_t> stop_after;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// A config turned into live objects.
struct Experiment {
  RunConfig config;
  std::unique_ptr<Optimizee> optimizee;
  std::unique_ptr<Optimizer> optimizer;
  std::unique_ptr<Evaluator> evaluator;
  RunSettings settings;
};

/// Builds optimizee, optimizer and evaluator. Errors are Config errors whose
/// pointer locates the offending key. An empty `results_dir` means
/// `config.results_dir()`.
Experiment build_experiment(const RunConfig& config, std::size_t stop_after = 0,
                            const std::filesystem::path& results_dir = {});

/// Non-fatal findings (e.g. negative fitness weights).
std::vector<std::string> config_warnings(const Experiment& experiment);

struct RunReport {
  std::size_t generations_executed = 0;
  bool completed = false;
  /// True when resume found nothing left to do.
  bool already_complete = false;
  Json summary;
};

/// Error phases, mapped to distinct statuses by the C interface.
enum class Phase { Config, Checkpoint, Run, EmptyTrajectory };

/// Failure of a command, tagged with the phase in which it happened.
class CommandError : public std::runtime_error {
 public:
  CommandError(Phase phase, const std::string& message)
      : std::runtime_error(message), phase_(phase) {}
  Phase phase() const noexcept { return phase_; }

 private:
  Phase phase_;
};

/// Runs a config from generation 0. Writes trajectory.jsonl, checkpoint.json,
/// summary.json and config.json (the effective config) into the results
/// directory.
RunReport run_command(const std::filesystem::path& config_path, const Overrides& overrides);
RunReport run_config(const RunConfig& config, const std::string& config_text,
                     const std::string& source, const Overrides& overrides);

/// Continues the run stored in `results_dir`. Only max_parallel,
/// generations and stop_after may be overridden.
RunReport resume_command(const std::filesystem::path& results_dir, const Overrides& overrides);

struct ExportRow {
  std::size_t generation = 0;
  double mean_fitness = 0.0;
  double std_fitness = 0.0;
  double best_fitness = 0.0;
  double best_so_far = 0.0;
};

/// Per-generation statistics of the weighted fitness over ok entries.
/// Population standard deviation. Generations without ok entries report
/// NaN statistics and carry best_so_far forward.
std::vector<ExportRow> export_rows(const Trajectory& trajectory);
std::string export_csv(const std::vector<ExportRow>& rows);

/// Writes the CSV for the run in `results_dir`; returns the row count.
std::size_t export_command(const std::filesystem::path& results_dir,
                           const std::filesystem::path& out_csv);

/// Parses and builds the experiment without running it. Returns warnings.
std::vector<std::string> validate_command(const std::filesystem::path& config_path);

/// Summary document (best individual, best fitness, generations executed).
Json make_summary(const RunConfig& config, const Trajectory& trajectory);

inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kConfigCopyFile = "config.json";

}  // namespace twoloop::app
