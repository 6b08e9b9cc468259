#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <string>

#include "twoloop/core/engine.hpp"

namespace twoloop::runner {

struct ExternalCommandSpec {
  /// Shell command; may reference {params_file}, {fitness_file},
  /// {generation}, {index} and {work_dir}.
  std::string command_template;
  std::size_t expected_fitness_length = 1;
  /// Seconds between SIGTERM and SIGKILL on timeout.
  double kill_grace_seconds = 5.0;

  /// Throws a Config error for an empty template, an unknown placeholder or
  /// an unbalanced brace.
  void validate() const;
};

inline constexpr const char* kParamsFileName = "params.csv";
inline constexpr const char* kFitnessFileName = "fitness.csv";
inline constexpr const char* kStdoutLog = "stdout.log";
inline constexpr const char* kStderrLog = "stderr.log";

/// Replaces each `{name}` with its value verbatim (no shell quoting). Any
/// placeholder missing from `values` is a Config error.
std::string substitute_placeholders(const std::string& templ,
                                    const std::map<std::string, std::string>& values);

/// Writes the params file into `work_dir`, runs the command there through
/// /bin/sh with output captured to stdout.log / stderr.log, and reads the
/// fitness file back. The child runs in its own process group; on timeout
/// or cancellation the group receives SIGTERM, then SIGKILL after the grace
/// period.
EvalOutcome run_external(const ExternalCommandSpec& spec, const Individual& individual,
                         const std::filesystem::path& work_dir, double timeout_seconds,
                         const std::atomic<bool>* cancel = nullptr);

}  // namespace twoloop::runner
