// Command-line front end. Talks to the library only through the C interface.

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>

#include "twoloop/twoloop.h"

namespace {

struct OverrideFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_parallel;
  std::optional<std::size_t> generations;
  std::optional<std::size_t> stop_after;
};

int exit_code(twoloop_status status) {
  switch (status) {
    case TWOLOOP_OK: return 0;
    case TWOLOOP_ERR_CONFIG:
    case TWOLOOP_ERR_CHECKPOINT:
    case TWOLOOP_ERR_EMPTY_TRAJECTORY:
    case TWOLOOP_ERR_INVALID_ARGUMENT: return 2;
    default: return 1;
  }
}

int report_failure(twoloop_status status) {
  std::fprintf(stderr, "error: %s\n", twoloop_last_error());
  return exit_code(status);
}

/// Owns a twoloop_options handle built from the parsed flags.
class Options {
 public:
  Options() = default;
  Options(const Options&) = delete;
  Options& operator=(const Options&) = delete;
  ~Options() { twoloop_options_free(handle_); }

  twoloop_status build(const OverrideFlags& flags) {
    twoloop_status s = twoloop_options_new(&handle_);
    if (s == TWOLOOP_OK && flags.seed) s = twoloop_options_set_seed(handle_, *flags.seed);
    if (s == TWOLOOP_OK && flags.max_parallel) {
      s = twoloop_options_set_max_parallel(handle_, *flags.max_parallel);
    }
    if (s == TWOLOOP_OK && flags.generations) {
      s = twoloop_options_set_generations(handle_, *flags.generations);
    }
    if (s == TWOLOOP_OK && flags.stop_after) {
      s = twoloop_options_set_stop_after(handle_, *flags.stop_after);
    }
    return s;
  }

  const twoloop_options* get() const { return handle_; }

 private:
  twoloop_options* handle_ = nullptr;
};

void print_report(const twoloop_report* report) {
  const char* summary = twoloop_report_summary(report);
  if (summary[0] != '\0') std::printf("%s\n", summary);
}

int run(const std::string& config, const OverrideFlags& flags) {
  Options options;
  if (const auto s = options.build(flags); s != TWOLOOP_OK) return report_failure(s);
  twoloop_report* report = nullptr;
  const auto s = twoloop_run(config.c_str(), options.get(), &report);
  if (s != TWOLOOP_OK) return report_failure(s);
  print_report(report);
  if (!twoloop_report_completed(report)) {
    std::fprintf(stderr, "stopped after %zu generations; continue with `resume`\n",
                 twoloop_report_generations(report));
  }
  twoloop_report_free(report);
  return 0;
}

int resume(const std::string& results_dir, const OverrideFlags& flags) {
  Options options;
  if (const auto s = options.build(flags); s != TWOLOOP_OK) return report_failure(s);
  twoloop_report* report = nullptr;
  const auto s = twoloop_resume(results_dir.c_str(), options.get(), &report);
  if (s != TWOLOOP_OK) return report_failure(s);
  if (twoloop_report_already_complete(report)) {
    std::printf("run in %s is already complete (%zu generations); nothing to do\n",
                results_dir.c_str(), twoloop_report_generations(report));
  } else {
    print_report(report);
  }
  twoloop_report_free(report);
  return 0;
}

int export_csv(const std::string& results_dir, const std::string& out) {
  std::size_t rows = 0;
  const auto s = twoloop_export(results_dir.c_str(), out.c_str(), &rows);
  if (s != TWOLOOP_OK) return report_failure(s);
  std::printf("wrote %zu generations to %s\n", rows, out.c_str());
  return 0;
}

int validate(const std::string& config) {
  twoloop_report* report = nullptr;
  const auto s = twoloop_validate(config.c_str(), &report);
  if (s != TWOLOOP_OK) return report_failure(s);
  for (std::size_t i = 0; i < twoloop_report_warning_count(report); ++i) {
    std::fprintf(stderr, "warning: %s\n", twoloop_report_warning(report, i));
  }
  std::printf("%s: ok\n", config.c_str());
  twoloop_report_free(report);
  return 0;
}

void add_loop_flags(CLI::App* cmd, OverrideFlags& flags, bool with_seed) {
  if (with_seed) cmd->add_option("--seed", flags.seed, "Override the master seed");
  cmd->add_option("--max-parallel", flags.max_parallel, "Override the number of parallel evaluations")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--generations", flags.generations, "Override the generation budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stop-after", flags.stop_after,
                  "Stop once this many generations exist, leaving a resumable run")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-loop black-box optimization runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", twoloop_version());
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress warnings and progress messages");

  std::string config;
  std::string results_dir;
  std::string out_csv;
  OverrideFlags run_flags;
  OverrideFlags resume_flags;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment from a config file");
  run_cmd->add_option("config", config, "Config file")->required();
  add_loop_flags(run_cmd, run_flags, true);

  auto* resume_cmd = app.add_subcommand("resume", "Continue a run from its checkpoint");
  resume_cmd->add_option("results_dir", results_dir, "Results directory of the run")->required();
  add_loop_flags(resume_cmd, resume_flags, true);

  auto* export_cmd = app.add_subcommand("export", "Write per-generation fitness statistics as CSV");
  export_cmd->add_option("results_dir", results_dir, "Results directory of the run")->required();
  export_cmd->add_option("out_csv", out_csv, "Output CSV path")->required();

  auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("config", config, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  twoloop_set_quiet(quiet ? 1 : 0);

  if (*run_cmd) return run(config, run_flags);
  if (*resume_cmd) return resume(results_dir, resume_flags);
  if (*export_cmd) return export_csv(results_dir, out_csv);
  return validate(config);
}
