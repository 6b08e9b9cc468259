#include "twoloop/twoloop.h"

#include <iostream>
#include <algorithm>
#include <new>
#include <string>
#include <vector>

#include "twoloop/app/commands.hpp"
#include "twoloop/benchmarks/formulas.hpp"
#include "twoloop/core/error.hpp"
#include "twoloop/core/fitness.hpp"
#include "twoloop/core/log.hpp"

struct twoloop_options {
  twoloop::app::Overrides overrides;
};

struct twoloop_report {
  twoloop::app::RunReport report;
  std::string summary;
  std::vector<std::string> warnings;
};

namespace {

thread_local std::string last_error;

twoloop_status fail(twoloop_status status, const std::string& message) {
  last_error = message;
  return status;
}

twoloop_status status_of(twoloop::app::Phase phase) {
  using twoloop::app::Phase;
  switch (phase) {
    case Phase::Config: return TWOLOOP_ERR_CONFIG;
    case Phase::Checkpoint: return TWOLOOP_ERR_CHECKPOINT;
    case Phase::EmptyTrajectory: return TWOLOOP_ERR_EMPTY_TRAJECTORY;
    case Phase::Run: return TWOLOOP_ERR_RUN;
  }
  return TWOLOOP_ERR_INTERNAL;
}

/// Runs `body`, translating exceptions into status codes.
template <class F>
twoloop_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const twoloop::app::CommandError& ex) {
    return fail(status_of(ex.phase()), ex.what());
  } catch (const twoloop::Error& ex) {
    switch (ex.kind()) {
      case twoloop::ErrorKind::Config: return fail(TWOLOOP_ERR_CONFIG, ex.what());
      case twoloop::ErrorKind::EvaluationFailed: return fail(TWOLOOP_ERR_INVALID_ARGUMENT, ex.what());
      default: return fail(TWOLOOP_ERR_INTERNAL, ex.what());
    }
  } catch (const std::bad_alloc&) {
    return fail(TWOLOOP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& ex) {
    return fail(TWOLOOP_ERR_INTERNAL, ex.what());
  } catch (...) {
    return fail(TWOLOOP_ERR_INTERNAL, "unknown error");
  }
}

twoloop::app::Overrides overrides_of(const twoloop_options* options) {
  return options != nullptr ? options->overrides : twoloop::app::Overrides{};
}

void hand_out(twoloop_report** out, twoloop::app::RunReport report) {
  if (out == nullptr) return;
  auto* r = new twoloop_report;
  r->summary = report.summary.is_null() ? "" : report.summary.dump(2);
  r->report = std::move(report);
  *out = r;
}

}  // namespace

extern "C" {

const char* twoloop_version(void) { return "1.0.0"; }

const char* twoloop_status_string(twoloop_status status) {
  switch (status) {
    case TWOLOOP_OK: return "ok";
    case TWOLOOP_ERR_CONFIG: return "configuration error";
    case TWOLOOP_ERR_CHECKPOINT: return "checkpoint error";
    case TWOLOOP_ERR_EMPTY_TRAJECTORY: return "empty trajectory";
    case TWOLOOP_ERR_RUN: return "run failed";
    case TWOLOOP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TWOLOOP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* twoloop_last_error(void) { return last_error.c_str(); }

void twoloop_set_quiet(int quiet) {
  if (quiet != 0) {
    twoloop::set_log_sink({});
  } else {
    twoloop::set_log_sink([](twoloop::LogLevel level, const std::string& message) {
      std::cerr << (level == twoloop::LogLevel::Warning ? "warning: " : "") << message << '\n';
    });
  }
}

twoloop_status twoloop_options_new(twoloop_options** out) {
  if (out == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null output pointer");
  return guarded([&] {
    *out = new twoloop_options;
    return TWOLOOP_OK;
  });
}

void twoloop_options_free(twoloop_options* options) { delete options; }

twoloop_status twoloop_options_set_seed(twoloop_options* options, uint64_t seed) {
  if (options == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null options");
  options->overrides.seed = seed;
  return TWOLOOP_OK;
}

twoloop_status twoloop_options_set_max_parallel(twoloop_options* options, size_t n) {
  if (options == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null options");
  if (n < 1) return fail(TWOLOOP_ERR_CONFIG, "max_parallel must be at least 1");
  options->overrides.max_parallel = n;
  return TWOLOOP_OK;
}

twoloop_status twoloop_options_set_generations(twoloop_options* options, size_t n) {
  if (options == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null options");
  if (n < 1) return fail(TWOLOOP_ERR_CONFIG, "generations must be at least 1");
  options->overrides.generations = n;
  return TWOLOOP_OK;
}

twoloop_status twoloop_options_set_stop_after(twoloop_options* options, size_t n) {
  if (options == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null options");
  if (n < 1) return fail(TWOLOOP_ERR_CONFIG, "stop_after must be at least 1");
  options->overrides.stop_after = n;
  return TWOLOOP_OK;
}

twoloop_status twoloop_run(const char* config_path, const twoloop_options* options,
                           twoloop_report** report) {
  if (config_path == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null config path");
  return guarded([&] {
    hand_out(report, twoloop::app::run_command(config_path, overrides_of(options)));
    return TWOLOOP_OK;
  });
}

twoloop_status twoloop_resume(const char* results_dir, const twoloop_options* options,
                              twoloop_report** report) {
  if (results_dir == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null results directory");
  return guarded([&] {
    hand_out(report, twoloop::app::resume_command(results_dir, overrides_of(options)));
    return TWOLOOP_OK;
  });
}

twoloop_status twoloop_export(const char* results_dir, const char* out_csv, size_t* rows) {
  if (results_dir == nullptr || out_csv == nullptr) {
    return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null path");
  }
  return guarded([&] {
    const std::size_t n = twoloop::app::export_command(results_dir, out_csv);
    if (rows != nullptr) *rows = n;
    return TWOLOOP_OK;
  });
}

twoloop_status twoloop_validate(const char* config_path, twoloop_report** report) {
  if (config_path == nullptr) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null config path");
  return guarded([&] {
    auto warnings = twoloop::app::validate_command(config_path);
    if (report != nullptr) {
      auto* r = new twoloop_report;
      r->warnings = std::move(warnings);
      *report = r;
    }
    return TWOLOOP_OK;
  });
}

void twoloop_report_free(twoloop_report* report) { delete report; }

size_t twoloop_report_generations(const twoloop_report* report) {
  return report != nullptr ? report->report.generations_executed : 0;
}

int twoloop_report_completed(const twoloop_report* report) {
  return report != nullptr && report->report.completed ? 1 : 0;
}

int twoloop_report_already_complete(const twoloop_report* report) {
  return report != nullptr && report->report.already_complete ? 1 : 0;
}

const char* twoloop_report_summary(const twoloop_report* report) {
  return report != nullptr ? report->summary.c_str() : "";
}

size_t twoloop_report_warning_count(const twoloop_report* report) {
  return report != nullptr ? report->warnings.size() : 0;
}

const char* twoloop_report_warning(const twoloop_report* report, size_t i) {
  if (report == nullptr || i >= report->warnings.size()) return "";
  return report->warnings[i].c_str();
}

twoloop_status twoloop_weight_fitness(const double* fitness, const double* weights, size_t k,
                                      double* out) {
  if (fitness == nullptr || weights == nullptr || out == nullptr) {
    return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null pointer");
  }
  return guarded([&] {
    *out = twoloop::weight_fitness({fitness, k}, {weights, k});
    return TWOLOOP_OK;
  });
}

twoloop_status twoloop_softmax(const double* x, size_t n, double* out) {
  if ((x == nullptr || out == nullptr) && n > 0) return fail(TWOLOOP_ERR_INVALID_ARGUMENT, "null pointer");
  return guarded([&] {
    const auto p = twoloop::benchmarks::softmax({x, n});
    std::copy(p.begin(), p.end(), out);
    return TWOLOOP_OK;
  });
}

}  // extern "C"
