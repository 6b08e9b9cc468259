#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "twoloop/core/types.hpp"

namespace twoloop::app {

inline constexpr int kConfigVersion = 1;

/// Experiment description. Parameter blocks live at the top level under
/// their optimizer or optimizee id; `blocks` keeps every such block in
/// document order.
struct RunConfig {
  int version = kConfigVersion;
  std::string run_name;
  std::filesystem::path results_root = "results";
  std::string optimizee;
  std::string optimizer;
  Json blocks = Json::object();
  std::size_t population_size = 1;
  std::size_t generations = 1;
  /// Empty means one weight of 1.0 per fitness component.
  std::vector<double> fitness_weights;
  std::size_t max_parallel = 1;
  /// Zero disables the per-evaluation timeout.
  double timeout_seconds = 0.0;
  std::uint64_t seed = 0;
  double worst_fitness = 0.0;
  bool keep_workdirs = false;
  bool record_wall_time = false;

  const Json& optimizee_params() const;
  const Json& optimizer_params() const;
  std::filesystem::path results_dir() const { return results_root / run_name; }

  bool operator==(const RunConfig&) const = default;
};

/// Parses config text. Syntax and validation errors are Config errors whose
/// message is prefixed with `<source>:<line>:`.
RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Pretty-printed JSON with every field present.
std::string serialize_config(const RunConfig& config);

/// Line (1-based) of each JSON pointer that appears in `text`; keys map to
/// the line of the key itself. `text` must be valid JSON.
std::map<std::string, int> json_pointer_lines(const std::string& text);

/// Line of `pointer`, or of its closest ancestor present in the text.
int line_of_pointer(const std::map<std::string, int>& lines, std::string pointer);

/// `<source>:<line>: <pointer>: <message>` for an error raised while
/// interpreting the document `text`; the line is omitted when `text` is not
/// valid JSON.
std::string anchor_message(const std::exception& error, const std::string& text,
                           const std::string& source);

}  // namespace twoloop::app
