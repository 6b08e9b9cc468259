#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "twoloop/core/types.hpp"

namespace twoloop {

Json individual_to_json(const Individual& individual);
Individual individual_from_json(const Json& j);

/// Serializes a generation record as a single line of JSON (no newline).
/// When `with_wall_time` is false `wall_time_s` is written as null so that
/// seeded runs produce byte-identical files.
std::string record_to_line(const GenerationRecord& record, bool with_wall_time);
GenerationRecord record_from_json(const Json& j);

/// Reads every complete line of a trajectory file. A trailing line without a
/// newline terminator is an interrupted write and is ignored.
std::vector<GenerationRecord> read_trajectory_records(const std::filesystem::path& path);

/// Keeps only the first `records` complete lines of the file.
void truncate_trajectory(const std::filesystem::path& path, std::size_t records);

/// Appends whole lines with a single write per line on an O_APPEND descriptor.
class LineAppender {
 public:
  explicit LineAppender(const std::filesystem::path& path);
  ~LineAppender();
  LineAppender(const LineAppender&) = delete;
  LineAppender& operator=(const LineAppender&) = delete;

  void append(const std::string& line);

 private:
  int fd_ = -1;
  std::filesystem::path path_;
};

/// Everything needed to continue a run after generation `generation`.
struct Checkpoint {
  std::string run_name;
  std::uint64_t seed = 0;
  /// Last completed generation.
  std::size_t generation = 0;
  bool converged = false;
  std::vector<Individual> next_population;
  Json optimizer_snapshot;
};

Json checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const Json& j);

/// Writes to `<path>.tmp` and renames over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace twoloop
