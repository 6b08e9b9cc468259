#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace twoloop {

using Json = nlohmann::ordered_json;

using FitnessVector = std::vector<double>;
using FitnessWeights = std::vector<double>;

struct Parameter {
  std::string name;
  std::vector<double> value;

  bool operator==(const Parameter&) const = default;
};

/// One candidate parameter set. Parameters keep declaration order.
struct Individual {
  std::size_t generation = 0;
  std::size_t index = 0;
  std::vector<Parameter> params;

  const Parameter* find(std::string_view name) const;
  std::size_t dimension() const;
  /// Concatenation of all parameter values in declaration order.
  std::vector<double> flatten() const;

  bool operator==(const Individual&) const = default;
};

struct ParameterBounds {
  std::string name;
  std::vector<double> lower;
  std::vector<double> upper;
  bool integer = false;

  std::size_t size() const { return lower.size(); }
};

/// Bounds per named parameter. Also serves as the parameter layout of a run:
/// names, per-name dimensions and their order.
class Bounds {
 public:
  Bounds() = default;
  explicit Bounds(std::vector<ParameterBounds> entries);

  void add(ParameterBounds entry);
  /// Scalar parameter shortcut.
  void add(std::string name, double lower, double upper, bool integer = false);
  /// Vector parameter with identical bounds per component.
  void add(std::string name, std::size_t size, double lower, double upper, bool integer = false);

  const ParameterBounds* find(std::string_view name) const;
  const std::vector<ParameterBounds>& entries() const { return entries_; }
  std::size_t dimension() const;
  std::vector<double> flat_lower() const;
  std::vector<double> flat_upper() const;

  /// Splits a flat vector back into named parameters.
  Individual unflatten(std::span<const double> flat, std::size_t generation = 0,
                       std::size_t index = 0) const;
  /// Uniform sample inside the bounds.
  template <class R>
  Individual sample(R& rng, std::size_t generation = 0, std::size_t index = 0) const {
    std::vector<double> flat(dimension());
    const auto lo = flat_lower();
    const auto hi = flat_upper();
    for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = rng.uniform(lo[i], hi[i]);
    return unflatten(flat, generation, index);
  }

 private:
  std::vector<ParameterBounds> entries_;
};

enum class EvalStatus { Ok, Failed, Timeout };

const char* to_string(EvalStatus status) noexcept;
EvalStatus status_from_string(std::string_view text);

/// One evaluated individual as stored in the trajectory.
struct Entry {
  Individual individual;
  FitnessVector fitness;
  double weighted_fitness = 0.0;
  double wall_time_s = 0.0;
  EvalStatus status = EvalStatus::Ok;
  /// Raw model observations (used by ensemble Kalman inversion). Not persisted.
  std::vector<double> model_output;
  std::string diagnostic;
};

struct GenerationRecord {
  std::size_t generation = 0;
  std::vector<Entry> entries;
  Json optimizer_snapshot;
};

/// Append-only history of a run.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::string run_name, std::uint64_t seed)
      : run_name_(std::move(run_name)), seed_(seed) {}

  const std::string& run_name() const { return run_name_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<GenerationRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Throws unless record.generation == size().
  void append(GenerationRecord record);

 private:
  std::string run_name_;
  std::uint64_t seed_ = 0;
  std::vector<GenerationRecord> records_;
};

}  // namespace twoloop
