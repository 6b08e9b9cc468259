#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "twoloop/benchmarks/classifier.hpp"
#include "twoloop/benchmarks/mountain_car.hpp"
#include "twoloop/benchmarks/network.hpp"
#include "twoloop/benchmarks/trace.hpp"
#include "twoloop/core/engine.hpp"
#include "twoloop/runner/external.hpp"

namespace twoloop::benchmarks {

/// Negated analytic test function over one vector parameter `x`.
class AnalyticOptimizee : public Optimizee {
 public:
  AnalyticOptimizee(std::string function, std::size_t dimension, double lower, double upper);

  std::string_view id() const override { return function_; }
  const Bounds& bounds() const override { return bounds_; }
  std::size_t fitness_length() const override { return 1; }
  Evaluation simulate(const Individual& individual, const EvalContext& context) const override;

 private:
  std::string function_;
  Bounds bounds_;
};

/// Linear softmax readout `weights` (inputs x classes) on synthetic blobs.
/// Fitness is 1 - MSE; the model output is the concatenated softmax vectors
/// and the observation target the concatenated one-hot labels.
class ClassifierOptimizee : public Optimizee {
 public:
  ClassifierOptimizee(const BlobSpec& spec, double lower, double upper);

  std::string_view id() const override { return "classifier"; }
  const Bounds& bounds() const override { return bounds_; }
  std::size_t fitness_length() const override { return 1; }
  Evaluation simulate(const Individual& individual, const EvalContext& context) const override;
  std::optional<std::vector<double>> observation_target() const override;

  const ClassifierData& data() const { return data_; }

 private:
  ClassifierData data_;
  Bounds bounds_;
};

struct TraceSettings {
  OscillatorParams reference;
  std::size_t samples = 201;
  double tau = 0.005;
  std::vector<double> stimuli{1.0};
  /// When set, each stimulus contributes (loss, spike rate); otherwise only
  /// the loss.
  std::optional<double> spike_threshold;
};

/// Fits the damped-oscillator parameters amplitude, decay, frequency and
/// offset to reference traces generated from `reference`.
class TraceOptimizee : public Optimizee {
 public:
  TraceOptimizee(TraceSettings settings, Bounds bounds);

  std::string_view id() const override { return "trace_fit"; }
  const Bounds& bounds() const override { return bounds_; }
  std::size_t fitness_length() const override;
  Evaluation simulate(const Individual& individual, const EvalContext& context) const override;

  static Bounds default_bounds();
  static OscillatorParams params_of(const Individual& individual);

 private:
  TraceSettings settings_;
  Bounds bounds_;
  std::vector<TraceTask> tasks_;
};

struct FcMatchSettings {
  std::size_t nodes = 8;
  std::uint64_t sc_seed = 3;
  /// Replaces the random matrix when set.
  std::optional<Matrix> sc;
  std::size_t steps = 2000;
  std::size_t warmup = 200;
  double dt = 1.0;
  double decay = 0.1;
  double noise_sigma = 0.1;
  std::uint64_t noise_seed = 11;
  double tract_length = 40.0;
  double speed_min = 1.0;
  double speed_max = 20.0;
  /// Defaults to 0.95 * decay / spectral_radius(SC / max SC).
  std::optional<double> coupling_max;
};

/// Network benchmark over (g, speed). The noise realization is fixed, so the
/// fitness is a deterministic function of the two parameters.
class FcMatchOptimizee : public Optimizee {
 public:
  explicit FcMatchOptimizee(FcMatchSettings settings);

  std::string_view id() const override { return "fc_match"; }
  const Bounds& bounds() const override { return bounds_; }
  std::size_t fitness_length() const override { return 1; }
  Evaluation simulate(const Individual& individual, const EvalContext& context) const override;

  double fitness_at(double coupling, double speed) const;
  const Matrix& sc() const { return sc_; }

 private:
  FcMatchSettings settings_;
  Matrix sc_;
  Bounds bounds_;
};

/// Mountain car policy search over `input_hidden` (300) and
/// `hidden_output` (15) weights. Without a fixed start position the start is
/// drawn from the evaluation seed.
class MountainCarOptimizee : public Optimizee {
 public:
  MountainCarOptimizee(std::optional<double> start_position, double weight_bound);

  std::string_view id() const override { return "mountain_car"; }
  const Bounds& bounds() const override { return bounds_; }
  std::size_t fitness_length() const override { return 1; }
  Evaluation simulate(const Individual& individual, const EvalContext& context) const override;

 private:
  std::optional<double> start_position_;
  Bounds bounds_;
};

/// Optimizee evaluated by an external command through the file protocol.
/// It cannot be simulated in-process.
class ExternalOptimizee : public Optimizee {
 public:
  ExternalOptimizee(Bounds bounds, runner::ExternalCommandSpec command);

  std::string_view id() const override { return "external"; }
  const Bounds& bounds() const override { return bounds_; }
  std::size_t fitness_length() const override { return command_.expected_fitness_length; }
  Evaluation simulate(const Individual& individual, const EvalContext& context) const override;

  const runner::ExternalCommandSpec& command() const { return command_; }

 private:
  Bounds bounds_;
  runner::ExternalCommandSpec command_;
};

const std::vector<std::string>& optimizee_ids();

/// Builds an optimizee from its parameter block. `pointer` locates the
/// block in the config document for error messages.
std::unique_ptr<Optimizee> make_optimizee(const std::string& id, const Json& params,
                                          const std::string& pointer = "");

/// Parses `[{"name", "lower", "upper", "size"?, "integer"?}, ...]`; lower
/// and upper are numbers or arrays of length `size`.
Bounds parse_bounds(const Json& list, const std::string& pointer);

}  // namespace twoloop::benchmarks
