#pragma once

#include <array>
#include <span>
#include <vector>

namespace twoloop::benchmarks::mountain_car {

inline constexpr double kMinPosition = -1.2;
inline constexpr double kMaxPosition = 0.6;
inline constexpr double kMaxSpeed = 0.07;
inline constexpr double kGoalPosition = 0.5;
inline constexpr double kForce = 0.001;
inline constexpr double kGravity = 0.0025;
inline constexpr std::size_t kMaxSteps = 110;

/// Input encoding: 30 one-hot bins per variable, velocity binned over the
/// encoding range, not the dynamics clamp.
inline constexpr std::size_t kBins = 30;
inline constexpr double kEncodeVelocityMin = -0.7;
inline constexpr double kEncodeVelocityMax = 0.7;

inline constexpr std::size_t kInputs = 2 * kBins;
inline constexpr std::size_t kHidden = 5;
inline constexpr std::size_t kOutputs = 3;
inline constexpr std::size_t kInputHiddenWeights = kInputs * kHidden;
inline constexpr std::size_t kHiddenOutputWeights = kHidden * kOutputs;
inline constexpr std::size_t kWeightCount = kInputHiddenWeights + kHiddenOutputWeights;

enum class Action { Left = 0, Nothing = 1, Right = 2 };

struct State {
  double position = -0.5;
  double velocity = 0.0;
};

/// One step of the classic-control dynamics; the left wall zeroes a
/// negative velocity.
State step(State s, Action a);

/// Bin of `value` in [lo, hi] split into `n` bins of width (hi - lo) / n.
/// Values outside fall into the first or last bin.
std::size_t bin_index(double value, double lo, double hi, std::size_t n = kBins);

/// 60-element one-hot input (position bins first).
std::array<double, kInputs> encode(const State& s);

/// Feed-forward 60 -> 5 -> 3 rectifier network. Weights are row-major per
/// layer: w[input * kHidden + hidden], then w[hidden * kOutputs + output].
std::array<double, kOutputs> network_outputs(std::span<const double> weights,
                                             const std::array<double, kInputs>& input);

/// Argmax of the outputs; a tie for the maximum selects Nothing.
Action select_action(const std::array<double, kOutputs>& outputs);

struct Episode {
  double max_position = 0.0;
  std::size_t steps = 0;
  bool reached_goal = false;
};

/// Runs up to 110 steps from `start` (stopping at the goal) and reports the
/// maximum position reached, the start included. Throws Error(EvaluationFailed)
/// for non-finite weights and a Config error for the wrong weight count.
Episode run_episode(std::span<const double> weights, State start);

/// Gym's start distribution: position U(-0.6, -0.4), velocity 0.
template <class R>
State random_start(R& rng) {
  return State{rng.uniform(-0.6, -0.4), 0.0};
}

}  // namespace twoloop::benchmarks::mountain_car
