#include "twoloop/benchmarks/mountain_car.hpp"

#include <algorithm>
#include <cmath>

#include "twoloop/core/error.hpp"

namespace twoloop::benchmarks::mountain_car {

State step(State s, Action a) {
  const double force = static_cast<double>(static_cast<int>(a) - 1);
  s.velocity += force * kForce - kGravity * std::cos(3.0 * s.position);
  s.velocity = std::clamp(s.velocity, -kMaxSpeed, kMaxSpeed);
  s.position += s.velocity;
  s.position = std::clamp(s.position, kMinPosition, kMaxPosition);
  if (s.position == kMinPosition && s.velocity < 0.0) s.velocity = 0.0;
  return s;
}

std::size_t bin_index(double value, double lo, double hi, std::size_t n) {
  const double width = (hi - lo) / static_cast<double>(n);
  const double k = std::floor((value - lo) / width);
  if (!(k > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(k), n - 1);
}

std::array<double, kInputs> encode(const State& s) {
  std::array<double, kInputs> in{};
  in[bin_index(s.position, kMinPosition, kMaxPosition)] = 1.0;
  in[kBins + bin_index(s.velocity, kEncodeVelocityMin, kEncodeVelocityMax)] = 1.0;
  return in;
}

std::array<double, kOutputs> network_outputs(std::span<const double> weights,
                                             const std::array<double, kInputs>& input) {
  std::array<double, kHidden> hidden{};
  for (std::size_t i = 0; i < kInputs; ++i) {
    if (input[i] == 0.0) continue;
    for (std::size_t h = 0; h < kHidden; ++h) hidden[h] += input[i] * weights[i * kHidden + h];
  }
  for (double& h : hidden) h = std::max(h, 0.0);
  const auto w2 = weights.subspan(kInputHiddenWeights);
  std::array<double, kOutputs> out{};
  for (std::size_t h = 0; h < kHidden; ++h) {
    for (std::size_t o = 0; o < kOutputs; ++o) out[o] += hidden[h] * w2[h * kOutputs + o];
  }
  for (double& o : out) o = std::max(o, 0.0);
  return out;
}

Action select_action(const std::array<double, kOutputs>& outputs) {
  const double best = *std::max_element(outputs.begin(), outputs.end());
  const auto winners = std::count(outputs.begin(), outputs.end(), best);
  if (winners > 1) return Action::Nothing;
  return static_cast<Action>(std::max_element(outputs.begin(), outputs.end()) - outputs.begin());
}

Episode run_episode(std::span<const double> weights, State start) {
  if (weights.size() != kWeightCount) {
    throw config_error("mountain car policy needs " + std::to_string(kWeightCount) +
                       " weights, got " + std::to_string(weights.size()));
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw Error(ErrorKind::EvaluationFailed, "non-finite policy weight");
  }
  Episode ep;
  State s = start;
  ep.max_position = s.position;
  while (ep.steps < kMaxSteps && s.position < kGoalPosition) {
    s = step(s, select_action(network_outputs(weights, encode(s))));
    ++ep.steps;
    ep.max_position = std::max(ep.max_position, s.position);
  }
  ep.reached_goal = s.position >= kGoalPosition;
  return ep;
}

}  // namespace twoloop::benchmarks::mountain_car
