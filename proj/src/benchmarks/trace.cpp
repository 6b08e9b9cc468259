#include "twoloop/benchmarks/trace.hpp"

#include <cmath>
#include <numbers>

#include "twoloop/core/error.hpp"

namespace twoloop::benchmarks {

std::vector<double> oscillator_trace(const OscillatorParams& p, double tau, std::size_t samples,
                                     double stimulus) {
  std::vector<double> out(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = static_cast<double>(k) * tau;
    out[k] = p.offset + stimulus * p.amplitude * std::exp(-p.decay * t) *
                            std::sin(2.0 * std::numbers::pi * p.frequency * t);
  }
  return out;
}

double trace_loss(std::span<const double> reference, std::span<const double> simulated) {
  if (reference.size() != simulated.size() || reference.size() < 2) {
    throw config_error("trace_loss needs two traces of equal length >= 2");
  }
  const auto T = static_cast<double>(reference.size() - 1);
  double sum = 0.0;
  for (std::size_t t = 0; t < reference.size(); ++t) {
    const double d = reference[t] - simulated[t];
    sum += d * d;
  }
  return -sum / (T * T);
}

double trace_fitness(const OscillatorParams& p, const TraceTask& task, double stimulus) {
  const auto sim = oscillator_trace(p, task.tau, task.reference.size(), stimulus);
  return trace_loss(task.reference, sim);
}

std::size_t count_upward_crossings(std::span<const double> trace, double threshold) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i - 1] < threshold && threshold <= trace[i]) ++n;
  }
  return n;
}

double spike_count_fitness(std::span<const double> trace, double threshold, double tau) {
  if (trace.empty()) return 0.0;
  const double duration = static_cast<double>(trace.size()) * tau;
  return static_cast<double>(count_upward_crossings(trace, threshold)) / duration;
}

std::vector<double> trace_fitness_vector(const OscillatorParams& p,
                                         const std::vector<TraceTask>& tasks,
                                         std::span<const double> stimuli, double threshold) {
  if (tasks.size() != stimuli.size()) {
    throw config_error("one reference trace per stimulus is required");
  }
  std::vector<double> out;
  out.reserve(2 * tasks.size());
  for (std::size_t s = 0; s < tasks.size(); ++s) {
    const auto sim = oscillator_trace(p, tasks[s].tau, tasks[s].reference.size(), stimuli[s]);
    out.push_back(trace_loss(tasks[s].reference, sim));
    out.push_back(spike_count_fitness(sim, threshold, tasks[s].tau));
  }
  return out;
}

}  // namespace twoloop::benchmarks
