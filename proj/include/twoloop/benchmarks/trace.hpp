#pragma once

#include <span>
#include <vector>

namespace twoloop::benchmarks {

/// Damped oscillator U(t) = offset + amplitude * exp(-decay t) * sin(2 pi frequency t).
struct OscillatorParams {
  double amplitude = 10.0;
  double decay = 3.0;
  double frequency = 4.0;
  double offset = -50.0;
};

/// Samples U at t = k * tau for k = 0 .. samples-1.
std::vector<double> oscillator_trace(const OscillatorParams& p, double tau, std::size_t samples,
                                     double stimulus = 1.0);

/// -(1/T^2) sum_{t=0}^{T} (ref - sim)^2 over T + 1 samples. Requires equal
/// lengths of at least 2.
double trace_loss(std::span<const double> reference, std::span<const double> simulated);

struct TraceTask {
  std::vector<double> reference;
  double tau = 0.005;
};

/// Simulates the oscillator on the task's sampling grid and scores it with
/// trace_loss. The stimulus scales the amplitude.
double trace_fitness(const OscillatorParams& p, const TraceTask& task, double stimulus = 1.0);

/// Number of upward crossings x[i-1] < threshold <= x[i].
std::size_t count_upward_crossings(std::span<const double> trace, double threshold);

/// Upward crossings per second over a trace of n samples spaced tau apart
/// (duration n * tau).
double spike_count_fitness(std::span<const double> trace, double threshold, double tau);

/// (L(I0), S(I0), L(I1), S(I1), ...) for one reference trace per stimulus.
std::vector<double> trace_fitness_vector(const OscillatorParams& p,
                                         const std::vector<TraceTask>& tasks,
                                         std::span<const double> stimuli, double threshold);

}  // namespace twoloop::benchmarks
