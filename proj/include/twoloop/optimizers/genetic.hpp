#pragma once

#include <span>
#include <vector>

#include "twoloop/core/rng.hpp"
#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::optimizers {

struct GaParams {
  std::size_t tournament_size = 3;
  /// Blend crossover extension alpha.
  double blend_alpha = 0.5;
  double crossover_probability = 0.7;
  /// Probability that an offspring is mutated at all.
  double mutation_probability = 0.2;
  /// Per-gene probability once an offspring mutates.
  double gene_mutation_probability = 0.1;
  /// Mutation standard deviation as a fraction of each gene's bound range.
  double mutation_sigma_fraction = 0.1;
  std::size_t hall_of_fame_size = 5;
  /// Hall-of-fame members reinjected per generation; defaults to all of them.
  std::size_t elite_count = 5;

  static GaParams from_json(const Json& j, const std::string& pointer);
  Json to_json() const;
};

struct HallOfFameMember {
  std::vector<double> params;
  double weighted_fitness = 0.0;
};

struct GaState {
  /// Best-ever individuals, best first.
  std::vector<HallOfFameMember> hall_of_fame;
  /// Number of completed steps; positions the per-generation random stream.
  std::size_t steps = 0;

  Json to_json() const;
  static GaState from_json(const Json& j);
};

struct GaStepResult {
  std::vector<std::vector<double>> population;
  GaState state;
};

/// Tournament selection, blend crossover, Gaussian mutation, hall-of-fame
/// update and elitism. Throws EvaluationFailed when no entry is ok; the input
/// state is never modified.
GaStepResult ga_step(const std::vector<Entry>& evaluated, const GaState& state,
                     const GaParams& params, std::span<const double> lower,
                     std::span<const double> upper, Rng& rng);

/// Merges ok entries into the hall of fame, keeping the best `capacity`
/// distinct members. Existing members win ties against newcomers.
std::vector<HallOfFameMember> update_hall_of_fame(const std::vector<HallOfFameMember>& current,
                                                  const std::vector<Entry>& evaluated,
                                                  std::size_t capacity);

class GeneticOptimizer : public Optimizer {
 public:
  GeneticOptimizer(GaParams params, OptimizerContext context);

  std::string_view id() const override { return "ga"; }
  std::vector<std::vector<double>> initial_population(const Optimizee& optimizee,
                                                      Rng& rng) override;
  std::vector<std::vector<double>> step(const std::vector<Entry>& evaluated, Rng& rng) override;
  Json snapshot() const override { return state_.to_json(); }
  void restore(const Json& snapshot) override { state_ = GaState::from_json(snapshot); }

  const GaState& state() const { return state_; }

 private:
  GaParams params_;
  OptimizerContext context_;
  GaState state_;
};

}  // namespace twoloop::optimizers
