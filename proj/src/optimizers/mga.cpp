#include "twoloop/optimizers/mga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"
#include "twoloop/optimizers/gradient.hpp"

namespace twoloop::optimizers {

MgaParams MgaParams::from_json(const Json& j, const std::string& pointer) {
  ParamReader r(j, pointer);
  MgaParams p;
  p.learning_rate = r.get("learning_rate", p.learning_rate);
  p.shrink = r.get("shrink", p.shrink);
  p.resolution = r.get("resolution", p.resolution);
  p.initial_width_fraction = r.get("initial_width_fraction", p.initial_width_fraction);
  p.keep_incumbent = r.get("keep_incumbent", p.keep_incumbent);
  r.finish();
  if (p.learning_rate < 0.0) throw config_error("learning_rate must be >= 0", r.pointer("learning_rate"));
  if (!(p.shrink > 0.0 && p.shrink <= 1.0)) {
    throw config_error("shrink must lie in (0, 1]", r.pointer("shrink"));
  }
  if (p.resolution < 1) throw config_error("resolution must be at least 1", r.pointer("resolution"));
  if (!(p.initial_width_fraction > 0.0 && p.initial_width_fraction <= 1.0)) {
    throw config_error("initial_width_fraction must lie in (0, 1]",
                       r.pointer("initial_width_fraction"));
  }
  return p;
}

Json MgaParams::to_json() const {
  return Json{{"learning_rate", learning_rate},
              {"shrink", shrink},
              {"resolution", resolution},
              {"initial_width_fraction", initial_width_fraction},
              {"keep_incumbent", keep_incumbent}};
}

ParameterRange fit_into(ParameterRange range, std::span<const double> lower,
                        std::span<const double> upper) {
  for (std::size_t i = 0; i < range.center.size(); ++i) {
    const double half_span = 0.5 * (upper[i] - lower[i]);
    if (range.half_width[i] >= half_span) {
      range.half_width[i] = half_span;
      range.center[i] = lower[i] + half_span;
      continue;
    }
    range.center[i] = std::clamp(range.center[i], lower[i] + range.half_width[i],
                                 upper[i] - range.half_width[i]);
  }
  return range;
}

std::vector<std::vector<double>> expand_range(const ParameterRange& range, std::size_t resolution) {
  const std::size_t d = range.center.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= resolution;
  std::vector<std::vector<double>> out;
  out.reserve(total);
  std::vector<std::size_t> digit(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> p(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (resolution == 1) {
        p[i] = range.center[i];
      } else {
        const double t = static_cast<double>(digit[i]) / static_cast<double>(resolution - 1);
        p[i] = range.center[i] - range.half_width[i] + 2.0 * range.half_width[i] * t;
      }
    }
    out.push_back(std::move(p));
    // Last dimension varies fastest.
    for (std::size_t i = d; i-- > 0;) {
      if (++digit[i] < resolution) break;
      digit[i] = 0;
    }
  }
  return out;
}

std::vector<ParameterRange> mga_step(const std::vector<FitnessBatch>& batches,
                                     const std::vector<ParameterRange>& ranges,
                                     const MgaParams& params, std::span<const double> lower,
                                     std::span<const double> upper) {
  if (batches.size() != ranges.size()) {
    throw config_error("multi-gradient ascent needs one range per batch");
  }
  std::vector<ParameterRange> out;
  out.reserve(batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    const auto& batch = batches[b];
    if (batch.points.empty()) {
      throw Error(ErrorKind::EvaluationFailed, "batch " + std::to_string(b) + " is empty");
    }
    if (batch.points.size() != batch.fitness.size()) {
      throw config_error("batch " + std::to_string(b) + " pairs points and fitnesses unevenly");
    }
    const auto best = rank_descending(batch.fitness).front();
    const auto gradient = estimate_gradient(batch.points, batch.fitness);
    ParameterRange next;
    next.center = batch.points[best];
    for (std::size_t i = 0; i < next.center.size(); ++i) {
      next.center[i] += params.learning_rate * gradient.gradient[i];
    }
    clamp_into(next.center, lower, upper);
    next.half_width = ranges[b].half_width;
    for (auto& w : next.half_width) w *= params.shrink;
    out.push_back(fit_into(std::move(next), lower, upper));
  }
  return out;
}

MgaOptimizer::MgaOptimizer(MgaParams params, OptimizerContext context)
    : params_(params),
      context_(std::move(context)),
      lower_(context_.bounds.flat_lower()),
      upper_(context_.bounds.flat_upper()) {
  batch_size_ = 1;
  for (std::size_t i = 0; i < lower_.size(); ++i) batch_size_ *= params_.resolution;
  if (context_.population_size % batch_size_ != 0) {
    throw config_error("multi-gradient ascent needs a population that is a multiple of " +
                       std::to_string(batch_size_) + " (resolution^dimensions), got " +
                       std::to_string(context_.population_size));
  }
  batches_ = context_.population_size / batch_size_;
}

std::vector<std::vector<double>> MgaOptimizer::compress() const {
  std::vector<std::vector<double>> out;
  out.reserve(context_.population_size);
  for (std::size_t b = 0; b < batches_; ++b) {
    auto grid = expand_range(ranges_[b], params_.resolution);
    if (params_.keep_incumbent && incumbents_[b]) {
      const auto& inc = incumbents_[b]->point;
      std::size_t nearest = 0;
      double nearest_dist = std::numeric_limits<double>::infinity();
      for (std::size_t n = 0; n < grid.size(); ++n) {
        double dist = 0.0;
        for (std::size_t i = 0; i < inc.size(); ++i) {
          const double range = upper_[i] - lower_[i];
          const double delta = range > 0.0 ? (grid[n][i] - inc[i]) / range : 0.0;
          dist += delta * delta;
        }
        if (dist < nearest_dist) {
          nearest_dist = dist;
          nearest = n;
        }
      }
      grid[nearest] = inc;
    }
    for (auto& p : grid) out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<double>> MgaOptimizer::initial_population(const Optimizee& optimizee,
                                                                  Rng& rng) {
  ranges_.clear();
  incumbents_.assign(batches_, std::nullopt);
  for (std::size_t b = 0; b < batches_; ++b) {
    ParameterRange range;
    range.center = optimizee.create_individual(rng).flatten();
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      range.half_width.push_back(params_.initial_width_fraction * 0.5 * (upper_[i] - lower_[i]));
    }
    ranges_.push_back(fit_into(std::move(range), lower_, upper_));
  }
  return compress();
}

std::vector<std::vector<double>> MgaOptimizer::step(const std::vector<Entry>& evaluated, Rng&) {
  if (evaluated.size() != batches_ * batch_size_) {
    throw Error(ErrorKind::State, "multi-gradient ascent received an unexpected population size");
  }
  // Expand: pair each batch's parameter combinations with their fitnesses.
  std::vector<FitnessBatch> batches(batches_);
  for (std::size_t b = 0; b < batches_; ++b) {
    for (std::size_t n = 0; n < batch_size_; ++n) {
      const auto& e = evaluated[b * batch_size_ + n];
      if (e.status != EvalStatus::Ok) continue;
      batches[b].points.push_back(e.individual.flatten());
      batches[b].fitness.push_back(e.weighted_fitness);
    }
    if (!batches[b].points.empty()) {
      const auto best = rank_descending(batches[b].fitness).front();
      if (!incumbents_[b] || batches[b].fitness[best] > incumbents_[b]->fitness) {
        incumbents_[b] = Incumbent{batches[b].points[best], batches[b].fitness[best]};
      }
    }
  }
  ranges_ = mga_step(batches, ranges_, params_, lower_, upper_);
  return compress();
}

Json MgaOptimizer::snapshot() const {
  Json ranges = Json::array();
  for (std::size_t b = 0; b < ranges_.size(); ++b) {
    Json r{{"center", ranges_[b].center}, {"half_width", ranges_[b].half_width}};
    if (incumbents_[b]) {
      r["incumbent"] = Json{{"point", incumbents_[b]->point}, {"fitness", incumbents_[b]->fitness}};
    }
    ranges.push_back(std::move(r));
  }
  return Json{{"kind", "mga"},
              {"learning_rate", params_.learning_rate},
              {"shrink", params_.shrink},
              {"ranges", std::move(ranges)}};
}

void MgaOptimizer::restore(const Json& snapshot) {
  ranges_.clear();
  incumbents_.clear();
  for (const auto& r : snapshot.at("ranges")) {
    ranges_.push_back({r.at("center").get<std::vector<double>>(),
                       r.at("half_width").get<std::vector<double>>()});
    if (r.contains("incumbent")) {
      incumbents_.push_back(Incumbent{r["incumbent"].at("point").get<std::vector<double>>(),
                                      r["incumbent"].at("fitness").get<double>()});
    } else {
      incumbents_.emplace_back(std::nullopt);
    }
  }
  if (ranges_.size() != batches_) throw Error(ErrorKind::State, "snapshot has the wrong batch count");
}

}  // namespace twoloop::optimizers
