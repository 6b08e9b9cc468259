#include "twoloop/optimizers/grid.hpp"

#include <cstdio>

#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::optimizers {

std::vector<double> axis_values(const GridAxis& axis) {
  if (axis.resolution < 1) throw config_error("grid resolution must be at least 1");
  std::vector<double> out(axis.resolution);
  if (axis.resolution == 1) {
    out[0] = axis.lower;
    return out;
  }
  const double span = axis.upper - axis.lower;
  const auto last = static_cast<double>(axis.resolution - 1);
  for (std::size_t i = 0; i < axis.resolution; ++i) {
    out[i] = axis.lower + span * (static_cast<double>(i) / last);
  }
  out.back() = axis.upper;
  return out;
}

std::size_t grid_point_count(std::span<const GridAxis> axes, std::size_t cap) {
  std::size_t count = 1;
  bool over = false;
  // Keep multiplying in long double to report the true count on refusal.
  long double exact = 1.0L;
  for (const auto& axis : axes) {
    if (axis.resolution < 1) throw config_error("grid resolution must be at least 1");
    exact *= static_cast<long double>(axis.resolution);
    if (!over && count > cap / axis.resolution) over = true;
    if (!over) count *= axis.resolution;
  }
  if (over || count > cap) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.0Lf", exact);
    throw config_error("grid has " + std::string(buf) + " points, more than the cap of " +
                       std::to_string(cap));
  }
  return count;
}

std::vector<double> grid_point(std::span<const GridAxis> axes, std::size_t n) {
  std::vector<double> out(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    const auto& axis = axes[i];
    const std::size_t digit = n % axis.resolution;
    n /= axis.resolution;
    if (axis.resolution == 1) {
      out[i] = axis.lower;
    } else if (digit + 1 == axis.resolution) {
      out[i] = axis.upper;
    } else {
      out[i] = axis.lower + (axis.upper - axis.lower) *
                                (static_cast<double>(digit) /
                                 static_cast<double>(axis.resolution - 1));
    }
  }
  return out;
}

std::vector<std::vector<std::vector<double>>> grid_search_plan(std::span<const GridAxis> axes,
                                                               std::size_t population_size,
                                                               std::size_t cap) {
  if (population_size < 1) throw config_error("population size must be at least 1");
  const std::size_t total = grid_point_count(axes, cap);
  std::vector<std::vector<std::vector<double>>> plan;
  for (std::size_t start = 0; start < total; start += population_size) {
    std::vector<std::vector<double>> generation;
    for (std::size_t k = 0; k < population_size; ++k) {
      generation.push_back(grid_point(axes, (start + k) % total));
    }
    plan.push_back(std::move(generation));
  }
  return plan;
}

GridParams GridParams::from_json(const Json& j, const Bounds& bounds, const std::string& pointer) {
  ParamReader r(j, pointer);
  GridParams p;
  p.resolution_spec = r.has("resolution") ? r.raw("resolution") : Json(10);
  p.max_points = r.get("max_points", p.max_points);
  r.finish();

  const auto res_pointer = r.pointer("resolution");
  auto positive = [&](const Json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      throw config_error("grid resolution must be a positive integer", where);
    }
    return v.get<std::size_t>();
  };
  const Json& spec = p.resolution_spec;
  if (spec.is_number()) {
    const auto n = positive(spec, res_pointer);
    p.resolutions.assign(bounds.dimension(), n);
  } else if (spec.is_object()) {
    for (const auto& [name, value] : spec.items()) {
      if (bounds.find(name) == nullptr) {
        throw config_error("grid resolution names unknown parameter '" + name + "'",
                           res_pointer + "/" + name);
      }
    }
    for (const auto& entry : bounds.entries()) {
      if (!spec.contains(entry.name)) {
        throw config_error("grid resolution missing for parameter '" + entry.name + "'",
                           res_pointer);
      }
      const Json& v = spec.at(entry.name);
      const auto where = res_pointer + "/" + entry.name;
      if (v.is_array()) {
        if (v.size() != entry.size()) {
          throw config_error("grid resolution for '" + entry.name + "' needs " +
                                 std::to_string(entry.size()) + " values",
                             where);
        }
        for (const auto& item : v) p.resolutions.push_back(positive(item, where));
      } else {
        p.resolutions.insert(p.resolutions.end(), entry.size(), positive(v, where));
      }
    }
  } else {
    throw config_error("grid resolution must be an integer or an object", res_pointer);
  }
  return p;
}

Json GridParams::to_json() const {
  return Json{{"resolution", resolution_spec}, {"max_points", max_points}};
}

GridSearchOptimizer::GridSearchOptimizer(const GridParams& params, OptimizerContext context)
    : context_(std::move(context)) {
  const auto lo = context_.bounds.flat_lower();
  const auto hi = context_.bounds.flat_upper();
  if (params.resolutions.size() != lo.size()) {
    throw config_error("grid resolutions do not cover every parameter component");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) axes_.push_back({lo[i], hi[i], params.resolutions[i]});
  total_ = grid_point_count(axes_, params.max_points);
}

std::vector<std::vector<double>> GridSearchOptimizer::next_batch() {
  std::vector<std::vector<double>> out;
  out.reserve(context_.population_size);
  for (std::size_t k = 0; k < context_.population_size; ++k) {
    out.push_back(grid_point(axes_, (cursor_ + k) % total_));
  }
  cursor_ += context_.population_size;
  return out;
}

std::vector<std::vector<double>> GridSearchOptimizer::initial_population(const Optimizee&, Rng&) {
  cursor_ = 0;
  evaluated_ = 0;
  return next_batch();
}

std::vector<std::vector<double>> GridSearchOptimizer::step(const std::vector<Entry>& evaluated,
                                                          Rng&) {
  evaluated_ += evaluated.size();
  if (exhausted()) {
    // Placeholder population; the engine stops before evaluating it.
    std::vector<std::vector<double>> out;
    for (std::size_t k = 0; k < context_.population_size; ++k) {
      out.push_back(grid_point(axes_, k % total_));
    }
    return out;
  }
  return next_batch();
}

Json GridSearchOptimizer::snapshot() const {
  Json axes = Json::array();
  for (const auto& a : axes_) {
    axes.push_back(Json{{"lower", a.lower}, {"upper", a.upper}, {"resolution", a.resolution}});
  }
  return Json{{"kind", "grid"}, {"axes", std::move(axes)}, {"cursor", cursor_},
              {"evaluated", evaluated_}, {"total", total_}};
}

void GridSearchOptimizer::restore(const Json& snapshot) {
  axes_.clear();
  for (const auto& a : snapshot.at("axes")) {
    axes_.push_back({a.at("lower").get<double>(), a.at("upper").get<double>(),
                     a.at("resolution").get<std::size_t>()});
  }
  cursor_ = snapshot.at("cursor").get<std::size_t>();
  evaluated_ = snapshot.at("evaluated").get<std::size_t>();
  total_ = snapshot.at("total").get<std::size_t>();
}

}  // namespace twoloop::optimizers
