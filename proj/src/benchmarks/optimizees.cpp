#include "twoloop/benchmarks/optimizees.hpp"

#include <algorithm>

#include "twoloop/benchmarks/formulas.hpp"
#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"

namespace twoloop::benchmarks {

namespace {

const std::vector<double>& values_of(const Individual& ind, std::string_view name) {
  const Parameter* p = ind.find(name);
  if (p == nullptr) throw config_error("individual lacks parameter '" + std::string(name) + "'");
  return p->value;
}

double scalar_of(const Individual& ind, std::string_view name) {
  const auto& v = values_of(ind, name);
  if (v.size() != 1) throw config_error("parameter '" + std::string(name) + "' must be scalar");
  return v[0];
}

}  // namespace

AnalyticOptimizee::AnalyticOptimizee(std::string function, std::size_t dimension, double lower,
                                     double upper)
    : function_(std::move(function)) {
  if (dimension < 1) throw config_error("analytic function dimension must be at least 1");
  const std::vector<double> probe(dimension, 0.0);
  analytic_function(function_, probe);
  bounds_.add("x", dimension, lower, upper);
}

Evaluation AnalyticOptimizee::simulate(const Individual& individual, const EvalContext&) const {
  return {{analytic_function(function_, values_of(individual, "x"))}, {}};
}

ClassifierOptimizee::ClassifierOptimizee(const BlobSpec& spec, double lower, double upper)
    : data_(make_blobs(spec)) {
  bounds_.add("weights", data_.inputs() * data_.classes, lower, upper);
}

Evaluation ClassifierOptimizee::simulate(const Individual& individual, const EvalContext&) const {
  const auto predictions = classifier_predictions(data_, values_of(individual, "weights"));
  Evaluation ev;
  ev.fitness = {mse_fitness(predictions, data_.labels)};
  for (const auto& p : predictions) ev.model_output.insert(ev.model_output.end(), p.begin(), p.end());
  return ev;
}

std::optional<std::vector<double>> ClassifierOptimizee::observation_target() const {
  std::vector<double> target;
  for (const auto& y : data_.labels) target.insert(target.end(), y.begin(), y.end());
  return target;
}

TraceOptimizee::TraceOptimizee(TraceSettings settings, Bounds bounds)
    : settings_(std::move(settings)), bounds_(std::move(bounds)) {
  if (settings_.samples < 2) throw config_error("trace needs at least 2 samples");
  if (!(settings_.tau > 0.0)) throw config_error("sampling interval must be positive");
  if (settings_.stimuli.empty()) throw config_error("trace needs at least one stimulus");
  for (const char* name : {"amplitude", "decay", "frequency", "offset"}) {
    const auto* b = bounds_.find(name);
    if (b == nullptr || b->size() != 1) {
      throw config_error(std::string("trace bounds need a scalar '") + name + "'");
    }
  }
  for (double s : settings_.stimuli) {
    tasks_.push_back({oscillator_trace(settings_.reference, settings_.tau, settings_.samples, s),
                      settings_.tau});
  }
}

std::size_t TraceOptimizee::fitness_length() const {
  return settings_.stimuli.size() * (settings_.spike_threshold ? 2 : 1);
}

Bounds TraceOptimizee::default_bounds() {
  Bounds b;
  b.add("amplitude", 0.0, 20.0);
  b.add("decay", 0.0, 10.0);
  b.add("frequency", 0.5, 10.0);
  b.add("offset", -70.0, -30.0);
  return b;
}

OscillatorParams TraceOptimizee::params_of(const Individual& individual) {
  return {scalar_of(individual, "amplitude"), scalar_of(individual, "decay"),
          scalar_of(individual, "frequency"), scalar_of(individual, "offset")};
}

Evaluation TraceOptimizee::simulate(const Individual& individual, const EvalContext&) const {
  const OscillatorParams p = params_of(individual);
  if (settings_.spike_threshold) {
    return {trace_fitness_vector(p, tasks_, settings_.stimuli, *settings_.spike_threshold), {}};
  }
  Evaluation ev;
  for (std::size_t s = 0; s < tasks_.size(); ++s) {
    ev.fitness.push_back(trace_fitness(p, tasks_[s], settings_.stimuli[s]));
  }
  return ev;
}

FcMatchOptimizee::FcMatchOptimizee(FcMatchSettings settings) : settings_(std::move(settings)) {
  sc_ = settings_.sc ? *settings_.sc : random_sc(settings_.nodes, settings_.sc_seed);
  if (sc_.size() < 2) throw config_error("network needs at least 2 nodes");
  double max_sc = 0.0;
  for (const auto& row : sc_) {
    if (row.size() != sc_.size()) throw config_error("connectivity matrix must be square");
    for (double v : row) max_sc = std::max(max_sc, v);
  }
  if (!(max_sc > 0.0)) throw config_error("connectivity matrix needs a positive entry");
  for (auto& row : sc_) {
    for (double& v : row) v /= max_sc;
  }
  if (!(settings_.speed_min > 0.0) || settings_.speed_max < settings_.speed_min) {
    throw config_error("speed bounds must satisfy 0 < min <= max");
  }
  const double g_max =
      settings_.coupling_max ? *settings_.coupling_max : 0.95 * settings_.decay / spectral_radius(sc_);
  bounds_.add("g", 0.0, g_max);
  bounds_.add("speed", settings_.speed_min, settings_.speed_max);
}

double FcMatchOptimizee::fitness_at(double coupling, double speed) const {
  NetworkTask task;
  task.sc = sc_;
  task.coupling = coupling;
  task.delay_steps = delay_steps_for(settings_.tract_length, speed, settings_.dt);
  task.steps = settings_.steps;
  task.warmup = settings_.warmup;
  task.dt = settings_.dt;
  task.decay = settings_.decay;
  task.noise_sigma = settings_.noise_sigma;
  task.noise_seed = settings_.noise_seed;
  return fc_sc_fitness(simulate_network(task), sc_);
}

Evaluation FcMatchOptimizee::simulate(const Individual& individual, const EvalContext&) const {
  return {{fitness_at(scalar_of(individual, "g"), scalar_of(individual, "speed"))}, {}};
}

MountainCarOptimizee::MountainCarOptimizee(std::optional<double> start_position,
                                           double weight_bound)
    : start_position_(start_position) {
  if (!(weight_bound > 0.0)) throw config_error("weight bound must be positive");
  if (start_position_ && (*start_position_ < mountain_car::kMinPosition ||
                          *start_position_ > mountain_car::kMaxPosition)) {
    throw config_error("start position must lie in [-1.2, 0.6]");
  }
  bounds_.add("input_hidden", mountain_car::kInputHiddenWeights, -weight_bound, weight_bound);
  bounds_.add("hidden_output", mountain_car::kHiddenOutputWeights, -weight_bound, weight_bound);
}

Evaluation MountainCarOptimizee::simulate(const Individual& individual,
                                          const EvalContext& context) const {
  std::vector<double> weights = values_of(individual, "input_hidden");
  const auto& out = values_of(individual, "hidden_output");
  weights.insert(weights.end(), out.begin(), out.end());
  mountain_car::State start;
  if (start_position_) {
    start.position = *start_position_;
  } else {
    Rng rng(context.seed);
    start = mountain_car::random_start(rng);
  }
  return {{mountain_car::run_episode(weights, start).max_position}, {}};
}

ExternalOptimizee::ExternalOptimizee(Bounds bounds, runner::ExternalCommandSpec command)
    : bounds_(std::move(bounds)), command_(std::move(command)) {
  if (bounds_.dimension() == 0) throw config_error("external optimizee needs parameters");
  command_.validate();
}

Evaluation ExternalOptimizee::simulate(const Individual&, const EvalContext&) const {
  throw Error(ErrorKind::State, "the external optimizee is evaluated by the external runner");
}

const std::vector<std::string>& optimizee_ids() {
  static const std::vector<std::string> ids{"classifier", "trace_fit", "fc_match", "mountain_car",
                                            "sphere",     "rastrigin", "rosenbrock", "external"};
  return ids;
}

Bounds parse_bounds(const Json& list, const std::string& pointer) {
  if (!list.is_array() || list.empty()) {
    throw config_error("parameters must be a non-empty array", pointer);
  }
  Bounds bounds;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = pointer + "/" + std::to_string(i);
    ParamReader r(list[i], where);
    ParameterBounds pb;
    pb.name = r.require<std::string>("name");
    const auto size = r.get<std::size_t>("size", 1);
    pb.integer = r.get("integer", false);
    auto side = [&](const char* key) {
      const Json& v = r.raw(key);
      if (v.is_number()) return std::vector<double>(size, v.get<double>());
      if (v.is_array() && v.size() == size &&
          std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_number(); })) {
        return v.get<std::vector<double>>();
      }
      throw config_error(std::string("'") + key + "' must be a number or an array of " +
                             std::to_string(size) + " numbers",
                         r.pointer(key));
    };
    pb.lower = side("lower");
    pb.upper = side("upper");
    r.finish();
    if (size < 1) throw config_error("'size' must be at least 1", r.pointer("size"));
    try {
      bounds.add(std::move(pb));
    } catch (const Error& e) {
      throw config_error(e.what(), where);
    }
  }
  return bounds;
}

std::unique_ptr<Optimizee> make_optimizee(const std::string& id, const Json& params,
                                          const std::string& pointer) {
  ParamReader r(params, pointer);
  std::unique_ptr<Optimizee> out;
  if (id == "sphere" || id == "rastrigin" || id == "rosenbrock") {
    const double default_bound = id == "rosenbrock" ? 2.048 : 5.12;
    const auto dim = r.get<std::size_t>("dimension", 2);
    const double lower = r.get("lower", -default_bound);
    const double upper = r.get("upper", default_bound);
    out = std::make_unique<AnalyticOptimizee>(id, dim, lower, upper);
  } else if (id == "classifier") {
    BlobSpec spec;
    spec.classes = r.get("classes", spec.classes);
    spec.samples_per_class = r.get("samples_per_class", spec.samples_per_class);
    spec.separation = r.get("separation", spec.separation);
    spec.spread = r.get("spread", spec.spread);
    spec.seed = r.get("data_seed", spec.seed);
    const double lower = r.get("weight_lower", -5.0);
    const double upper = r.get("weight_upper", 5.0);
    out = std::make_unique<ClassifierOptimizee>(spec, lower, upper);
  } else if (id == "trace_fit") {
    TraceSettings s;
    s.samples = r.get("samples", s.samples);
    s.tau = r.get("tau", s.tau);
    s.stimuli = r.get("stimuli", s.stimuli);
    if (r.has("spike_threshold")) s.spike_threshold = r.get("spike_threshold", 0.0);
    if (r.has("reference")) {
      ParamReader ref(r.raw("reference"), r.pointer("reference"));
      s.reference.amplitude = ref.get("amplitude", s.reference.amplitude);
      s.reference.decay = ref.get("decay", s.reference.decay);
      s.reference.frequency = ref.get("frequency", s.reference.frequency);
      s.reference.offset = ref.get("offset", s.reference.offset);
      ref.finish();
    }
    Bounds bounds = r.has("parameters") ? parse_bounds(r.raw("parameters"), r.pointer("parameters"))
                                        : TraceOptimizee::default_bounds();
    out = std::make_unique<TraceOptimizee>(std::move(s), std::move(bounds));
  } else if (id == "fc_match") {
    FcMatchSettings s;
    s.nodes = r.get("nodes", s.nodes);
    s.sc_seed = r.get("sc_seed", s.sc_seed);
    if (r.has("sc_file")) {
      s.sc = read_sc_csv(r.get<std::string>("sc_file", ""));
    }
    s.steps = r.get("steps", s.steps);
    s.warmup = r.get("warmup", s.warmup);
    s.dt = r.get("dt", s.dt);
    s.decay = r.get("decay", s.decay);
    s.noise_sigma = r.get("noise_sigma", s.noise_sigma);
    s.noise_seed = r.get("noise_seed", s.noise_seed);
    s.tract_length = r.get("tract_length", s.tract_length);
    s.speed_min = r.get("speed_min", s.speed_min);
    s.speed_max = r.get("speed_max", s.speed_max);
    if (r.has("coupling_max")) s.coupling_max = r.get("coupling_max", 0.0);
    out = std::make_unique<FcMatchOptimizee>(std::move(s));
  } else if (id == "mountain_car") {
    std::optional<double> start;
    if (r.has("start_position")) start = r.get("start_position", 0.0);
    const double bound = r.get("weight_bound", 20.0);
    out = std::make_unique<MountainCarOptimizee>(start, bound);
  } else if (id == "external") {
    runner::ExternalCommandSpec spec;
    spec.command_template = r.require<std::string>("command");
    spec.expected_fitness_length = r.get("fitness_length", spec.expected_fitness_length);
    spec.kill_grace_seconds = r.get("kill_grace_seconds", spec.kill_grace_seconds);
    if (!r.has("parameters")) throw config_error("missing required key 'parameters'", r.pointer("parameters"));
    Bounds bounds = parse_bounds(r.raw("parameters"), r.pointer("parameters"));
    try {
      spec.validate();
    } catch (const Error& e) {
      throw config_error(e.what(), r.pointer("command"));
    }
    out = std::make_unique<ExternalOptimizee>(std::move(bounds), std::move(spec));
  } else {
    std::string known;
    for (const auto& k : optimizee_ids()) known += (known.empty() ? "" : ", ") + k;
    throw config_error("unknown optimizee '" + id + "' (known: " + known + ")", pointer);
  }
  r.finish();
  return out;
}

}  // namespace twoloop::benchmarks
