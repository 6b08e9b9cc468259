#include "twoloop/app/config.hpp"

#include <algorithm>

#include "twoloop/benchmarks/optimizees.hpp"
#include "twoloop/core/error.hpp"
#include "twoloop/core/params.hpp"
#include "twoloop/core/trajectory_io.hpp"
#include "twoloop/optimizers/optimizer.hpp"

namespace twoloop::app {

namespace {

bool is_registered(const std::vector<std::string>& ids, const std::string& id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool is_block_name(const std::string& key) {
  return is_registered(optimizers::optimizer_ids(), key) ||
         is_registered(benchmarks::optimizee_ids(), key);
}

std::string known_list(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out.push_back(c);
  }
  return out;
}

/// Walks valid JSON text recording the line of every value.
class LineScanner {
 public:
  explicit LineScanner(const std::string& text) : text_(text) {}

  std::map<std::string, int> scan() {
    value("");
    return std::move(lines_);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') ++line_;
      if (c != ' ' && c != '\t' && c != '\n' && c != '\r') break;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        out.push_back(text_[pos_ + 1]);
        pos_ += 2;
        continue;
      }
      out.push_back(text_[pos_++]);
    }
    ++pos_;  // closing quote
    return out;
  }

  void value(const std::string& path) {
    skip_ws();
    lines_.emplace(path, line_);
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      while (true) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] == '}') break;
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        const int key_line = line_;
        const std::string key = string_token();
        const std::string child = path + "/" + escape_pointer_token(key);
        lines_.emplace(child, key_line);
        skip_ws();
        ++pos_;  // colon
        value(child);
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      std::size_t index = 0;
      while (true) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] == ']') break;
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        value(path + "/" + std::to_string(index++));
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && std::string_view(",]} \t\r\n").find(text_[pos_]) ==
                                        std::string_view::npos) {
        ++pos_;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

const Json& null_block() {
  static const Json null_json;
  return null_json;
}

RunConfig parse_document(const Json& doc) {
  if (!doc.is_object()) throw config_error("config must be a JSON object", "");
  ParamReader r(doc, "");
  RunConfig c;
  c.version = r.require<int>("version");
  if (c.version != kConfigVersion) {
    throw config_error("unsupported config version " + std::to_string(c.version) +
                           " (expected " + std::to_string(kConfigVersion) + ")",
                       "/version");
  }
  c.run_name = r.require<std::string>("run_name");
  if (c.run_name.empty() || c.run_name == "." || c.run_name == ".." ||
      c.run_name.find('/') != std::string::npos) {
    throw config_error("run_name must be a non-empty name without '/'", "/run_name");
  }
  c.results_root = r.get<std::string>("results_root", c.results_root.string());
  c.optimizee = r.require<std::string>("optimizee");
  if (!is_registered(benchmarks::optimizee_ids(), c.optimizee)) {
    throw config_error("unknown optimizee '" + c.optimizee + "' (known: " +
                           known_list(benchmarks::optimizee_ids()) + ")",
                       "/optimizee");
  }
  c.optimizer = r.require<std::string>("optimizer");
  if (!is_registered(optimizers::optimizer_ids(), c.optimizer)) {
    throw config_error("unknown optimizer '" + c.optimizer + "' (known: " +
                           known_list(optimizers::optimizer_ids()) + ")",
                       "/optimizer");
  }
  c.population_size = r.require<std::size_t>("population_size");
  if (c.population_size < 1) throw config_error("population_size must be at least 1", "/population_size");
  c.generations = r.require<std::size_t>("generations");
  if (c.generations < 1) throw config_error("generations must be at least 1", "/generations");
  if (r.has("fitness_weights")) {
    const Json& w = r.raw("fitness_weights");
    if (!w.is_array() || w.empty()) {
      throw config_error("fitness_weights must be a non-empty array of numbers", "/fitness_weights");
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!w[i].is_number()) {
        throw config_error("fitness weight must be a number", "/fitness_weights/" + std::to_string(i));
      }
      c.fitness_weights.push_back(w[i].get<double>());
    }
  }
  c.max_parallel = r.get("max_parallel", c.max_parallel);
  if (c.max_parallel < 1) throw config_error("max_parallel must be at least 1", "/max_parallel");
  c.timeout_seconds = r.get("timeout_seconds", c.timeout_seconds);
  if (c.timeout_seconds < 0.0) throw config_error("timeout_seconds must be nonnegative", "/timeout_seconds");
  c.seed = r.get("seed", c.seed);
  c.worst_fitness = r.get("worst_fitness", c.worst_fitness);
  c.keep_workdirs = r.get("keep_workdirs", c.keep_workdirs);
  c.record_wall_time = r.get("record_wall_time", c.record_wall_time);

  for (const auto& [key, value] : doc.items()) {
    if (!is_block_name(key)) continue;
    r.raw(key);
    if (!value.is_object()) throw config_error("parameter block must be an object", "/" + key);
    c.blocks[key] = value;
  }
  r.finish();
  return c;
}

}  // namespace

const Json& RunConfig::optimizee_params() const {
  return blocks.contains(optimizee) ? blocks.at(optimizee) : null_block();
}

const Json& RunConfig::optimizer_params() const {
  return blocks.contains(optimizer) ? blocks.at(optimizer) : null_block();
}

std::map<std::string, int> json_pointer_lines(const std::string& text) {
  return LineScanner(text).scan();
}

int line_of_pointer(const std::map<std::string, int>& lines, std::string pointer) {
  while (true) {
    if (const auto it = lines.find(pointer); it != lines.end()) return it->second;
    if (pointer.empty()) return 1;
    pointer.erase(pointer.rfind('/'));
  }
}

std::string anchor_message(const std::exception& error, const std::string& text,
                           const std::string& source) {
  const auto* e = dynamic_cast<const Error*>(&error);
  const std::string pointer = e != nullptr ? e->pointer() : std::string();
  std::string prefix = source;
  if (Json::accept(text)) {
    prefix += ":" + std::to_string(line_of_pointer(json_pointer_lines(text), pointer));
  }
  prefix += ": ";
  if (!pointer.empty()) prefix += pointer + ": ";
  return prefix + error.what();
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& ex) {
    const std::size_t end = std::min<std::size_t>(ex.byte == 0 ? 0 : ex.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n');
    throw config_error(source + ":" + std::to_string(line) + ": invalid JSON: " + ex.what());
  }
  try {
    return parse_document(doc);
  } catch (const Error& ex) {
    throw Error(ErrorKind::Config, anchor_message(ex, text, source), ex.pointer());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const Error& ex) {
    throw config_error("cannot read config '" + path.string() + "': " + ex.what());
  }
  return parse_config(text, path.string());
}

std::string serialize_config(const RunConfig& c) {
  Json j;
  j["version"] = c.version;
  j["run_name"] = c.run_name;
  j["results_root"] = c.results_root.string();
  j["optimizee"] = c.optimizee;
  j["optimizer"] = c.optimizer;
  j["population_size"] = c.population_size;
  j["generations"] = c.generations;
  if (!c.fitness_weights.empty()) j["fitness_weights"] = c.fitness_weights;
  j["max_parallel"] = c.max_parallel;
  j["timeout_seconds"] = c.timeout_seconds;
  j["seed"] = c.seed;
  j["worst_fitness"] = c.worst_fitness;
  j["keep_workdirs"] = c.keep_workdirs;
  j["record_wall_time"] = c.record_wall_time;
  for (const auto& [key, value] : c.blocks.items()) j[key] = value;
  return j.dump(2) + "\n";
}

}  // namespace twoloop::app
