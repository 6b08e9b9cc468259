#include "twoloop/core/types.hpp"

#include <unordered_set>

#include "twoloop/core/error.hpp"

namespace twoloop {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "configuration error";
    case ErrorKind::EvaluationFailed: return "evaluation failed";
    case ErrorKind::EmptyTrajectory: return "empty trajectory";
    case ErrorKind::Io: return "i/o error";
    case ErrorKind::State: return "state error";
  }
  return "error";
}

const Parameter* Individual::find(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t Individual::dimension() const {
  std::size_t d = 0;
  for (const auto& p : params) d += p.value.size();
  return d;
}

std::vector<double> Individual::flatten() const {
  std::vector<double> out;
  out.reserve(dimension());
  for (const auto& p : params) out.insert(out.end(), p.value.begin(), p.value.end());
  return out;
}

Bounds::Bounds(std::vector<ParameterBounds> entries) {
  for (auto& e : entries) add(std::move(e));
}

void Bounds::add(ParameterBounds entry) {
  if (entry.name.empty()) throw config_error("parameter name must not be empty");
  if (find(entry.name) != nullptr) {
    throw config_error("duplicate parameter name '" + entry.name + "'");
  }
  if (entry.lower.size() != entry.upper.size() || entry.lower.empty()) {
    throw config_error("parameter '" + entry.name + "' needs matching, non-empty bounds");
  }
  for (std::size_t i = 0; i < entry.lower.size(); ++i) {
    if (!(entry.lower[i] <= entry.upper[i])) {
      throw config_error("parameter '" + entry.name + "' has lower > upper at component " +
                         std::to_string(i));
    }
  }
  entries_.push_back(std::move(entry));
}

void Bounds::add(std::string name, double lower, double upper, bool integer) {
  add(ParameterBounds{std::move(name), {lower}, {upper}, integer});
}

void Bounds::add(std::string name, std::size_t size, double lower, double upper, bool integer) {
  add(ParameterBounds{std::move(name), std::vector<double>(size, lower),
                      std::vector<double>(size, upper), integer});
}

const ParameterBounds* Bounds::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::size_t Bounds::dimension() const {
  std::size_t d = 0;
  for (const auto& e : entries_) d += e.size();
  return d;
}

std::vector<double> Bounds::flat_lower() const {
  std::vector<double> out;
  for (const auto& e : entries_) out.insert(out.end(), e.lower.begin(), e.lower.end());
  return out;
}

std::vector<double> Bounds::flat_upper() const {
  std::vector<double> out;
  for (const auto& e : entries_) out.insert(out.end(), e.upper.begin(), e.upper.end());
  return out;
}

Individual Bounds::unflatten(std::span<const double> flat, std::size_t generation,
                             std::size_t index) const {
  if (flat.size() != dimension()) {
    throw config_error("flat parameter vector has " + std::to_string(flat.size()) +
                       " components, layout expects " + std::to_string(dimension()));
  }
  Individual ind;
  ind.generation = generation;
  ind.index = index;
  std::size_t offset = 0;
  for (const auto& e : entries_) {
    ind.params.push_back(
        {e.name, std::vector<double>(flat.begin() + offset, flat.begin() + offset + e.size())});
    offset += e.size();
  }
  return ind;
}

const char* to_string(EvalStatus status) noexcept {
  switch (status) {
    case EvalStatus::Ok: return "ok";
    case EvalStatus::Failed: return "failed";
    case EvalStatus::Timeout: return "timeout";
  }
  return "failed";
}

EvalStatus status_from_string(std::string_view text) {
  if (text == "ok") return EvalStatus::Ok;
  if (text == "failed") return EvalStatus::Failed;
  if (text == "timeout") return EvalStatus::Timeout;
  throw Error(ErrorKind::State, "unknown evaluation status '" + std::string(text) + "'");
}

void Trajectory::append(GenerationRecord record) {
  if (record.generation != records_.size()) {
    throw Error(ErrorKind::State, "trajectory expects generation " +
                                      std::to_string(records_.size()) + ", got " +
                                      std::to_string(record.generation));
  }
  records_.push_back(std::move(record));
}

}  // namespace twoloop
