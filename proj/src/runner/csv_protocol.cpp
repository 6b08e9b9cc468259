#include "twoloop/runner/csv_protocol.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "twoloop/core/error.hpp"

namespace twoloop::runner {

namespace fs = std::filesystem;

namespace {

Error failed(const std::string& message) { return Error(ErrorKind::EvaluationFailed, message); }

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw failed("fitness file '" + path.string() + "' is missing");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // Trailing blank lines are tolerated.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

bool parse_real(std::string_view text, double& out) {
  const std::string s(text);
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) return false;
  // Underflow yields a representable subnormal or zero; overflow does not.
  return !(errno == ERANGE && std::isinf(out));
}

void write_params_file(const Individual& individual, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write params file '" + path.string() + "'");
  out << "name,index,value\n";
  for (const auto& p : individual.params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      out << p.name << ',' << i << ',' << format_real(p.value[i]) << '\n';
    }
  }
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "cannot write params file '" + path.string() + "'");
}

Individual read_params_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read params file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != "name,index,value") {
    throw failed("params file '" + path.string() + "' lacks the header 'name,index,value'");
  }
  Individual ind;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw failed("params file row " + std::to_string(row) + " is malformed");
    }
    const std::string name = line.substr(0, c1);
    const std::size_t index = std::stoul(line.substr(c1 + 1, c2 - c1 - 1));
    double value = 0.0;
    if (!parse_real(std::string_view(line).substr(c2 + 1), value)) {
      throw failed("params file row " + std::to_string(row) + " has an unparsable value");
    }
    if (ind.params.empty() || ind.params.back().name != name) {
      ind.params.push_back({name, {}});
    }
    auto& param = ind.params.back();
    if (index != param.value.size()) {
      throw failed("params file row " + std::to_string(row) + " is out of order");
    }
    param.value.push_back(value);
  }
  return ind;
}

FitnessVector read_fitness_file(const fs::path& path, std::size_t expected_length) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw failed("fitness file '" + path.string() + "' is empty");
  if (lines.front() != "fitness") {
    throw failed("fitness file '" + path.string() + "' lacks the header 'fitness'");
  }
  if (lines.size() - 1 != expected_length) {
    throw failed("fitness file length mismatch: expected " + std::to_string(expected_length) +
                 " values, found " + std::to_string(lines.size() - 1));
  }
  FitnessVector out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    double v = 0.0;
    if (!parse_real(lines[i], v)) {
      throw failed("fitness file row " + std::to_string(i + 1) + " is not a number: '" +
                   lines[i] + "'");
    }
    out.push_back(v);
  }
  return out;
}

void write_fitness_file(const FitnessVector& fitness, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write fitness file '" + path.string() + "'");
  out << "fitness\n";
  for (double v : fitness) out << format_real(v) << '\n';
}

}  // namespace twoloop::runner
