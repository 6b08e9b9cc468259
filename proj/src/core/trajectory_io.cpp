#include "twoloop/core/trajectory_io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "twoloop/core/error.hpp"

namespace twoloop {

namespace fs = std::filesystem;

namespace {

Error io_error(const std::string& what, const fs::path& path) {
  return Error(ErrorKind::Io, what + " '" + path.string() + "': " + std::strerror(errno));
}

}  // namespace

Json individual_to_json(const Individual& individual) {
  Json params = Json::object();
  for (const auto& p : individual.params) params[p.name] = p.value;
  return Json{{"generation", individual.generation},
              {"index", individual.index},
              {"params", std::move(params)}};
}

Individual individual_from_json(const Json& j) {
  Individual ind;
  ind.generation = j.at("generation").get<std::size_t>();
  ind.index = j.at("index").get<std::size_t>();
  for (const auto& [name, value] : j.at("params").items()) {
    ind.params.push_back({name, value.get<std::vector<double>>()});
  }
  return ind;
}

std::string record_to_line(const GenerationRecord& record, bool with_wall_time) {
  Json entries = Json::array();
  for (const auto& e : record.entries) {
    Json j = individual_to_json(e.individual);
    j["fitness"] = e.fitness;
    j["weighted_fitness"] = e.weighted_fitness;
    j["status"] = to_string(e.status);
    j["wall_time_s"] = with_wall_time ? Json(e.wall_time_s) : Json(nullptr);
    if (!e.diagnostic.empty()) j["diagnostic"] = e.diagnostic;
    entries.push_back(std::move(j));
  }
  Json line{{"generation", record.generation},
            {"entries", std::move(entries)},
            {"optimizer_snapshot", record.optimizer_snapshot}};
  return line.dump();
}

GenerationRecord record_from_json(const Json& j) {
  GenerationRecord rec;
  rec.generation = j.at("generation").get<std::size_t>();
  for (const auto& ej : j.at("entries")) {
    Entry e;
    e.individual = individual_from_json(ej);
    e.fitness = ej.at("fitness").get<std::vector<double>>();
    e.weighted_fitness = ej.at("weighted_fitness").get<double>();
    e.status = status_from_string(ej.at("status").get<std::string>());
    const auto& wt = ej.at("wall_time_s");
    e.wall_time_s = wt.is_null() ? 0.0 : wt.get<double>();
    if (ej.contains("diagnostic")) e.diagnostic = ej["diagnostic"].get<std::string>();
    rec.entries.push_back(std::move(e));
  }
  rec.optimizer_snapshot = j.value("optimizer_snapshot", Json());
  return rec;
}

namespace {

std::vector<std::string> complete_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) break;
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

}  // namespace

std::vector<GenerationRecord> read_trajectory_records(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<GenerationRecord> records;
  std::size_t line_no = 0;
  for (const auto& line : complete_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(record_from_json(Json::parse(line)));
    } catch (const Json::exception& ex) {
      throw Error(ErrorKind::State, path.string() + ":" + std::to_string(line_no) +
                                        ": malformed trajectory record: " + ex.what());
    }
  }
  return records;
}

void truncate_trajectory(const fs::path& path, std::size_t records) {
  if (!fs::exists(path)) {
    if (records == 0) return;
    throw Error(ErrorKind::State, "trajectory '" + path.string() + "' is missing");
  }
  const std::string text = read_text(path);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < records; ++i) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      throw Error(ErrorKind::State, "trajectory '" + path.string() + "' has fewer than " +
                                        std::to_string(records) + " records");
    }
    pos = nl + 1;
  }
  if (pos != text.size()) write_text_atomic(path, text.substr(0, pos));
}

LineAppender::LineAppender(const fs::path& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw io_error("cannot open", path);
}

LineAppender::~LineAppender() {
  if (fd_ >= 0) ::close(fd_);
}

void LineAppender::append(const std::string& line) {
  const std::string buf = line + '\n';
  const ssize_t n = ::write(fd_, buf.data(), buf.size());
  if (n != static_cast<ssize_t>(buf.size())) throw io_error("short write to", path_);
  ::fsync(fd_);
}

Json checkpoint_to_json(const Checkpoint& c) {
  Json population = Json::array();
  for (const auto& ind : c.next_population) population.push_back(individual_to_json(ind));
  return Json{{"run_name", c.run_name},
              {"seed", c.seed},
              {"generation", c.generation},
              {"converged", c.converged},
              {"next_population", std::move(population)},
              {"optimizer_snapshot", c.optimizer_snapshot}};
}

Checkpoint checkpoint_from_json(const Json& j) {
  try {
    Checkpoint c;
    c.run_name = j.at("run_name").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.generation = j.at("generation").get<std::size_t>();
    c.converged = j.value("converged", false);
    for (const auto& ij : j.at("next_population")) {
      c.next_population.push_back(individual_from_json(ij));
    }
    c.optimizer_snapshot = j.at("optimizer_snapshot");
    return c;
  } catch (const Json::exception& ex) {
    throw Error(ErrorKind::State, std::string("corrupt checkpoint: ") + ex.what());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write", tmp);
    out << text;
    out.flush();
    if (!out) throw io_error("cannot write", tmp);
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename '" + tmp.string() + "': " + ec.message());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot read", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace twoloop
