#include "sofa/harness/record_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sofa/harness/metrics.hpp"

namespace sofa::harness {
namespace {

template <typename T>
T parse(std::string_view s, const char* what) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error(std::string("record file: bad ") + what + " '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

void write_record(std::ostream& out, const RunRecord& record, const SearchDomain& domain) {
  const std::size_t dims = domain.dimension();
  out << "iteration,fitness,feasible,attempts,infeasible";
  for (std::size_t j = 0; j < dims; ++j) out << ",x" << (j + 1);
  out << '\n';
  std::string line;
  char buf[64];
  for (std::size_t i = 0; i < record.trials.size(); ++i) {
    const TrialPoint& t = record.trials[i];
    line.clear();
    line += std::to_string(t.iteration);
    line += ',';
    line += format_double(t.fitness);
    line += t.feasible ? ",1," : ",0,";
    line += std::to_string(i < record.attempts.size() ? record.attempts[i] : 1);
    line += ',';
    line += std::to_string(i < record.infeasible.size() ? record.infeasible[i] : 0);
    for (std::size_t j = 0; j < dims; ++j) {
      const double x = j < t.coords.size() ? t.coords[j] : domain.center(j);
      const auto res = std::to_chars(buf, buf + sizeof buf, x);
      line += ',';
      line.append(buf, res.ptr);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw std::runtime_error("record file: write failed");
}

void write_record(const std::filesystem::path& path, const RunRecord& record,
                  const SearchDomain& domain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_record(out, record, domain);
}

RunRecord read_record(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("record file: missing header");
  const std::string prefix = "iteration,fitness,feasible,attempts,infeasible";
  if (line.rfind(prefix, 0) != 0) throw std::runtime_error("record file: unexpected header");
  std::size_t dims = 0;
  for (std::size_t pos = prefix.size(); pos < line.size(); ++pos) {
    if (line[pos] == ',') ++dims;
  }
  RunRecord record;
  record.dimension = dims;
  double best = 0.0;
  std::size_t best_index = 0;
  bool have_best = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cells.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 5 + dims) throw std::runtime_error("record file: ragged row");
    TrialPoint t;
    t.iteration = parse<std::size_t>(cells[0], "iteration");
    if (t.iteration != record.trials.size() + 1) {
      throw std::runtime_error("record file: iterations must be consecutive from 1");
    }
    t.fitness = parse<double>(cells[1], "fitness");
    t.feasible = parse<int>(cells[2], "feasible flag") != 0;
    t.coords.resize(dims);
    for (std::size_t j = 0; j < dims; ++j) t.coords[j] = parse<double>(cells[5 + j], "coordinate");
    record.attempts.push_back(parse<std::uint32_t>(cells[3], "attempts"));
    record.infeasible.push_back(parse<std::uint32_t>(cells[4], "infeasible count"));
    // Same rule as the optimizer: floor-valued infeasible points count too.
    if (!have_best || t.fitness > best) {
      best = t.fitness;
      best_index = record.trials.size();
      have_best = true;
    }
    record.best_fitness.push_back(best);
    record.best_index.push_back(best_index);
    record.trials.push_back(std::move(t));
  }
  return record;
}

RunRecord read_record(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open record file " + path.string());
  return read_record(in);
}

}  // namespace sofa::harness
