#include "sofa/harness/metrics.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sofa::harness {

double function_error(double j_star, double j_best) { return j_star - j_best; }

RunSeries RunSeries::from_record(const RunRecord& record) {
  return {record.best_fitness, record.attempts, record.infeasible};
}

double RunSeries::best_at(std::size_t k) const {
  if (k == 0 || best_fitness.empty()) throw std::out_of_range("best_at needs k >= 1 and data");
  return best_fitness[std::min(k, best_fitness.size()) - 1];
}

double convergence_probability(std::span<const RunSeries> runs, double j_star, double delta,
                               std::size_t k) {
  if (runs.empty()) throw std::invalid_argument("convergence_probability needs at least one run");
  std::size_t hits = 0;
  for (const RunSeries& r : runs) {
    if (std::abs(j_star - r.best_at(k)) < delta) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(runs.size());
}

double convergence_probability(std::span<const RunRecord> runs, double j_star, double delta,
                               std::size_t k) {
  std::vector<RunSeries> series;
  series.reserve(runs.size());
  for (const RunRecord& r : runs) series.push_back(RunSeries::from_record(r));
  return convergence_probability(std::span<const RunSeries>(series), j_star, delta, k);
}

MetricSeries aggregate(std::span<const RunSeries> runs, double j_star,
                       const std::vector<double>& deltas) {
  if (runs.empty()) throw std::invalid_argument("aggregate needs at least one run");
  std::size_t length = 0;
  for (const RunSeries& r : runs) {
    if (r.iterations() == 0) throw std::invalid_argument("aggregate got an empty run");
    length = std::max(length, r.iterations());
  }
  MetricSeries m;
  m.deltas = deltas;
  m.mean_err.assign(length, 0.0);
  m.p_delta.assign(deltas.size(), std::vector<double>(length, 0.0));
  m.unfeasible_frac.assign(length, 0.0);
  const double inv_runs = 1.0 / static_cast<double>(runs.size());
  for (std::size_t i = 0; i < length; ++i) {
    double err_sum = 0.0;
    std::vector<std::size_t> hits(deltas.size(), 0);
    std::uint64_t attempts = 0;
    std::uint64_t infeasible = 0;
    for (const RunSeries& r : runs) {
      const double best = r.best_at(i + 1);
      const double err = function_error(j_star, best);
      err_sum += err;
      for (std::size_t d = 0; d < deltas.size(); ++d) {
        if (std::abs(err) < deltas[d]) ++hits[d];
      }
      if (i < r.attempts.size()) {
        attempts += r.attempts[i];
        infeasible += r.infeasible[i];
      }
    }
    m.mean_err[i] = err_sum * inv_runs;
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      m.p_delta[d][i] = static_cast<double>(hits[d]) * inv_runs;
    }
    m.unfeasible_frac[i] =
        attempts == 0 ? 0.0 : static_cast<double>(infeasible) / static_cast<double>(attempts);
  }
  return m;
}

std::vector<double> windowed_average(std::span<const double> values, std::size_t window) {
  if (window == 0) throw std::invalid_argument("window must be positive");
  std::vector<double> out(values.size());
  // Recomputed per index so the result does not depend on running-sum drift.
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t start = i + 1 >= window ? i + 1 - window : 0;
    double acc = 0.0;
    for (std::size_t j = start; j <= i; ++j) acc += values[j];
    out[i] = acc / static_cast<double>(i + 1 - start);
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_delta(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, delta, std::chars_format::scientific);
  std::string s(buf, res.ptr);  // e.g. "1e-03", "2.5e-04"
  const auto e = s.find('e');
  std::string mantissa = s.substr(0, e);
  const int exponent = std::stoi(s.substr(e + 1));
  return mantissa + "e" + std::to_string(exponent);
}

void write_metrics_csv(std::ostream& out, const MetricSeries& m) {
  out << "iteration,mean_err";
  for (double d : m.deltas) out << ",p_" << format_delta(d);
  out << ",unfeasible_frac\n";
  for (std::size_t i = 0; i < m.iterations(); ++i) {
    out << (i + 1) << ',' << format_double(m.mean_err[i]);
    for (const auto& p : m.p_delta) out << ',' << format_double(p[i]);
    out << ',' << format_double(m.unfeasible_frac[i]) << '\n';
  }
}

void write_window_csv(std::ostream& out, const MetricSeries& m, std::size_t window) {
  const std::vector<double> avg = windowed_average(m.unfeasible_frac, window);
  out << "iteration,unfeasible_frac,unfeasible_frac_window" << window << '\n';
  for (std::size_t i = 0; i < avg.size(); ++i) {
    out << (i + 1) << ',' << format_double(m.unfeasible_frac[i]) << ',' << format_double(avg[i])
        << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("metrics CSV: bad number '" + s + "'");
  }
  return v;
}

}  // namespace

MetricSeries read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("metrics CSV: missing header");
  const auto header = split(line);
  if (header.size() < 3 || header.front() != "iteration" || header[1] != "mean_err" ||
      header.back() != "unfeasible_frac") {
    throw std::runtime_error("metrics CSV: unexpected header '" + line + "'");
  }
  MetricSeries m;
  for (std::size_t c = 2; c + 1 < header.size(); ++c) {
    if (header[c].rfind("p_", 0) != 0) throw std::runtime_error("metrics CSV: bad column " + header[c]);
    m.deltas.push_back(parse_number(header[c].substr(2)));
  }
  m.p_delta.resize(m.deltas.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw std::runtime_error("metrics CSV: ragged row");
    if (parse_number(cells[0]) != static_cast<double>(m.mean_err.size() + 1)) {
      throw std::runtime_error("metrics CSV: iterations must be consecutive from 1");
    }
    m.mean_err.push_back(parse_number(cells[1]));
    for (std::size_t d = 0; d < m.deltas.size(); ++d) m.p_delta[d].push_back(parse_number(cells[2 + d]));
    m.unfeasible_frac.push_back(parse_number(cells.back()));
  }
  return m;
}

}  // namespace sofa::harness
