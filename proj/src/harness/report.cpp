#include "sofa/harness/report.hpp"

#include <ostream>
#include <stdexcept>

namespace sofa::harness {

std::vector<std::size_t> report_iterations(std::size_t length) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k < length; k *= 10) out.push_back(k);
  if (length > 0) out.push_back(length);
  return out;
}

void write_report(std::ostream& out, const std::vector<LabeledMetrics>& inputs,
                  const std::vector<std::size_t>& iterations) {
  if (inputs.empty()) throw std::invalid_argument("report needs at least one metrics table");
  const auto& deltas = inputs.front().metrics.deltas;
  for (const auto& in : inputs) {
    if (in.metrics.deltas != deltas) {
      throw std::invalid_argument("report inputs use different delta thresholds: " + in.label);
    }
  }
  out << "source,iteration,mean_err";
  for (double d : deltas) out << ",p_" << format_delta(d);
  out << ",unfeasible_frac\n";
  for (const auto& in : inputs) {
    const MetricSeries& m = in.metrics;
    const auto ks = iterations.empty() ? report_iterations(m.iterations()) : iterations;
    for (std::size_t k : ks) {
      if (k < 1 || k > m.iterations()) continue;
      out << in.label << ',' << k << ',' << format_double(m.mean_err[k - 1]);
      for (const auto& p : m.p_delta) out << ',' << format_double(p[k - 1]);
      out << ',' << format_double(m.unfeasible_frac[k - 1]) << '\n';
    }
  }
}

}  // namespace sofa::harness
