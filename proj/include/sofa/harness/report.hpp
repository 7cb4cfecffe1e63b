#pragma once

// Side-by-side summary of several metrics CSVs (for example SoFA against the
// random-search baseline) at selected iterations.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sofa/harness/metrics.hpp"

namespace sofa::harness {

struct LabeledMetrics {
  std::string label;
  MetricSeries metrics;
};

// 1, 10, 100, ... below `length`, then `length` itself.
std::vector<std::size_t> report_iterations(std::size_t length);

// CSV: source,iteration,mean_err,p_<delta>...,unfeasible_frac. Iterations past
// a series' end are skipped for that series. All inputs must share the same
// delta columns; throws std::invalid_argument otherwise. An empty
// `iterations` list uses report_iterations of each series.
void write_report(std::ostream& out, const std::vector<LabeledMetrics>& inputs,
                  const std::vector<std::size_t>& iterations = {});

}  // namespace sofa::harness
