#pragma once

// Per-run record files: one CSV row per iteration.
//   iteration,fitness,feasible,attempts,infeasible,x1,...,xD
// Coordinates are padded with domain centers to the full dimension, and all
// numbers use the shortest round-trip decimal form, so reading a file back
// reproduces the record exactly.

#include <filesystem>
#include <iosfwd>

#include "sofa/domain.hpp"
#include "sofa/sofa.hpp"

namespace sofa::harness {

void write_record(std::ostream& out, const RunRecord& record, const SearchDomain& domain);
void write_record(const std::filesystem::path& path, const RunRecord& record,
                  const SearchDomain& domain);

// Rebuilds trials, attempts and infeasible counts, and recomputes the
// best-so-far series. Throws std::runtime_error on malformed input.
RunRecord read_record(std::istream& in);
RunRecord read_record(const std::filesystem::path& path);

}  // namespace sofa::harness
