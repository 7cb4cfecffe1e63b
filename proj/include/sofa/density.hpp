#pragma once

// Marginal density of coordinate j of z_{k+1}, averaged over the reference
// choice: sum_i w_i(k) * kernel_j(x; reference coordinate of trial i).

#include <cstddef>
#include <vector>

#include "sofa/domain.hpp"
#include "sofa/sampler.hpp"
#include "sofa/sofa.hpp"

namespace sofa {

// The per-coordinate kernel that draws z_{k+1} (scale fixed by k and config).
class CoordinateKernel {
 public:
  static CoordinateKernel at_iteration(const SearchDomain& domain, const SofaConfig& config,
                                       std::size_t k);

  double pdf(double x, double center, double lo, double hi) const;
  double cdf(double x, double center, double lo, double hi) const;
  Moments moments(double center, double lo, double hi) const;

  bool gaussian() const { return gaussian_; }
  double scale() const { return scale_; }  // sigma, or eps for the Cauchy kernel

 private:
  bool gaussian_ = false;
  double scale_ = 0.0;
};

class ProposalMixture {
 public:
  // Uses the first k trials of `history` (k >= 1, all must exist).
  // Expects a resolved config.
  ProposalMixture(const RunRecord& history, std::size_t k, std::size_t coordinate,
                  const SearchDomain& domain, const SofaConfig& config);

  double pdf(double x) const;
  double cdf(double x) const;
  double mass(double a, double b) const { return cdf(b) - cdf(a); }
  Moments moments() const;

  double lower() const { return lo_; }
  double upper() const { return hi_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;  // nonzero weights only
  std::vector<double> centers_;
  CoordinateKernel kernel_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

double proposal_density(const RunRecord& history, std::size_t k, std::size_t coordinate, double x,
                        const SearchDomain& domain, const SofaConfig& config);

}  // namespace sofa
