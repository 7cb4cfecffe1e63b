#include "sofa/density.hpp"

#include <stdexcept>

#include "sofa/selection.hpp"

namespace sofa {

CoordinateKernel CoordinateKernel::at_iteration(const SearchDomain& domain,
                                                const SofaConfig& config, std::size_t k) {
  CoordinateKernel kernel;
  if (std::holds_alternative<BasicGaussian>(config.kernel)) {
    const double radius = config.gaussian_radius == GaussianRadius::FullCube
                              ? domain.kernel_radius()
                              : domain.projection(active_dims(config, k + 1)).diagonal();
    kernel.gaussian_ = true;
    kernel.scale_ = gaussian_sigma(static_cast<double>(k), radius);
  } else {
    const auto& cauchy = std::get<SimplifiedCauchy>(config.kernel);
    kernel.scale_ = clamp_epsilon(epsilon_schedule(static_cast<double>(k + 1), cauchy.a, cauchy.b));
  }
  return kernel;
}

double CoordinateKernel::pdf(double x, double center, double lo, double hi) const {
  return gaussian_ ? truncated_gaussian_pdf(x, center, scale_, lo, hi)
                   : truncated_cauchy_pdf(x, center, scale_, lo, hi);
}

double CoordinateKernel::cdf(double x, double center, double lo, double hi) const {
  return gaussian_ ? truncated_gaussian_cdf(x, center, scale_, lo, hi)
                   : truncated_cauchy_cdf(x, center, scale_, lo, hi);
}

Moments CoordinateKernel::moments(double center, double lo, double hi) const {
  return gaussian_ ? truncated_gaussian_moments(center, scale_, lo, hi)
                   : truncated_cauchy_moments(center, scale_, lo, hi);
}

ProposalMixture::ProposalMixture(const RunRecord& history, std::size_t k, std::size_t coordinate,
                                 const SearchDomain& domain, const SofaConfig& config)
    : kernel_(CoordinateKernel::at_iteration(domain, config, k)),
      lo_(domain.lower(coordinate)),
      hi_(domain.upper(coordinate)) {
  if (k < 1 || k > history.trials.size()) {
    throw std::out_of_range("proposal mixture needs 1 <= k <= number of trials");
  }
  if (coordinate >= domain.dimension()) throw std::out_of_range("coordinate outside the domain");
  std::vector<double> fitness(k);
  for (std::size_t i = 0; i < k; ++i) fitness[i] = history.trials[i].fitness;
  const std::vector<double> w = selection_weights(fitness, static_cast<double>(k));
  for (std::size_t i = 0; i < k; ++i) {
    if (w[i] == 0.0) continue;
    const auto& coords = history.trials[i].coords;
    weights_.push_back(w[i]);
    centers_.push_back(coordinate < coords.size() ? coords[coordinate]
                                                  : domain.center(coordinate));
  }
}

double ProposalMixture::pdf(double x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i] * kernel_.pdf(x, centers_[i], lo_, hi_);
  }
  return acc;
}

double ProposalMixture::cdf(double x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i] * kernel_.cdf(x, centers_[i], lo_, hi_);
  }
  return acc;
}

Moments ProposalMixture::moments() const {
  // Law of total variance over the reference choice.
  std::vector<Moments> parts(weights_.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    parts[i] = kernel_.moments(centers_[i], lo_, hi_);
    mean += weights_[i] * parts[i].mean;
  }
  double variance = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double d = parts[i].mean - mean;
    variance += weights_[i] * (parts[i].variance + d * d);
  }
  return {mean, variance};
}

double proposal_density(const RunRecord& history, std::size_t k, std::size_t coordinate, double x,
                        const SearchDomain& domain, const SofaConfig& config) {
  return ProposalMixture(history, k, coordinate, domain, config).pdf(x);
}

}  // namespace sofa
