#include "sofa/domain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sofa {

SearchDomain::SearchDomain(std::vector<double> centers, std::vector<double> widths)
    : centers_(std::move(centers)), widths_(std::move(widths)) {
  if (centers_.empty()) throw std::invalid_argument("domain needs at least one coordinate");
  if (centers_.size() != widths_.size()) {
    throw std::invalid_argument("domain centers and widths differ in length (" +
                                std::to_string(centers_.size()) + " vs " +
                                std::to_string(widths_.size()) + ")");
  }
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < widths_.size(); ++j) {
    if (!std::isfinite(centers_[j])) {
      throw std::invalid_argument("domain center " + std::to_string(j) + " is not finite");
    }
    if (!(widths_[j] > 0.0) || !std::isfinite(widths_[j])) {
      throw std::invalid_argument("domain width " + std::to_string(j) +
                                  " must be positive and finite");
    }
    sum_sq += widths_[j] * widths_[j];
  }
  diagonal_ = std::sqrt(sum_sq);
  if (!(diagonal_ > 0.0) || !std::isfinite(diagonal_)) {
    throw std::invalid_argument("domain diagonal is not finite and positive");
  }
  kernel_radius_ = diagonal_;
}

SearchDomain SearchDomain::projection(std::size_t d) const {
  if (d < 1 || d > dimension()) {
    throw std::out_of_range("projection dimension " + std::to_string(d) + " outside [1, " +
                            std::to_string(dimension()) + "]");
  }
  SearchDomain sub(std::vector<double>(centers_.begin(), centers_.begin() + d),
                   std::vector<double>(widths_.begin(), widths_.begin() + d));
  sub.kernel_radius_ = kernel_radius_;
  return sub;
}

bool SearchDomain::contains(std::span<const double> point) const {
  if (point.size() > dimension()) {
    throw std::invalid_argument("point has more coordinates than the domain");
  }
  for (std::size_t j = 0; j < point.size(); ++j) {
    // Same bounds the samplers clamp to, so boundary samples are inside.
    if (!(point[j] >= lower(j) && point[j] <= upper(j))) return false;
  }
  return true;
}

std::vector<double> SearchDomain::pad_with_centers(std::span<const double> point) const {
  if (point.size() > dimension()) {
    throw std::invalid_argument("point has more coordinates than the domain");
  }
  std::vector<double> out(centers_);
  std::copy(point.begin(), point.end(), out.begin());
  return out;
}

SearchDomain make_domain(std::vector<double> centers, std::vector<double> widths) {
  return SearchDomain(std::move(centers), std::move(widths));
}

}  // namespace sofa
