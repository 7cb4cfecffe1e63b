#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sofa {

// Finite-dimensional box approximating the Hilbert cube
//   { z : |x_n - a_n| <= c_n / 2 }
// with centers a_n and full widths c_n > 0. The diagonal R = sqrt(sum c_n^2)
// bounds the distance between any two points of the box.
//
// A projection keeps the first d coordinates. Its own diagonal is recomputed,
// but kernel_radius() still reports the parent's diagonal: the Gaussian
// kernel is always scaled by the full cube.
class SearchDomain {
 public:
  // Throws std::invalid_argument on length mismatch, empty vectors, or a
  // width that is not strictly positive and finite.
  SearchDomain(std::vector<double> centers, std::vector<double> widths);

  std::size_t dimension() const { return centers_.size(); }
  std::span<const double> centers() const { return centers_; }
  std::span<const double> widths() const { return widths_; }

  double center(std::size_t j) const { return centers_[j]; }
  double width(std::size_t j) const { return widths_[j]; }
  double lower(std::size_t j) const { return centers_[j] - 0.5 * widths_[j]; }
  double upper(std::size_t j) const { return centers_[j] + 0.5 * widths_[j]; }

  double diagonal() const { return diagonal_; }
  double kernel_radius() const { return kernel_radius_; }

  // First-d sub-domain; throws std::out_of_range unless 1 <= d <= dimension().
  SearchDomain projection(std::size_t d) const;

  // Closed-box membership of the leading point.size() coordinates. Throws
  // std::invalid_argument if the point is longer than the domain.
  bool contains(std::span<const double> point) const;

  // Copies `point` and fills the remaining coordinates with centers.
  std::vector<double> pad_with_centers(std::span<const double> point) const;

 private:
  std::vector<double> centers_;
  std::vector<double> widths_;
  double diagonal_ = 0.0;
  double kernel_radius_ = 0.0;
};

SearchDomain make_domain(std::vector<double> centers, std::vector<double> widths);

}  // namespace sofa
