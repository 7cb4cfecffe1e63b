#include "sofa/simd/kernels.hpp"

#include <cassert>
#include <cmath>

namespace sofa::simd {
namespace {

inline double flushed_exp(double x) {
  return x < kExpFlushBelow ? 0.0 : std::exp(x);
}

void exp_scalar(std::span<const double> x, std::span<double> out) {
  assert(out.size() >= x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = flushed_exp(x[i]);
}

void shifted_exp_scalar(std::span<const double> x, double shift, double scale,
                        double cutoff, std::span<double> out) {
  assert(out.size() >= x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = scale * (x[i] - shift);
    out[i] = t < cutoff ? 0.0 : flushed_exp(t);
  }
}

void axpy_scalar(double a, std::span<const double> x, std::span<double> y) {
  assert(y.size() >= x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void logistic_scalar(std::span<const double> x, std::span<double> out) {
  assert(out.size() >= x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 1.0 / (1.0 + flushed_exp(-x[i]));
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, exp_scalar, shifted_exp_scalar, axpy_scalar,
                                 logistic_scalar};
  return table;
}

}  // namespace sofa::simd
