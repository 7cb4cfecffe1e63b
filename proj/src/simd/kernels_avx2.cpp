// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a
// runtime CPU check.

#include "sofa/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cassert>
#include <limits>

namespace sofa::simd {
namespace {

constexpr std::size_t kLanes = 4;

// Above this the result overflows to +inf.
constexpr double kExpOverflowAbove = 709.78;

// exp for doubles: n = round(x / ln2), r = x - n ln2 (two-part Cody-Waite
// reduction, |r| <= ln2/2), degree-13 Taylor polynomial for e^r, then scale
// by 2^n through the exponent field.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(kExpFlushBelow);
  const __m256d hi = _mm256_set1_pd(kExpOverflowAbove);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  const __m256d over = _mm256_cmp_pd(x, hi, _CMP_GT_OQ);
  const __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);

  const __m256d xc = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), xc);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);               // 1/13!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));  // 1/12!
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // 2^(n-1) keeps the biased exponent in [1, 2046] for n in [-1021, 1024].
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  const __m256i ni = _mm256_sub_epi64(
      _mm256_castpd_si256(_mm256_add_pd(_mm256_sub_pd(n, _mm256_set1_pd(1.0)), magic)),
      _mm256_castpd_si256(magic));
  const __m256d scale =
      _mm256_castsi256_pd(_mm256_slli_epi64(_mm256_add_epi64(ni, _mm256_set1_epi64x(1023)), 52));
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, scale), _mm256_set1_pd(2.0));

  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), under);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(std::numeric_limits<double>::infinity()), over);
  result = _mm256_blendv_pd(result, x, nan);
  return result;
}

// Runs `body` over full lanes and pads the tail through a stack buffer so
// every element goes through the same vector code.
template <class Body>
inline void for_each_lane_block(std::size_t n, const double* in, double* out, Body body) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, body(_mm256_loadu_pd(in + i)));
  }
  if (i < n) {
    alignas(32) double tmp_in[kLanes] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double tmp_out[kLanes];
    std::copy(in + i, in + n, tmp_in);
    _mm256_store_pd(tmp_out, body(_mm256_load_pd(tmp_in)));
    std::copy(tmp_out, tmp_out + (n - i), out + i);
  }
}

void exp_avx2(std::span<const double> x, std::span<double> out) {
  assert(out.size() >= x.size());
  for_each_lane_block(x.size(), x.data(), out.data(), [](__m256d v) { return exp_pd(v); });
}

void shifted_exp_avx2(std::span<const double> x, double shift, double scale, double cutoff,
                      std::span<double> out) {
  assert(out.size() >= x.size());
  assert(cutoff >= kExpFlushBelow);
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vscale = _mm256_set1_pd(scale);
  const __m256d vcut = _mm256_set1_pd(cutoff);
  for_each_lane_block(x.size(), x.data(), out.data(), [&](__m256d v) {
    const __m256d t = _mm256_mul_pd(vscale, _mm256_sub_pd(v, vshift));
    const __m256d below = _mm256_cmp_pd(t, vcut, _CMP_LT_OQ);
    return _mm256_blendv_pd(exp_pd(t), _mm256_setzero_pd(), below);
  });
}

void axpy_avx2(double a, std::span<const double> x, std::span<double> y) {
  assert(y.size() >= x.size());
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vy = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy));
  }
  for (; i < n; ++i) y[i] = __builtin_fma(a, x[i], y[i]);
}

void logistic_avx2(std::span<const double> x, std::span<double> out) {
  assert(out.size() >= x.size());
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  for_each_lane_block(x.size(), x.data(), out.data(), [&](__m256d v) {
    const __m256d e = exp_pd(_mm256_sub_pd(zero, v));
    return _mm256_div_pd(one, _mm256_add_pd(one, e));
  });
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::Avx2, exp_avx2, shifted_exp_avx2, axpy_avx2,
                                 logistic_avx2};
  return table;
}

}  // namespace sofa::simd
