#pragma once

// Data-parallel inner loops used by the optimizer and the DVM objective.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active table is chosen once at first use from the
// CPU's capabilities and can be overridden with select_isa() (for example to
// pin the scalar path when comparing results across machines).
//
// Contract shared by all variants:
//   - exp(x) for x < kExpFlushBelow returns exactly 0.
//   - shifted_exp writes 0 for every element whose scaled argument is below
//     the cutoff, and the comparison is done on the same double the
//     exponential would receive, so callers can prune on that predicate
//     without changing results.

#include <cstddef>
#include <span>
#include <string_view>

namespace sofa::simd {

enum class Isa { Scalar, Avx2 };

inline constexpr double kExpFlushBelow = -708.0;

struct KernelTable {
  Isa isa;

  // out[i] = exp(x[i]), flushed to 0 below kExpFlushBelow.
  void (*exp)(std::span<const double> x, std::span<double> out);

  // t = scale * (x[i] - shift); out[i] = t < cutoff ? 0 : exp(t).
  // Requires cutoff >= kExpFlushBelow.
  void (*shifted_exp)(std::span<const double> x, double shift, double scale,
                      double cutoff, std::span<double> out);

  // y[i] += a * x[i]
  void (*axpy)(double a, std::span<const double> x, std::span<double> y);

  // out[i] = 1 / (1 + exp(-x[i]))
  void (*logistic)(std::span<const double> x, std::span<double> out);
};

const KernelTable& scalar_kernels();
#if defined(SOFA_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

bool isa_supported(Isa isa);
const KernelTable& kernels_for(Isa isa);  // throws if unsupported

// Active table. Safe to call concurrently; select_isa should be called
// before any worker threads start.
const KernelTable& kernels();
void select_isa(Isa isa);
Isa best_isa();

std::string_view isa_name(Isa isa);
Isa parse_isa(std::string_view name);  // "scalar", "avx2", or "auto" for best_isa()

}  // namespace sofa::simd
