#include "sofa/simd/kernels.hpp"

#include <atomic>
#include <stdexcept>
#include <string>

namespace sofa::simd {
namespace {

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(SOFA_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::runtime_error("instruction set not supported on this CPU: " +
                             std::string(isa_name(isa)));
  }
#if defined(SOFA_HAVE_AVX2)
  if (isa == Isa::Avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

Isa best_isa() { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

const KernelTable& kernels() {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    table = &kernels_for(best_isa());
    const KernelTable* expected = nullptr;
    if (!g_active.compare_exchange_strong(expected, table, std::memory_order_acq_rel)) {
      table = expected;
    }
  }
  return *table;
}

void select_isa(Isa isa) { g_active.store(&kernels_for(isa), std::memory_order_release); }

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "auto") return best_isa();
  throw std::invalid_argument("unknown instruction set '" + std::string(name) + "'");
}

}  // namespace sofa::simd
