#include <cmath>
#include <stdexcept>

#include "sofa/dvm.hpp"

namespace sofa::dvm {
namespace {

constexpr double kResidualTol = 1e-10;

struct Characteristic {
  double scale;      // b exp(-a_Y tau_Y - a_J (tau_J - tau_Y))
  double tau_j;
  double tau_a;
  double late_decay; // a_J (tau_A - tau_J)
  double a_adult;

  explicit Characteristic(const StageRates& r)
      : scale(r.reproduction * std::exp(-r.mortality_young * r.maturation_young -
                                        r.mortality_juvenile *
                                            (r.maturation_juvenile - r.maturation_young))),
        tau_j(r.maturation_juvenile),
        tau_a(r.max_reproduction_age),
        late_decay(r.mortality_juvenile * (r.max_reproduction_age - r.maturation_juvenile)),
        a_adult(r.mortality_adult) {}

  double g(double x) const {
    return scale * (std::exp(-tau_j * x) - std::exp(-tau_a * x - late_decay)) - a_adult - x;
  }
  double dg(double x) const {
    return scale * (-tau_j * std::exp(-tau_j * x) + tau_a * std::exp(-tau_a * x - late_decay)) - 1.0;
  }
  // Drops the subtracted exponential: U >= g everywhere and U is decreasing,
  // so every root of g lies at or below the root of U.
  double upper(double x) const { return scale * std::exp(-tau_j * x) - a_adult - x; }
};

}  // namespace

double characteristic_residual(const StageRates& rates, double lambda) {
  return Characteristic(rates).g(lambda);
}

std::optional<double> dominant_eigenvalue(const StageRates& rates, const EigenOptions& options) {
  if (!rates.valid()) throw std::invalid_argument("dominant_eigenvalue needs valid stage rates");
  if (!(options.lo < options.hi) || options.scan_points < 2) {
    throw std::invalid_argument("eigenvalue bracket must be non-empty");
  }
  const Characteristic ch(rates);
  const double lo = options.lo;
  const double hi = options.hi;

  if (ch.scale == 0.0) {
    const double root = -ch.a_adult;
    if (root < lo || root > hi) return std::nullopt;
    return root;
  }

  // Root of the upper bound: U(-a_A) > 0 and U(x) < 0 beyond
  // x = -a_A + scale * exp(tau_J a_A).
  double top = hi;
  if (ch.upper(hi) < 0.0) {
    double a = std::max(lo, -ch.a_adult);
    double b = hi;
    if (ch.upper(a) <= 0.0) {
      top = a;
    } else {
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        (ch.upper(mid) > 0.0 ? a : b) = mid;
      }
      top = b;
    }
  }

  // Scan downward for the first sign change below `top`.
  double right = top;
  double g_right = ch.g(right);
  if (g_right == 0.0) return right;
  if (g_right > 0.0) return std::nullopt;  // the largest root lies above hi
  const double step = (top - lo) / static_cast<double>(options.scan_points);
  double left = right;
  double g_left = g_right;
  bool found = false;
  for (std::size_t i = 1; i <= options.scan_points; ++i) {
    left = i == options.scan_points ? lo : top - step * static_cast<double>(i);
    g_left = ch.g(left);
    if (g_left >= 0.0) {
      found = true;
      break;
    }
    right = left;
    g_right = g_left;
  }
  if (!found) return std::nullopt;
  if (g_left == 0.0) return left;

  // Safeguarded Newton on [left, right] with g(left) > 0 > g(right).
  double x = 0.5 * (left + right);
  for (int iter = 0; iter < 200; ++iter) {
    const double gx = ch.g(x);
    if (gx == 0.0) return x;
    (gx > 0.0 ? left : right) = x;
    const double d = ch.dg(x);
    double next = x - gx / d;
    if (!(next > left && next < right)) next = 0.5 * (left + right);
    if (next == x || next == left || next == right) break;
    x = next;
  }
  // Pick the bracket end (or interior point) with the smallest residual.
  double best = x;
  double best_g = std::abs(ch.g(x));
  for (double cand : {left, right}) {
    const double gc = std::abs(ch.g(cand));
    if (gc < best_g) {
      best = cand;
      best_g = gc;
    }
  }
  if (!(best_g < kResidualTol)) return std::nullopt;
  return best;
}

}  // namespace sofa::dvm
