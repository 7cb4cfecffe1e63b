#include "sofa/selection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sofa/simd/kernels.hpp"

namespace sofa {
namespace {

void check_fitness(double f) {
  if (!(f > 0.0) || !std::isfinite(f)) {
    throw std::invalid_argument("selection requires positive finite fitness values");
  }
}

void check_exponent(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("selection exponent k must be positive");
  }
}

std::vector<double> log_values(std::span<const double> fitnesses) {
  if (fitnesses.empty()) throw std::invalid_argument("selection over an empty history");
  std::vector<double> logs(fitnesses.size());
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    check_fitness(fitnesses[i]);
    logs[i] = std::log(fitnesses[i]);
  }
  return logs;
}

// Sequential prefix sum keeps the rounding independent of vector lane layout.
std::size_t draw_from_weights(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = u * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] == 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

}  // namespace

std::vector<double> selection_weights(std::span<const double> fitnesses, double k) {
  check_exponent(k);
  const std::vector<double> logs = log_values(fitnesses);
  const double log_max = *std::max_element(logs.begin(), logs.end());
  std::vector<double> w(logs.size());
  simd::kernels().shifted_exp(logs, log_max, k, kLogWeightCutoff, w);
  double total = 0.0;
  for (double x : w) total += x;
  for (double& x : w) x /= total;
  return w;
}

std::size_t select_reference(std::span<const double> fitnesses, double k, Rng& rng) {
  check_exponent(k);
  const std::vector<double> logs = log_values(fitnesses);
  const double log_max = *std::max_element(logs.begin(), logs.end());
  std::vector<double> w(logs.size());
  simd::kernels().shifted_exp(logs, log_max, k, kLogWeightCutoff, w);
  return draw_from_weights(w, uniform01(rng));
}

namespace {

constexpr std::size_t kMaxTail = 64;
constexpr double kRebuildGrowth = 1.0 / 32.0;  // rebuild once k exceeds k0 (1 + this)
constexpr double kMaxTailLogWeight = 32.0;     // keeps tail weights far from overflow
constexpr int kMaxRejections = 64;

}  // namespace

void SelectionPool::add(double fitness) {
  check_fitness(fitness);
  const double lf = std::log(fitness);
  if (total_ == 0 || lf > log_max_) log_max_ = lf;
  tail_log_.push_back(lf);
  tail_index_.push_back(total_);
  ++total_;
}

double SelectionPool::best_fitness() const {
  if (total_ == 0) throw std::logic_error("empty selection pool");
  return std::exp(log_max_);
}

void SelectionPool::rebuild(double k) {
  cache_log_.insert(cache_log_.end(), tail_log_.begin(), tail_log_.end());
  cache_index_.insert(cache_index_.end(), tail_index_.begin(), tail_index_.end());
  tail_log_.clear();
  tail_index_.clear();
  ref_ = log_max_;
  cache_k_ = k;
  std::size_t keep = 0;
  for (std::size_t i = 0; i < cache_log_.size(); ++i) {
    // Same expression the kernel evaluates; see kernels.hpp.
    const double t = k * (cache_log_[i] - ref_);
    if (t < kLogWeightCutoff) continue;
    cache_log_[keep] = cache_log_[i];
    cache_index_[keep] = cache_index_[i];
    ++keep;
  }
  cache_log_.resize(keep);
  cache_index_.resize(keep);
  prefix_.resize(keep);
  simd::kernels().shifted_exp(cache_log_, ref_, k, kLogWeightCutoff, prefix_);
  double acc = 0.0;
  for (double& w : prefix_) {
    acc += w;
    w = acc;
  }
}

std::size_t SelectionPool::draw(double k, Rng& rng) {
  check_exponent(k);
  if (total_ == 0) throw std::invalid_argument("selection over an empty history");
  if (k < last_k_) throw std::logic_error("selection exponent must not decrease");
  last_k_ = k;
  if (cache_log_.empty() || tail_log_.size() > kMaxTail || k > cache_k_ * (1.0 + kRebuildGrowth) ||
      k * (log_max_ - ref_) > kMaxTailLogWeight) {
    rebuild(k);
  }

  tail_weight_.resize(tail_log_.size());
  double tail_total = 0.0;
  for (std::size_t t = 0; t < tail_log_.size(); ++t) {
    const double arg = k * (tail_log_[t] - ref_);
    tail_weight_[t] = arg < kLogWeightCutoff ? 0.0 : std::exp(arg);
    tail_total += tail_weight_[t];
  }

  for (int rejected = 0;; ++rejected) {
    if (rejected == kMaxRejections) {
      // Acceptance is poor; restart from exact weights at this k.
      rebuild(k);
      tail_weight_.clear();
      tail_total = 0.0;
    }
    const double cache_total = prefix_.empty() ? 0.0 : prefix_.back();
    const double u = uniform01(rng) * (cache_total + tail_total);
    if (u >= cache_total && tail_total > 0.0) {
      double acc = cache_total;
      std::size_t last_positive = 0;
      for (std::size_t t = 0; t < tail_weight_.size(); ++t) {
        if (tail_weight_[t] == 0.0) continue;
        acc += tail_weight_[t];
        last_positive = t;
        if (u < acc) return tail_index_[t];
      }
      return tail_index_[last_positive];
    }
    const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
    const std::size_t i =
        it == prefix_.end() ? prefix_.size() - 1 : static_cast<std::size_t>(it - prefix_.begin());
    const double excess = (k - cache_k_) * (cache_log_[i] - ref_);
    if (excess == 0.0 || uniform01(rng) < std::exp(excess)) return cache_index_[i];
  }
}

}  // namespace sofa
