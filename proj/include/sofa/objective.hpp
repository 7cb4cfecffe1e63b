#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sofa {

enum class InfeasibleReason : std::uint8_t {
  NonPositiveEnergy,    // a stage cannot mature or reproduce
  NoEigenvalueBracket,  // characteristic equation has no root in the scan range
  InvalidRates,         // a derived rate is negative or not finite
  NonFinite,            // objective produced NaN/inf
  Other,
};

std::string_view to_string(InfeasibleReason reason);

// Either a strictly positive fitness value or an infeasibility tag.
class FitnessOutcome {
 public:
  // Throws std::invalid_argument unless value > 0 and finite.
  static FitnessOutcome feasible(double value);
  static FitnessOutcome infeasible(InfeasibleReason reason) { return FitnessOutcome(reason); }

  bool is_feasible() const { return feasible_; }
  // Throws std::logic_error on an infeasible outcome.
  double value() const;
  InfeasibleReason reason() const { return reason_; }

 private:
  explicit FitnessOutcome(double v) : feasible_(true), value_(v) {}
  explicit FitnessOutcome(InfeasibleReason r) : feasible_(false), reason_(r) {}

  bool feasible_ = false;
  double value_ = 0.0;
  InfeasibleReason reason_ = InfeasibleReason::Other;
};

struct KnownOptimum {
  std::vector<double> coords;
  double value = 0.0;
};

// Positive objective functional. The optimizer always passes a point padded
// to the full domain dimension; shorter inputs are zero-padded by the
// synthetic objectives. Evaluation must be reentrant.
class Objective {
 public:
  using Function = std::function<FitnessOutcome(std::span<const double>)>;

  Objective(std::string name, Function fn, std::optional<KnownOptimum> optimum = std::nullopt)
      : name_(std::move(name)), fn_(std::move(fn)), optimum_(std::move(optimum)) {}

  FitnessOutcome operator()(std::span<const double> z) const { return fn_(z); }
  FitnessOutcome evaluate(std::span<const double> z) const { return fn_(z); }

  const std::string& name() const { return name_; }
  const std::optional<KnownOptimum>& known_optimum() const { return optimum_; }

 private:
  std::string name_;
  Function fn_;
  std::optional<KnownOptimum> optimum_;
};

}  // namespace sofa
