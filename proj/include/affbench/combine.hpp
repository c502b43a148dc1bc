#pragma once

#include <cmath>
#include <string>

#include "affbench/error.hpp"
#include "affbench/suite.hpp"

namespace affbench {

inline constexpr double kDefaultFloor = 1e-12;

/// Log-space affine combination of two instances, re-centred on the first
/// instance's optimum:
///
///   C(x) = exp( a ln d1(x) + (1 - a) ln d2(x) )
///   d1(x) = max(F1(x) - F1(O1), eps)
///   d2(x) = max(F2(x - O1 + O2) - F2(O2), eps)
///
/// The minimum value eps is attained at O1.
class CombinedProblem {
 public:
  CombinedProblem(ProblemInstance first, ProblemInstance second, double alpha,
                  double floor_eps = kDefaultFloor)
      : first_(std::move(first)), second_(std::move(second)), alpha_(alpha), floor_(floor_eps) {
    if (first_.dimension() != second_.dimension())
      throw DimensionMismatch("combine: dimensions differ (" + std::to_string(first_.dimension()) +
                              " vs " + std::to_string(second_.dimension()) + ")");
    if (!(alpha_ >= 0.0 && alpha_ <= 1.0))
      throw ConfigError("combine: alpha must lie in [0, 1], got " + std::to_string(alpha_));
    if (!(floor_ > 0.0)) throw ConfigError("combine: floor must be positive");
    shift_ = second_.optimum_location() - first_.optimum_location();
    first_at_opt_ = first_.evaluate(first_.optimum_location());
    second_at_opt_ = second_.evaluate(second_.optimum_location());
  }

  const ProblemInstance& first() const noexcept { return first_; }
  const ProblemInstance& second() const noexcept { return second_; }
  double alpha() const noexcept { return alpha_; }
  double floor_eps() const noexcept { return floor_; }
  int dimension() const noexcept { return first_.dimension(); }
  const Vector& optimum_location() const noexcept { return first_.optimum_location(); }

  /// Floored distance-to-optimum of the first side.
  double first_term(const Vector& x) const {
    return floored(first_.evaluate(x) - first_at_opt_, "first");
  }

  /// Floored distance-to-optimum of the translated second side.
  double second_term(const Vector& x) const {
    return floored(second_.evaluate(x + shift_) - second_at_opt_, "second");
  }

  double evaluate(const Vector& x) const {
    if (x.size() != dimension())
      throw DimensionMismatch("evaluate_combined: expected " + std::to_string(dimension()) +
                              " coordinates, got " + std::to_string(x.size()));
    // Skip the unused side at the endpoints.
    if (alpha_ == 1.0) return first_term(x);
    if (alpha_ == 0.0) return second_term(x);
    const double d1 = first_term(x);
    const double d2 = second_term(x);
    if (d1 == d2) return d1;
    return std::exp(alpha_ * std::log(d1) + (1.0 - alpha_) * std::log(d2));
  }

  double operator()(const Vector& x) const { return evaluate(x); }

 private:
  double floored(double d, const char* side) const {
    if (!std::isfinite(d))
      throw NonFiniteValue(std::string("combine: non-finite value on the ") + side + " side");
    return d > floor_ ? d : floor_;
  }

  ProblemInstance first_;
  ProblemInstance second_;
  double alpha_;
  double floor_;
  Vector shift_;  // O2 - O1
  double first_at_opt_ = 0;
  double second_at_opt_ = 0;
};

inline CombinedProblem combine(ProblemInstance first, ProblemInstance second, double alpha,
                               double floor_eps = kDefaultFloor) {
  return CombinedProblem(std::move(first), std::move(second), alpha, floor_eps);
}

}  // namespace affbench
