#pragma once

// Noiseless BBOB-style test functions (mandatory subset F1, F2, F3, F9, F10,
// F11, F16, F21) with deterministic instance generation. Every instance is
// shifted so that its optimum value is exactly 0.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affbench/error.hpp"
#include "affbench/rng.hpp"

namespace affbench {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr std::array<int, 8> kMandatoryFunctions = {1, 2, 3, 9, 10, 11, 16, 21};
inline constexpr double kDomainBound = 5.0;

constexpr bool is_supported_function(int function_id) noexcept {
  return std::ranges::find(kMandatoryFunctions, function_id) != kMandatoryFunctions.end();
}

struct ProblemId {
  int function_id = 1;
  int instance_id = 1;
  int dimension = 2;

  friend bool operator==(const ProblemId&, const ProblemId&) = default;
};

struct PlacementPolicy {
  enum class Mode { uniform, fixed_norm };

  Mode mode = Mode::uniform;
  double norm = 1.0;  // fixed_norm only

  static PlacementPolicy uniform() { return {}; }
  static PlacementPolicy fixed_norm(double norm) { return {Mode::fixed_norm, norm}; }

  void validate() const {
    if (mode == Mode::fixed_norm && !(norm > 0.0 && norm <= 4.0))
      throw ConfigError("fixed_norm placement requires 0 < norm <= 4, got " + std::to_string(norm));
  }

  friend bool operator==(const PlacementPolicy&, const PlacementPolicy&) = default;
};

/// Gallagher peak set. Peak 0 is the global optimum.
struct PeakSet {
  Matrix locations;     // D x peaks, original space
  Matrix rotated;       // R * locations, cached for evaluation
  Vector weights;       // per peak
  Matrix conditioning;  // D x peaks, diagonal of C_k (already divided by alpha_k^(1/4))
  Vector alphas;        // per-peak condition number alpha_k
};

// ---------------------------------------------------------------------------
// Transformations

inline double tosz(double x) noexcept {
  if (x == 0.0) return 0.0;
  const double xh = std::log(std::abs(x));
  const double c1 = x > 0.0 ? 10.0 : 5.5;
  const double c2 = x > 0.0 ? 7.9 : 3.1;
  return std::copysign(std::exp(xh + 0.049 * (std::sin(c1 * xh) + std::sin(c2 * xh))), x);
}

inline Vector tosz(const Vector& x) { return x.unaryExpr([](double v) { return tosz(v); }); }

inline Vector tasy(const Vector& x, double beta, int dimension) {
  if (dimension < 2) throw ConfigError("tasy requires D >= 2");
  if (x.size() != dimension) throw DimensionMismatch("tasy: vector length differs from D");
  Vector out = x;
  for (int i = 0; i < dimension; ++i) {
    if (x[i] > 0.0) {
      const double frac = static_cast<double>(i) / (dimension - 1);
      out[i] = std::pow(x[i], 1.0 + beta * frac * std::sqrt(x[i]));
    }
  }
  return out;
}

/// Diagonal of the conditioning matrix Lambda^alpha.
inline Vector lambda_alpha(double alpha_cond, int dimension) {
  if (!(alpha_cond >= 1.0)) throw ConfigError("lambda_alpha requires alpha_cond >= 1");
  if (dimension < 2) throw ConfigError("lambda_alpha requires D >= 2");
  Vector diag(dimension);
  for (int i = 0; i < dimension; ++i)
    diag[i] = std::pow(alpha_cond, 0.5 * static_cast<double>(i) / (dimension - 1));
  return diag;
}

/// Boundary penalty for [-5, 5]^D.
inline double f_pen(const Vector& x) noexcept {
  double s = 0.0;
  for (double v : x) {
    const double excess = std::abs(v) - kDomainBound;
    if (excess > 0.0) s += excess * excess;
  }
  return s;
}

/// Gaussian matrix orthonormalized column-wise with modified Gram-Schmidt.
inline Matrix random_rotation(Stream& stream, int dimension) {
  if (dimension < 2) throw ConfigError("random_rotation requires D >= 2");
  constexpr int kMaxAttempts = 100;
  Matrix m(dimension, dimension);
  for (int j = 0; j < dimension; ++j) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == kMaxAttempts)
        throw DegenerateStream("random_rotation: column " + std::to_string(j) + " stayed degenerate");
      Vector col(dimension);
      for (int i = 0; i < dimension; ++i) col[i] = stream.gaussian();
      for (int k = 0; k < j; ++k) col -= m.col(k).dot(col) * m.col(k);
      const double norm = col.norm();
      if (norm >= 1e-12) {
        m.col(j) = col / norm;
        break;
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------

class ProblemInstance;
ProblemInstance make_problem(const ProblemId& id, const PlacementPolicy& policy = {});

/// An instantiated test function. Immutable after construction; evaluation is
/// pure and thread-safe.
class ProblemInstance {
 public:
  const ProblemId& id() const noexcept { return id_; }
  int dimension() const noexcept { return id_.dimension; }
  const Vector& optimum_location() const noexcept { return optimum_; }
  double optimum_value() const noexcept { return 0.0; }
  const Matrix& rotation_r() const noexcept { return rot_r_; }
  const Matrix& rotation_q() const noexcept { return rot_q_; }
  const std::optional<PeakSet>& peaks() const noexcept { return peaks_; }
  const PlacementPolicy& placement() const noexcept { return policy_; }

  double evaluate(const Vector& x) const {
    if (x.size() != id_.dimension)
      throw DimensionMismatch("evaluate: expected " + std::to_string(id_.dimension) +
                              " coordinates, got " + std::to_string(x.size()));
    switch (id_.function_id) {
      case 1: return sphere(x);
      case 2: return ellipsoid_separable(x);
      case 3: return rastrigin(x);
      case 9: return rosenbrock_rotated(x);
      case 10: return ellipsoid_rotated(x);
      case 11: return discus(x);
      case 16: return weierstrass(x);
      case 21: return gallagher(x);
      default: throw UnsupportedFunction("function " + std::to_string(id_.function_id));
    }
  }

  double operator()(const Vector& x) const { return evaluate(x); }

 private:
  friend ProblemInstance make_problem(const ProblemId&, const PlacementPolicy&);

  ProblemInstance() = default;

  static double weighted_ellipsoid(const Vector& z) {
    const int d = static_cast<int>(z.size());
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      s += std::pow(10.0, 6.0 * static_cast<double>(i) / (d - 1)) * z[i] * z[i];
    return s;
  }

  double sphere(const Vector& x) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) s += (x[i] - optimum_[i]) * (x[i] - optimum_[i]);
    return s;
  }

  double ellipsoid_separable(const Vector& x) const { return weighted_ellipsoid(tosz(Vector(x - optimum_))); }

  double rastrigin(const Vector& x) const {
    const int d = dimension();
    const Vector z = lambda10_.cwiseProduct(tasy(tosz(Vector(x - optimum_)), 0.2, d));
    double cos_sum = 0.0;
    for (double v : z) cos_sum += std::cos(2.0 * std::numbers::pi * v);
    return 10.0 * (d - cos_sum) + z.squaredNorm();
  }

  double rosenbrock_rotated(const Vector& x) const {
    const Vector z = (rosen_scale_ * (rot_r_ * x)).array() + 0.5;
    double s = 0.0;
    for (int i = 0; i + 1 < dimension(); ++i) {
      const double a = z[i] * z[i] - z[i + 1];
      const double b = z[i] - 1.0;
      s += 100.0 * a * a + b * b;
    }
    return s;
  }

  double ellipsoid_rotated(const Vector& x) const {
    return weighted_ellipsoid(tosz(Vector(rot_r_ * (x - optimum_))));
  }

  double discus(const Vector& x) const {
    const Vector z = tosz(Vector(rot_r_ * (x - optimum_)));
    return 1e6 * z[0] * z[0] + z.tail(z.size() - 1).squaredNorm();
  }

  double weierstrass(const Vector& x) const {
    constexpr int kTerms = 12;
    const int d = dimension();
    const Vector z = weierstrass_map_ * tosz(Vector(rot_r_ * (x - optimum_)));
    double total = 0.0;
    for (double zi : z) {
      double pow2 = 1.0;
      double pow3 = 1.0;
      for (int k = 0; k < kTerms; ++k) {
        total += pow2 * std::cos(2.0 * std::numbers::pi * pow3 * (zi + 0.5));
        pow2 *= 0.5;
        pow3 *= 3.0;
      }
    }
    const double inner = total / d - weierstrass_f0_;
    return 10.0 * inner * inner * inner + 10.0 / d * f_pen(x);
  }

  double gallagher(const Vector& x) const {
    const PeakSet& p = *peaks_;
    const int d = dimension();
    const Vector u = rot_r_ * x;
    double best = 0.0;
    for (Eigen::Index k = 0; k < p.weights.size(); ++k) {
      const double quad = (u - p.rotated.col(k)).array().square().matrix().dot(p.conditioning.col(k));
      best = std::max(best, p.weights[k] * std::exp(-quad / (2.0 * d)));
    }
    const double t = tosz(10.0 - best);
    return t * t + f_pen(x);
  }

  ProblemId id_;
  PlacementPolicy policy_;
  Vector optimum_;
  Matrix rot_r_;
  Matrix rot_q_;
  std::optional<PeakSet> peaks_;

  // Derived per-function constants.
  Vector lambda10_;         // F3
  double rosen_scale_ = 1;  // F9
  Matrix weierstrass_map_;  // F16: R * Lambda^(1/100) * Q
  double weierstrass_f0_ = 0;
};

namespace detail {

inline Vector place_optimum(Stream& stream, int dimension, const PlacementPolicy& policy) {
  Vector o(dimension);
  if (policy.mode == PlacementPolicy::Mode::uniform) {
    for (int i = 0; i < dimension; ++i) o[i] = stream.uniform(-4.0, 4.0);
    return o;
  }
  double n = 0.0;
  do {
    for (int i = 0; i < dimension; ++i) o[i] = stream.gaussian();
    n = o.norm();
  } while (n < 1e-12);
  return o * (policy.norm / n);
}

inline PeakSet gallagher_peaks(const Vector& optimum, const Matrix& rot_r, Stream& stream) {
  constexpr int kPeaks = 101;
  const int d = static_cast<int>(optimum.size());
  PeakSet p;
  p.locations.resize(d, kPeaks);
  p.weights.resize(kPeaks);
  p.alphas.resize(kPeaks);
  p.conditioning.resize(d, kPeaks);

  p.locations.col(0) = optimum;
  p.weights[0] = 10.0;
  p.alphas[0] = 1000.0;

  std::vector<double> conds(kPeaks - 1);
  for (int k = 2; k <= kPeaks; ++k) conds[k - 2] = std::pow(1000.0, (k - 1) / 99.0);
  for (std::size_t i = conds.size() - 1; i > 0; --i) std::swap(conds[i], conds[stream.below(i + 1)]);

  for (int k = 2; k <= kPeaks; ++k) {
    for (int i = 0; i < d; ++i) p.locations(i, k - 1) = stream.uniform(-4.9, 4.3);
    p.weights[k - 1] = 1.1 + 8.0 * (k - 2) / 99.0;
    p.alphas[k - 1] = conds[k - 2];
  }

  // C_k = Lambda^(alpha_k) / alpha_k^(1/4), diagonal entries randomly permuted per peak.
  for (int k = 0; k < kPeaks; ++k) {
    Vector diag = lambda_alpha(p.alphas[k], d) / std::pow(p.alphas[k], 0.25);
    for (int i = d - 1; i > 0; --i) std::swap(diag[i], diag[static_cast<int>(stream.below(i + 1))]);
    p.conditioning.col(k) = diag;
  }
  p.rotated = rot_r * p.locations;
  return p;
}

inline bool nonnegative_on_sample(const ProblemInstance& p, int samples) {
  Stream s = instance_stream(p.id().function_id, p.id().instance_id, 99);
  Vector x(p.dimension());
  for (int n = 0; n < samples; ++n) {
    for (int i = 0; i < x.size(); ++i) x[i] = s.uniform(-kDomainBound, kDomainBound);
    if (!(p.evaluate(x) >= -1e-9)) return false;
  }
  return true;
}

}  // namespace detail

/// Instantiates a test function. Stream tags: 0 optimum, 1 rotation R,
/// 2 rotation Q, 3 Gallagher peaks.
inline ProblemInstance make_problem(const ProblemId& id, const PlacementPolicy& policy) {
  if (!is_supported_function(id.function_id))
    throw UnsupportedFunction("unsupported function id " + std::to_string(id.function_id));
  if (id.dimension < 2) throw ConfigError("dimension must be >= 2");
  if (id.instance_id < 1) throw ConfigError("instance id must be >= 1");
  policy.validate();

  const int d = id.dimension;
  const int f = id.function_id;
  ProblemInstance p;
  p.id_ = id;
  p.policy_ = policy;

  Stream placement = instance_stream(f, id.instance_id, 0);
  p.optimum_ = detail::place_optimum(placement, d, policy);

  const bool rotated = f == 9 || f == 10 || f == 11 || f == 16 || f == 21;
  if (rotated) {
    Stream sr = instance_stream(f, id.instance_id, 1);
    p.rot_r_ = random_rotation(sr, d);
  } else {
    p.rot_r_ = Matrix::Identity(d, d);
  }
  if (f == 16) {
    Stream sq = instance_stream(f, id.instance_id, 2);
    p.rot_q_ = random_rotation(sq, d);
  } else {
    p.rot_q_ = Matrix::Identity(d, d);
  }

  switch (f) {
    case 3:
      p.lambda10_ = lambda_alpha(10.0, d);
      break;
    case 9:
      // The rotated Rosenbrock optimum is pinned where z = 1.
      p.rosen_scale_ = std::max(1.0, std::sqrt(static_cast<double>(d)) / 8.0);
      p.optimum_ = p.rot_r_.transpose() * Vector::Constant(d, 0.5 / p.rosen_scale_);
      break;
    case 16: {
      const Vector shrink = lambda_alpha(100.0, d).cwiseInverse();
      p.weierstrass_map_ = p.rot_r_ * shrink.asDiagonal() * p.rot_q_;
      double f0 = 0.0;
      double pow2 = 1.0;
      double pow3 = 1.0;
      for (int k = 0; k < 12; ++k) {
        f0 += pow2 * std::cos(std::numbers::pi * pow3);
        pow2 *= 0.5;
        pow3 *= 3.0;
      }
      p.weierstrass_f0_ = f0;
      break;
    }
    case 21: {
      Stream sp = instance_stream(f, id.instance_id, 3);
      p.peaks_ = detail::gallagher_peaks(p.optimum_, p.rot_r_, sp);
      break;
    }
    default:
      break;
  }

#ifndef NDEBUG
  if (f == 3 || f == 9 || f == 16 || f == 21) {
    if (!detail::nonnegative_on_sample(p, 10000))
      throw std::logic_error("instance of F" + std::to_string(f) + " evaluates below zero");
  }
#endif
  return p;
}

}  // namespace affbench
