#pragma once

// Smooth losses f(v), v = Ax, and separable regularizers g(x).

#include <cmath>
#include <string>

#include "cola/error.hpp"
#include "cola/types.hpp"

namespace cola {

/// A convex loss that is (1/tau)-smooth:
///   f(y) <= f(z) + <grad f(z), y - z> + 1/(2 tau) ||y - z||^2.
class SmoothLoss {
 public:
  virtual ~SmoothLoss() = default;
  virtual double value(const Vector& v) const = 0;
  virtual Vector gradient(const Vector& v) const = 0;
  virtual double tau() const = 0;
  virtual Index dimension() const = 0;
};

/// f(v) = 1/2 ||v - b||^2, smooth with tau = 1.
class LeastSquaresLoss final : public SmoothLoss {
 public:
  explicit LeastSquaresLoss(Vector b) : b_(std::move(b)) {}

  double value(const Vector& v) const override {
    check(v);
    return 0.5 * (v - b_).squaredNorm();
  }

  Vector gradient(const Vector& v) const override {
    check(v);
    return v - b_;
  }

  double tau() const override { return 1.0; }
  Index dimension() const override { return b_.size(); }
  const Vector& target() const { return b_; }

 private:
  void check(const Vector& v) const {
    if (v.size() != b_.size()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "loss expects length " + std::to_string(b_.size()) +
                      ", got " + std::to_string(v.size()));
    }
  }

  Vector b_;
};

inline double loss_value(const SmoothLoss& f, const Vector& v) { return f.value(v); }
inline Vector loss_gradient(const SmoothLoss& f, const Vector& v) { return f.gradient(v); }

/// g(x) = lambda * sum_j [ (eta/2) x_j^2 + (1 - eta) |x_j| ].
///
/// lambda = 0 is the zero regularizer, eta = 0 is the lasso, eta = 1 ridge.
class ElasticNet {
 public:
  ElasticNet() = default;
  ElasticNet(double lambda, double eta) : lambda_(lambda), eta_(eta) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw Error(ErrorKind::InvalidConfig, "lambda must be >= 0");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "eta must lie in [0, 1]");
    }
  }

  double lambda() const { return lambda_; }
  double eta() const { return eta_; }

  /// L1 weight lambda (1 - eta).
  double l1() const { return lambda_ * (1.0 - eta_); }
  /// L2 curvature lambda eta.
  double l2() const { return lambda_ * eta_; }

  double coordinate(double xj) const {
    return lambda_ * (0.5 * eta_ * xj * xj + (1.0 - eta_) * std::abs(xj));
  }

  double value(const Vector& x) const {
    return lambda_ * (0.5 * eta_ * x.squaredNorm() + (1.0 - eta_) * x.lpNorm<1>());
  }

 private:
  double lambda_ = 0.0;
  double eta_ = 0.0;
};

inline double reg_value(const ElasticNet& g, const Vector& x) { return g.value(x); }

/// O_A(x) = f(Ax) + g(x). Needs the full matrix, so it is telemetry only.
inline double global_objective(const SmoothLoss& f, const ElasticNet& g,
                               const Matrix& a, const Vector& x) {
  if (a.cols() != x.size() || a.rows() != f.dimension()) {
    throw Error(ErrorKind::DimensionMismatch, "A, x and loss do not conform");
  }
  return f.value(a * x) + g.value(x);
}

/// sign(z) max(|z| - theta, 0). Returns exactly 0 on the kink |z| == theta.
inline double soft_threshold(double z, double theta) {
  if (z > theta) return z - theta;
  if (z < -theta) return z + theta;
  return 0.0;
}

}  // namespace cola
