#pragma once

// Node-local subproblem
//
//   Gamma_k(dx) = (1/K) f(v_k) + <grad f(v_k), A_k dx>
//               + K/(2 tau) ||A_k dx||^2 + sum_{i in P_k} g_i(x_i + dx_i)
//
// and its solvers. For a single column the minimizer has a closed form;
// wider blocks use cyclic coordinate descent built on that closed form.

#include <algorithm>
#include <cmath>
#include <string>

#include "cola/error.hpp"
#include "cola/objectives.hpp"
#include "cola/types.hpp"

namespace cola {

struct LocalProblem {
  Matrix columns;      // A_k, m x |P_k|
  Vector grad_at_v;    // grad f(v_k)
  double f_at_v = 0.0; // f(v_k)
  Vector x;            // current x_[k]
  Index nodes = 1;     // K
  double tau = 1.0;
  ElasticNet reg;

  void check() const {
    if (columns.rows() != grad_at_v.size() || columns.cols() != x.size()) {
      throw Error(ErrorKind::DimensionMismatch, "local problem does not conform");
    }
    if (nodes < 1 || !(tau > 0.0)) {
      throw Error(ErrorKind::InvalidConfig, "need K >= 1 and tau > 0");
    }
  }
};

struct SolverOptions {
  double tol = 1e-10;
  int max_sweeps = 100;
};

inline double gamma_value(const LocalProblem& p, const Vector& dx) {
  p.check();
  if (dx.size() != p.x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "dx length differs from block size");
  }
  const double k = static_cast<double>(p.nodes);
  const Vector adx = p.columns * dx;
  return p.f_at_v / k + p.grad_at_v.dot(adx) + k / (2.0 * p.tau) * adx.squaredNorm() +
         p.reg.value(p.x + dx);
}

/// Minimizes p_dot*d + (q/2) d^2 + g(x_cur + d) over d and returns d.
///
/// With u = x_cur + d the minimizer is
///   u* = S_{lambda(1-eta)}(q x_cur - p_dot) / (q + lambda eta).
inline double solve_single_coordinate(double p_dot, double q, double x_cur,
                                      double lambda, double eta) {
  if (!(q > 0.0)) {
    throw Error(ErrorKind::DegenerateColumn, "local column has zero norm");
  }
  const double l1 = lambda * (1.0 - eta);
  const double l2 = lambda * eta;
  const double u = soft_threshold(q * x_cur - p_dot, l1) / (q + l2);
  return u - x_cur;
}

/// Cyclic coordinate descent on Gamma_k. Stops when the largest update in a
/// sweep drops below `tol`. A one-column block is solved exactly in a single
/// sweep.
inline Vector solve_block(const LocalProblem& p, SolverOptions opts = {}) {
  p.check();
  const Index width = p.columns.cols();
  if (width < 1) throw Error(ErrorKind::DimensionMismatch, "empty block");
  const double scale = static_cast<double>(p.nodes) / p.tau;

  Vector q(width);
  for (Index j = 0; j < width; ++j) {
    q(j) = scale * p.columns.col(j).squaredNorm();
    if (!(q(j) > 0.0)) {
      throw Error(ErrorKind::DegenerateColumn,
                  "local column " + std::to_string(j) + " is identically zero",
                  std::nullopt, static_cast<std::size_t>(j));
    }
  }

  Vector dx = Vector::Zero(width);
  // Gradient of the smooth part w.r.t. A_k dx: grad f(v) + (K/tau) A_k dx.
  Vector r = p.grad_at_v;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double largest = 0.0;
    for (Index j = 0; j < width; ++j) {
      const double pj = p.columns.col(j).dot(r);
      const double step = solve_single_coordinate(pj, q(j), p.x(j) + dx(j),
                                                  p.reg.lambda(), p.reg.eta());
      if (step != 0.0) {
        dx(j) += step;
        r.noalias() += (scale * step) * p.columns.col(j);
      }
      largest = std::max(largest, std::abs(step));
    }
    if (width == 1 || largest < opts.tol) break;
  }
  return dx;
}

}  // namespace cola
