#pragma once

// Prediction, error metrics, communication accounting, overvoltage
// detection and the centralized ("collocated") baseline solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cola/error.hpp"
#include "cola/objectives.hpp"
#include "cola/preprocess.hpp"
#include "cola/trace.hpp"
#include "cola/types.hpp"

namespace cola {

/// features * x, after applying `stats` when the model was trained on
/// preprocessed columns. `intercept` is added to every prediction.
inline Vector predict(const Vector& x, const Matrix& features,
                      const std::optional<ColumnStats>& stats = std::nullopt,
                      double intercept = 0.0) {
  if (features.cols() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "coefficient count differs from column count");
  }
  Vector out = stats ? Vector(apply_stats(features, *stats) * x) : Vector(features * x);
  out.array() += intercept;
  return out;
}

struct RegressionMetrics {
  double rmse = 0.0;
  double max_abs_error = 0.0;
  double mean_error = 0.0;
  std::size_t samples = 0;
};

inline RegressionMetrics regression_metrics(const Vector& predicted, const Vector& actual) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorKind::DimensionMismatch, "prediction and actual lengths differ");
  }
  if (predicted.size() == 0) throw Error(ErrorKind::EmptyDataset, "no samples to score");
  const Vector err = predicted - actual;
  const double m = static_cast<double>(err.size());
  return {std::sqrt(err.squaredNorm() / m), err.cwiseAbs().maxCoeff(), err.sum() / m,
          static_cast<std::size_t>(err.size())};
}

enum class CommPattern { Ring, Broadcast };

/// Column vectors transmitted. Ring: every node sends v_k to two neighbors
/// per iteration. Broadcast: one-time sharing of every column with every
/// other node, independent of iterations.
inline std::uint64_t comm_cost(CommPattern pattern, std::uint64_t n, std::uint64_t iterations) {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "need at least one node");
  if (pattern == CommPattern::Ring) return 2 * n * iterations;
  return n * (n - 1);
}

/// Largest iteration count whose ring traffic stays below one broadcast.
inline std::uint64_t break_even_iterations(std::uint64_t n) {
  if (n < 3) throw Error(ErrorKind::TopologyTooSmall, "ring needs at least 3 nodes");
  return (n - 1) / 2;
}

struct CollocatedResult {
  Vector x;
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic coordinate descent on 1/2 ||Ax - b||^2 + g(x) with all data in
/// one place. Stops when the largest coordinate change in a sweep is below
/// `tol`; if `max_sweeps` runs out first the last iterate is returned with
/// converged = false.
inline CollocatedResult collocated_solve(const Matrix& a, const Vector& b, double lambda,
                                         double eta, double tol = 1e-12,
                                         int max_sweeps = 100000) {
  if (a.rows() != b.size()) throw Error(ErrorKind::DimensionMismatch, "A and b do not conform");
  const ElasticNet g(lambda, eta);
  const Index n = a.cols();
  Vector sq(n);
  for (Index j = 0; j < n; ++j) {
    sq(j) = a.col(j).squaredNorm();
    if (!(sq(j) > 0.0)) {
      throw Error(ErrorKind::DegenerateColumn, "column " + std::to_string(j) + " is zero",
                  std::nullopt, static_cast<std::size_t>(j));
    }
  }
  CollocatedResult out{Vector::Zero(n), 0, false};
  Vector residual = b;  // b - A x
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double largest = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double old = out.x(j);
      const double z = a.col(j).dot(residual) + sq(j) * old;
      const double next = soft_threshold(z, g.l1()) / (sq(j) + g.l2());
      const double change = next - old;
      if (change != 0.0) {
        residual.noalias() -= change * a.col(j);
        out.x(j) = next;
      }
      largest = std::max(largest, std::abs(change));
    }
    out.sweeps = sweep;
    if (largest < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

/// Maximal runs of samples strictly above nominal * (1 + threshold_fraction),
/// as zero-based inclusive (start, end) pairs in index order.
inline std::vector<std::pair<std::size_t, std::size_t>> detect_overvoltage(
    const Vector& voltages, double nominal, double threshold_fraction = 0.05) {
  if (!(nominal > 0.0) || !(threshold_fraction > 0.0)) {
    throw Error(ErrorKind::InvalidConfig, "nominal and threshold must be positive");
  }
  const double cutoff = nominal * (1.0 + threshold_fraction);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::optional<std::size_t> start;
  for (Index i = 0; i < voltages.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (voltages(i) > cutoff) {
      if (!start) start = idx;
    } else if (start) {
      ranges.emplace_back(*start, idx - 1);
      start.reset();
    }
  }
  if (start) ranges.emplace_back(*start, static_cast<std::size_t>(voltages.size()) - 1);
  return ranges;
}

inline bool gamma_bounds_objective(double gamma_sum, double objective) {
  return gamma_sum >= objective - 1e-9 * (1.0 + std::abs(objective));
}

/// Per round: does sum_k Gamma_k(dx_k) bound O_A at the updated x?
inline std::vector<bool> gamma_sum_check(const RunTrace& trace) {
  std::vector<bool> out;
  out.reserve(trace.rows.size());
  for (const auto& r : trace.rows) out.push_back(gamma_bounds_objective(r.gamma_sum, r.objective));
  return out;
}

}  // namespace cola
