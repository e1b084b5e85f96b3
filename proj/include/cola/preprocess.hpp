#pragma once

// Column-wise centering and normalization. Each column is handled on its
// own, so a node can transform its columns without talking to anyone.
//
// Note that nu is the root-mean-square of the *original* column, not the
// standard deviation of the centered one. A transformed column therefore
// has mean 0 and mean square 1 - (mu/nu)^2, not 1.

#include <cmath>
#include <string>
#include <utility>

#include "cola/error.hpp"
#include "cola/model.hpp"
#include "cola/types.hpp"

namespace cola {

struct ColumnStats {
  Vector mu;
  Vector nu;
};

struct ColumnMoments {
  double mu;
  double nu;
};

inline ColumnMoments column_stats(const Eigen::Ref<const Vector>& col) {
  if (col.size() < 1) throw Error(ErrorKind::EmptyDataset, "empty column");
  const double m = static_cast<double>(col.size());
  const double mu = col.sum() / m;
  const double nu = std::sqrt(col.squaredNorm() / m);
  if (!(nu > 0.0)) {
    throw Error(ErrorKind::DegenerateColumn, "column has zero magnitude");
  }
  return {mu, nu};
}

inline Matrix apply_stats(const Matrix& features, const ColumnStats& stats) {
  if (features.cols() != stats.mu.size() || stats.mu.size() != stats.nu.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix has " + std::to_string(features.cols()) +
                    " columns, stats cover " + std::to_string(stats.mu.size()));
  }
  Matrix out(features.rows(), features.cols());
  for (Index j = 0; j < features.cols(); ++j) {
    out.col(j) = (features.col(j).array() - stats.mu(j)) / stats.nu(j);
  }
  return out;
}

/// Transforms every feature column as (A_ij - mu_j) / nu_j. The target is
/// returned untouched.
inline std::pair<ColumnDataset, ColumnStats> preprocess_matrix(const ColumnDataset& d) {
  ColumnStats stats{Vector(d.cols()), Vector(d.cols())};
  for (Index j = 0; j < d.cols(); ++j) {
    try {
      const auto s = column_stats(d.features.col(j));
      stats.mu(j) = s.mu;
      stats.nu(j) = s.nu;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateColumn) throw;
      throw Error(ErrorKind::DegenerateColumn,
                  "column " + std::to_string(j) + " is identically zero",
                  std::nullopt, static_cast<std::size_t>(j));
    }
  }
  ColumnDataset out = d;
  out.features = apply_stats(d.features, stats);
  return {std::move(out), std::move(stats)};
}

}  // namespace cola
