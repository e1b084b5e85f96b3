#pragma once

// Doubly-stochastic mixing matrices and the neighbor lists they induce.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "cola/error.hpp"
#include "cola/types.hpp"

namespace cola {

struct MixingTopology {
  Matrix weights;
  // neighbors[k]: nodes l != k with weights(k, l) != 0, ascending.
  std::vector<std::vector<std::size_t>> neighbors;

  std::size_t size() const { return static_cast<std::size_t>(weights.rows()); }

  /// Column vectors sent per round: each node sends v_k once to every neighbor.
  std::size_t messages_per_round() const {
    std::size_t total = 0;
    for (const auto& n : neighbors) total += n.size();
    return total;
  }
};

namespace detail {

inline std::vector<std::vector<std::size_t>> neighbor_lists(const Matrix& w) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(w.rows()));
  for (Index k = 0; k < w.rows(); ++k) {
    for (Index l = 0; l < w.cols(); ++l) {
      if (l != k && w(k, l) != 0.0) out[k].push_back(static_cast<std::size_t>(l));
    }
  }
  return out;
}

}  // namespace detail

/// Accepts W iff it is square, nonnegative, and every row and column sums to
/// 1 within 1e-9.
inline MixingTopology validate_topology(const Matrix& w) {
  if (w.rows() < 1 || w.rows() != w.cols()) {
    throw Error(ErrorKind::InvalidTopology, "mixing matrix must be square and nonempty");
  }
  for (Index i = 0; i < w.rows(); ++i) {
    for (Index j = 0; j < w.cols(); ++j) {
      if (!std::isfinite(w(i, j))) {
        throw Error(ErrorKind::InvalidTopology, "non-finite weight",
                    static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
      if (w(i, j) < 0.0) {
        throw Error(ErrorKind::NegativeWeight,
                    "negative weight at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")",
                    static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  constexpr double kTol = 1e-9;
  double worst = 0.0;
  std::string where;
  for (Index i = 0; i < w.rows(); ++i) {
    const double row_dev = std::abs(w.row(i).sum() - 1.0);
    const double col_dev = std::abs(w.col(i).sum() - 1.0);
    if (row_dev > worst) {
      worst = row_dev;
      where = "row " + std::to_string(i);
    }
    if (col_dev > worst) {
      worst = col_dev;
      where = "column " + std::to_string(i);
    }
  }
  if (worst > kTol) {
    std::ostringstream msg;
    msg << "worst deviation " << worst << " at " << where;
    throw Error(ErrorKind::NotDoublyStochastic, msg.str());
  }
  return MixingTopology{w, detail::neighbor_lists(w)};
}

/// Ring over nodes in index order: W(k,k) = W(k,k-1) = W(k,k+1) = 1/3.
inline MixingTopology ring_topology(std::size_t nodes) {
  if (nodes < 3) {
    throw Error(ErrorKind::TopologyTooSmall,
                "a ring needs at least 3 nodes; use the complete topology");
  }
  const auto k_count = static_cast<Index>(nodes);
  Matrix w = Matrix::Zero(k_count, k_count);
  for (Index k = 0; k < k_count; ++k) {
    w(k, k) = 1.0 / 3.0;
    w(k, (k + 1) % k_count) = 1.0 / 3.0;
    w(k, (k + k_count - 1) % k_count) = 1.0 / 3.0;
  }
  return MixingTopology{w, detail::neighbor_lists(w)};
}

inline MixingTopology complete_topology(std::size_t nodes) {
  if (nodes < 1) throw Error(ErrorKind::InvalidTopology, "need at least one node");
  const auto k_count = static_cast<Index>(nodes);
  Matrix w = Matrix::Constant(k_count, k_count, 1.0 / static_cast<double>(nodes));
  return MixingTopology{w, detail::neighbor_lists(w)};
}

/// Plain-text format: first token K, then K rows of K weights.
inline MixingTopology parse_topology(std::istream& in) {
  long long count = 0;
  if (!(in >> count) || count < 1) {
    throw Error(ErrorKind::InvalidTopology, "topology file must start with K >= 1");
  }
  Matrix w(count, count);
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < count; ++j) {
      if (!(in >> w(i, j))) {
        throw Error(ErrorKind::InvalidTopology,
                    "expected " + std::to_string(count * count) + " weights",
                    static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  std::string trailing;
  if (in >> trailing) {
    throw Error(ErrorKind::InvalidTopology, "trailing data after weight matrix");
  }
  return validate_topology(w);
}

inline MixingTopology read_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open topology file " + path);
  return parse_topology(in);
}

inline void write_topology(std::ostream& out, const MixingTopology& t) {
  out.precision(17);
  out << t.size() << '\n';
  for (Index i = 0; i < t.weights.rows(); ++i) {
    for (Index j = 0; j < t.weights.cols(); ++j) {
      if (j) out << ' ';
      out << t.weights(i, j);
    }
    out << '\n';
  }
}

}  // namespace cola
