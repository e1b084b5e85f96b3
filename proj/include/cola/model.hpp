#pragma once

// Core data model: column datasets, node partitions and experiment config.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cola/error.hpp"
#include "cola/types.hpp"

namespace cola {

/// m samples (rows) of n inverter voltage series (columns) plus the target.
struct ColumnDataset {
  Matrix features;
  Vector target;
  int sample_period_minutes = 15;
  std::vector<std::string> column_labels;

  Index rows() const { return features.rows(); }
  Index cols() const { return features.cols(); }
};

struct Violation {
  ErrorKind kind;
  std::string message;
  std::optional<std::size_t> row;
  std::optional<std::size_t> col;
};

/// Reports every invariant violation; an empty report means the dataset is ok.
inline std::vector<Violation> validate_dataset(const ColumnDataset& d) {
  std::vector<Violation> report;
  if (d.rows() < 1 || d.cols() < 1) {
    report.push_back({ErrorKind::EmptyDataset,
                      "dataset needs at least one row and one column",
                      std::nullopt, std::nullopt});
  }
  if (d.target.size() != d.rows()) {
    report.push_back({ErrorKind::DimensionMismatch,
                      "target length " + std::to_string(d.target.size()) +
                          " does not match " + std::to_string(d.rows()) +
                          " feature rows",
                      std::nullopt, std::nullopt});
  }
  if (d.sample_period_minutes <= 0) {
    report.push_back({ErrorKind::InvalidConfig,
                      "sample period must be positive", std::nullopt,
                      std::nullopt});
  }
  if (!d.column_labels.empty() &&
      static_cast<Index>(d.column_labels.size()) != d.cols()) {
    report.push_back({ErrorKind::DimensionMismatch,
                      "column label count does not match column count",
                      std::nullopt, std::nullopt});
  }
  for (Index j = 0; j < d.cols(); ++j) {
    for (Index i = 0; i < d.rows(); ++i) {
      if (!std::isfinite(d.features(i, j))) {
        report.push_back({ErrorKind::NonFiniteEntry,
                          "non-finite feature at (" + std::to_string(i) +
                              "," + std::to_string(j) + ")",
                          static_cast<std::size_t>(i),
                          static_cast<std::size_t>(j)});
      }
    }
  }
  for (Index i = 0; i < d.target.size(); ++i) {
    if (!std::isfinite(d.target(i))) {
      report.push_back({ErrorKind::NonFiniteEntry,
                        "non-finite target at row " + std::to_string(i),
                        static_cast<std::size_t>(i), std::nullopt});
    }
  }
  return report;
}

/// Throws the first violation found by validate_dataset.
inline void ensure_valid(const ColumnDataset& d) {
  auto report = validate_dataset(d);
  if (!report.empty()) {
    const auto& v = report.front();
    throw Error(v.kind, v.message, v.row, v.col);
  }
}

/// Disjoint assignment of zero-based column indices to K nodes.
struct Partition {
  std::vector<std::vector<std::size_t>> sets;

  std::size_t node_count() const { return sets.size(); }
  std::size_t column_count() const {
    std::size_t n = 0;
    for (const auto& s : sets) n += s.size();
    return n;
  }
};

inline void validate_partition(const Partition& p, std::size_t n) {
  if (p.sets.empty()) throw Error(ErrorKind::InvalidPartition, "no nodes");
  std::vector<bool> seen(n, false);
  std::size_t total = 0;
  for (std::size_t k = 0; k < p.sets.size(); ++k) {
    if (p.sets[k].empty()) {
      throw Error(ErrorKind::InvalidPartition,
                  "node " + std::to_string(k) + " holds no columns");
    }
    for (auto j : p.sets[k]) {
      if (j >= n) {
        throw Error(ErrorKind::InvalidPartition,
                    "column " + std::to_string(j) + " out of range");
      }
      if (seen[j]) {
        throw Error(ErrorKind::InvalidPartition,
                    "column " + std::to_string(j) + " assigned twice");
      }
      seen[j] = true;
      ++total;
    }
  }
  if (total != n) {
    throw Error(ErrorKind::InvalidPartition, "partition does not cover all columns");
  }
}

enum class PartitionStrategy { OnePerNode, Blocks };

/// Splits columns 0..n-1 over K nodes.
///
/// OnePerNode requires K == n. Blocks yields contiguous blocks whose sizes
/// differ by at most one, with the larger blocks on the lower node indices.
inline Partition partition_columns(std::size_t n, std::size_t nodes,
                                   PartitionStrategy strategy) {
  if (nodes < 1 || nodes > n) {
    throw Error(ErrorKind::InvalidPartition,
                "need 1 <= K <= n, got K=" + std::to_string(nodes) +
                    " n=" + std::to_string(n));
  }
  Partition p;
  p.sets.resize(nodes);
  if (strategy == PartitionStrategy::OnePerNode) {
    if (nodes != n) {
      throw Error(ErrorKind::InvalidPartition,
                  "one-column-per-node needs K == n");
    }
    for (std::size_t k = 0; k < n; ++k) p.sets[k] = {k};
    return p;
  }
  const std::size_t base = n / nodes;
  const std::size_t extra = n % nodes;
  std::size_t next = 0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const std::size_t size = base + (k < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) p.sets[k].push_back(next++);
  }
  return p;
}

struct PartitionSpec {
  PartitionStrategy strategy = PartitionStrategy::OnePerNode;
  // Node count for the Blocks strategy; ignored for OnePerNode.
  std::size_t nodes = 1;
};

enum class TopologyKind { Ring, Complete, File };
enum class Scheduler { Synchronous, RandomOrder };

struct FixedIterations {
  int rounds = 500;
};

/// Halts once every node's ||dx||_2 stayed below epsilon for `patience`
/// consecutive rounds, or at `max_rounds`.
struct UpdateMagnitude {
  double epsilon = 1e-6;
  int patience = 5;
  int max_rounds = 10000;
};

using StoppingRule = std::variant<FixedIterations, UpdateMagnitude>;

struct ExperimentConfig {
  PartitionSpec partition;
  TopologyKind topology = TopologyKind::Ring;
  std::string topology_path;
  double lambda = 0.0;
  double eta = 0.5;
  bool preprocess = true;
  Scheduler scheduler = Scheduler::Synchronous;
  StoppingRule stopping = FixedIterations{};
  std::uint64_t seed = 0;
  std::string trace_path;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw Error(ErrorKind::InvalidConfig, "lambda must be >= 0");
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
      throw Error(ErrorKind::InvalidConfig, "eta must lie in [0, 1]");
    }
    if (topology == TopologyKind::File && topology_path.empty()) {
      throw Error(ErrorKind::InvalidConfig, "file topology needs a path");
    }
    if (const auto* f = std::get_if<FixedIterations>(&stopping)) {
      if (f->rounds < 1) {
        throw Error(ErrorKind::InvalidConfig, "iteration count must be >= 1");
      }
    } else {
      const auto& u = std::get<UpdateMagnitude>(stopping);
      if (!(u.epsilon > 0.0) || u.patience < 1 || u.max_rounds < 1) {
        throw Error(ErrorKind::InvalidConfig,
                    "update-magnitude rule needs eps > 0, patience >= 1, cap >= 1");
      }
    }
  }
};

}  // namespace cola
