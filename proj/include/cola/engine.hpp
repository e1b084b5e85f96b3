#pragma once

// The decentralized linear-learning iteration over simulated nodes.
//
// Each round, node k
//   1. mixes the local estimates of itself and its neighbors,
//        v_half = sum_l W(k,l) v_l,
//   2. solves its local subproblem at v_half for dx_k,
//   3. sets x_k += dx_k and v_k = v_half + K * A_k dx_k.
//
// Under the synchronous scheduler every node reads the round-start values,
// which keeps (1/K) sum_k v_k == A x after every round.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cola/error.hpp"
#include "cola/model.hpp"
#include "cola/objectives.hpp"
#include "cola/subproblem.hpp"
#include "cola/topology.hpp"
#include "cola/trace.hpp"
#include "cola/types.hpp"

namespace cola {

struct NodeState {
  std::size_t id = 0;
  Vector x;  // x_[k]
  Vector v;  // local estimate of A x
  double last_dx_norm = 0.0;
  int stop_streak = 0;
};

inline std::vector<NodeState> init_nodes(const Partition& p, Index samples) {
  std::vector<NodeState> nodes(p.node_count());
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    nodes[k].id = k;
    nodes[k].x = Vector::Zero(static_cast<Index>(p.sets[k].size()));
    nodes[k].v = Vector::Zero(samples);
  }
  return nodes;
}

inline std::vector<Matrix> column_blocks(const Matrix& features, const Partition& p) {
  std::vector<Matrix> blocks;
  blocks.reserve(p.node_count());
  for (const auto& set : p.sets) {
    Matrix b(features.rows(), static_cast<Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) {
      b.col(static_cast<Index>(i)) = features.col(static_cast<Index>(set[i]));
    }
    blocks.push_back(std::move(b));
  }
  return blocks;
}

inline Vector assemble_x(const std::vector<NodeState>& nodes, const Partition& p) {
  Vector x = Vector::Zero(static_cast<Index>(p.column_count()));
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    for (std::size_t i = 0; i < p.sets[k].size(); ++i) {
      x(static_cast<Index>(p.sets[k][i])) = nodes[k].x(static_cast<Index>(i));
    }
  }
  return x;
}

/// sum_l W(k,l) v_l over k and its neighbors. `inbox[l]` is the message
/// received from node l (nullptr if none); non-neighbors are never read.
inline Vector mix_step(const MixingTopology& w, std::size_t k,
                       std::span<const Vector* const> inbox) {
  if (k >= w.size() || inbox.size() != w.size()) {
    throw Error(ErrorKind::DimensionMismatch, "inbox does not match topology size");
  }
  if (inbox[k] == nullptr) {
    throw Error(ErrorKind::ProtocolViolation, "node has no local estimate");
  }
  const auto kk = static_cast<Index>(k);
  Vector out = w.weights(kk, kk) * *inbox[k];
  for (auto l : w.neighbors[k]) {
    if (inbox[l] == nullptr) {
      throw Error(ErrorKind::ProtocolViolation,
                  "missing message from neighbor " + std::to_string(l) +
                      " at node " + std::to_string(k));
    }
    if (inbox[l]->size() != out.size()) {
      throw Error(ErrorKind::DimensionMismatch, "neighbor estimate has wrong length");
    }
    out.noalias() += w.weights(kk, static_cast<Index>(l)) * *inbox[l];
  }
  return out;
}

struct NodeStep {
  Vector dx;
  double gamma = 0.0;  // Gamma_k(dx)
};

/// Builds and solves node k's subproblem at the mixed estimate v_half.
inline NodeStep local_step(const Matrix& block, const Vector& x, const Vector& v_half,
                           const SmoothLoss& f, const ElasticNet& g, Index nodes,
                           SolverOptions opts = {}) {
  LocalProblem p{block, f.gradient(v_half), f.value(v_half), x, nodes, f.tau(), g};
  NodeStep s;
  s.dx = solve_block(p, opts);
  s.gamma = gamma_value(p, s.dx);
  return s;
}

struct RoundResult {
  std::vector<Vector> dx;
  double gamma_sum = 0.0;
};

/// One round over all nodes. The synchronous scheduler reads a round-start
/// snapshot; the random-order scheduler visits nodes in a permutation drawn
/// from `rng` and each node reads its neighbors' latest values.
inline RoundResult cola_round(std::vector<NodeState>& nodes, const std::vector<Matrix>& blocks,
                              const MixingTopology& w, const SmoothLoss& f,
                              const ElasticNet& g,
                              Scheduler scheduler = Scheduler::Synchronous,
                              std::mt19937_64* rng = nullptr, SolverOptions opts = {}) {
  const std::size_t count = nodes.size();
  if (blocks.size() != count || w.size() != count) {
    throw Error(ErrorKind::DimensionMismatch, "nodes, blocks and topology disagree on K");
  }
  const auto k_scale = static_cast<Index>(count);
  RoundResult result;
  result.dx.resize(count);

  auto update = [&](std::size_t k, std::span<const Vector* const> inbox) {
    Vector v_half = mix_step(w, k, inbox);
    NodeStep s = local_step(blocks[k], nodes[k].x, v_half, f, g, k_scale, opts);
    nodes[k].x += s.dx;
    nodes[k].v = v_half + static_cast<double>(k_scale) * (blocks[k] * s.dx);
    nodes[k].last_dx_norm = s.dx.norm();
    result.gamma_sum += s.gamma;
    result.dx[k] = std::move(s.dx);
  };

  std::vector<const Vector*> inbox(count, nullptr);
  if (scheduler == Scheduler::Synchronous) {
    std::vector<Vector> snapshot;
    snapshot.reserve(count);
    for (const auto& n : nodes) snapshot.push_back(n.v);
    for (std::size_t k = 0; k < count; ++k) {
      std::fill(inbox.begin(), inbox.end(), nullptr);
      inbox[k] = &snapshot[k];
      for (auto l : w.neighbors[k]) inbox[l] = &snapshot[l];
      update(k, inbox);
    }
  } else {
    if (rng == nullptr) {
      throw Error(ErrorKind::InvalidConfig, "random-order scheduler needs an rng");
    }
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), *rng);
    for (auto k : order) {
      std::fill(inbox.begin(), inbox.end(), nullptr);
      inbox[k] = &nodes[k].v;
      for (auto l : w.neighbors[k]) inbox[l] = &nodes[l].v;
      update(k, inbox);
    }
  }
  return result;
}

enum class StopReason { Continue, FixedIterations, UpdateMagnitude, CapReached };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Continue: return "continue";
    case StopReason::FixedIterations: return "fixed_iterations";
    case StopReason::UpdateMagnitude: return "update_magnitude";
    case StopReason::CapReached: return "cap_reached";
  }
  return "unknown";
}

/// Called after round `round` (1-based) completes; advances stop streaks.
inline StopReason stopping_check(const StoppingRule& rule, std::vector<NodeState>& nodes,
                                 int round) {
  if (const auto* fixed = std::get_if<FixedIterations>(&rule)) {
    return round >= fixed->rounds ? StopReason::FixedIterations : StopReason::Continue;
  }
  const auto& u = std::get<UpdateMagnitude>(rule);
  bool all_quiet = !nodes.empty();
  for (auto& n : nodes) {
    n.stop_streak = n.last_dx_norm < u.epsilon ? n.stop_streak + 1 : 0;
    all_quiet = all_quiet && n.stop_streak >= u.patience;
  }
  if (all_quiet) return StopReason::UpdateMagnitude;
  if (round >= u.max_rounds) return StopReason::CapReached;
  return StopReason::Continue;
}

inline MixingTopology make_topology(const ExperimentConfig& config, std::size_t nodes) {
  MixingTopology w;
  switch (config.topology) {
    case TopologyKind::Ring: w = ring_topology(nodes); break;
    case TopologyKind::Complete: w = complete_topology(nodes); break;
    case TopologyKind::File: w = read_topology_file(config.topology_path); break;
  }
  if (w.size() != nodes) {
    throw Error(ErrorKind::InvalidConfig,
                "topology has " + std::to_string(w.size()) + " nodes, partition has " +
                    std::to_string(nodes));
  }
  return w;
}

inline Partition make_partition(const ExperimentConfig& config, std::size_t columns) {
  const std::size_t nodes =
      config.partition.strategy == PartitionStrategy::OnePerNode ? columns
                                                                 : config.partition.nodes;
  return partition_columns(columns, nodes, config.partition.strategy);
}

struct RunResult {
  RunTrace trace;
  Vector x;
  StopReason reason = StopReason::Continue;
  std::size_t nodes = 0;
};

/// Runs rounds until the stopping rule fires. The dataset is used as given;
/// any preprocessing has to happen beforehand. If `config.trace_path` is set
/// the trace is written there, including a partial trace when a round fails.
inline RunResult run(const ExperimentConfig& config, const ColumnDataset& dataset,
                     SolverOptions opts = {}) {
  config.validate();
  ensure_valid(dataset);
  const Partition partition = make_partition(config, static_cast<std::size_t>(dataset.cols()));
  const MixingTopology w = make_topology(config, partition.node_count());
  const LeastSquaresLoss f(dataset.target);
  const ElasticNet g(config.lambda, config.eta);
  const auto blocks = column_blocks(dataset.features, partition);

  auto nodes = init_nodes(partition, dataset.rows());
  std::mt19937_64 rng(config.seed);
  const std::uint64_t per_round = w.messages_per_round();

  RunResult result;
  result.nodes = partition.node_count();
  auto flush = [&] {
    if (!config.trace_path.empty()) {
      write_trace_csv(config.trace_path, result.trace, result.nodes);
    }
  };

  try {
    for (int round = 1;; ++round) {
      RoundResult r = cola_round(nodes, blocks, w, f, g, config.scheduler, &rng, opts);
      const Vector x = assemble_x(nodes, partition);
      const double loss = f.value(dataset.features * x);

      TraceRow row;
      row.round = static_cast<std::size_t>(round);
      row.loss = loss;
      row.objective = loss + g.value(x);
      row.gamma_sum = r.gamma_sum;
      row.dx_norms.reserve(nodes.size());
      for (const auto& n : nodes) row.dx_norms.push_back(n.last_dx_norm);
      row.comm_cumulative = per_round * static_cast<std::uint64_t>(round);
      result.trace.rows.push_back(std::move(row));

      const StopReason reason = stopping_check(config.stopping, nodes, round);
      if (reason != StopReason::Continue) {
        result.reason = reason;
        result.x = x;
        break;
      }
    }
  } catch (...) {
    flush();
    throw;
  }
  flush();
  return result;
}

}  // namespace cola
