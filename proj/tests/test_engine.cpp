#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "cola/engine.hpp"
#include "support.hpp"

using namespace cola;
using cola::testing::error_kind_of;

namespace {

ColumnDataset tiny_problem() {
  ColumnDataset d;
  d.features.resize(2, 1);
  d.features << 1, 2;
  d.target.resize(2);
  d.target << 2, 4;
  return d;
}

ColumnDataset random_dataset(cola::testing::Gen& gen, Index m, Index n) {
  ColumnDataset d;
  d.features = gen.matrix(m, n);
  d.target = gen.vector(m, -2, 2);
  return d;
}

struct Sim {
  Partition partition;
  std::vector<Matrix> blocks;
  std::vector<NodeState> nodes;
};

Sim setup(const ColumnDataset& d, std::size_t k) {
  Sim s;
  const auto strategy = k == static_cast<std::size_t>(d.cols()) ? PartitionStrategy::OnePerNode
                                                                : PartitionStrategy::Blocks;
  s.partition = partition_columns(static_cast<std::size_t>(d.cols()), k, strategy);
  s.blocks = column_blocks(d.features, s.partition);
  s.nodes = init_nodes(s.partition, d.rows());
  return s;
}

double conservation_error(const Sim& s, const Matrix& a) {
  Vector avg = Vector::Zero(a.rows());
  for (const auto& n : s.nodes) avg += n.v;
  avg /= static_cast<double>(s.nodes.size());
  const Vector ax = a * assemble_x(s.nodes, s.partition);
  return (avg - ax).norm() / std::max(1.0, ax.norm());
}

ExperimentConfig config(int rounds) {
  ExperimentConfig c;
  c.stopping = FixedIterations{rounds};
  c.preprocess = false;
  return c;
}

}  // namespace

TEST(MixStep, IdentityKeepsOwnVector) {
  const auto w = validate_topology(Matrix::Identity(3, 3));
  Vector a(2), b(2), c(2);
  a << 1, 2;
  b << 3, 4;
  c << 5, 6;
  const std::vector<const Vector*> inbox{&a, &b, &c};
  EXPECT_EQ(mix_step(w, 1, inbox), b);
}

TEST(MixStep, RingOfThreeAverages) {
  const auto w = ring_topology(3);
  Vector v1(2), v2(2), v3(2);
  v1 << 3, 0;
  v2 << 0, 3;
  v3 << 0, 0;
  const std::vector<const Vector*> inbox{&v1, &v2, &v3};
  for (std::size_t k = 0; k < 3; ++k) {
    const Vector out = mix_step(w, k, inbox);
    EXPECT_NEAR(out(0), 1.0, 1e-15);
    EXPECT_NEAR(out(1), 1.0, 1e-15);
  }
}

TEST(MixStep, ReadsOnlyNeighbors) {
  const auto w = ring_topology(6);
  cola::testing::Gen gen(3);
  std::vector<Vector> v;
  for (int i = 0; i < 6; ++i) v.push_back(gen.vector(4));
  std::vector<const Vector*> inbox(6, nullptr);
  inbox[2] = &v[2];
  inbox[1] = &v[1];
  inbox[3] = &v[3];
  const Vector local = mix_step(w, 2, inbox);
  for (auto& p : inbox) {
    if (p == nullptr) p = &v[0];
  }
  EXPECT_EQ(mix_step(w, 2, inbox), local);
}

TEST(MixStep, MissingNeighborIsProtocolViolation) {
  const auto w = ring_topology(4);
  Vector a = Vector::Ones(2);
  std::vector<const Vector*> inbox{&a, &a, nullptr, &a};
  EXPECT_EQ(error_kind_of([&] { mix_step(w, 1, inbox); }), ErrorKind::ProtocolViolation);
  EXPECT_EQ(error_kind_of([&] { mix_step(w, 2, inbox); }), ErrorKind::ProtocolViolation);
  EXPECT_NO_THROW(mix_step(w, 0, inbox));
}

TEST(MixStep, SumPreservedOverNodes) {
  cola::testing::Gen gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto k = static_cast<std::size_t>(gen.integer(3, 12));
    const auto w = trial % 2 ? ring_topology(k) : complete_topology(k);
    std::vector<Vector> v;
    std::vector<const Vector*> inbox;
    for (std::size_t i = 0; i < k; ++i) v.push_back(gen.vector(5, -10, 10));
    for (auto& x : v) inbox.push_back(&x);
    Vector before = Vector::Zero(5), after = Vector::Zero(5);
    for (std::size_t i = 0; i < k; ++i) {
      before += v[i];
      after += mix_step(w, i, inbox);
    }
    EXPECT_LE((after - before).norm(), 1e-9 * std::max(1.0, before.norm()));
  }
}

TEST(ColaRound, SingleNodeSolvesOneDimensionalProblem) {
  const auto d = tiny_problem();
  auto s = setup(d, 1);
  const LeastSquaresLoss f(d.target);
  const auto w = complete_topology(1);
  const auto r1 = cola_round(s.nodes, s.blocks, w, f, ElasticNet());
  EXPECT_NEAR(s.nodes[0].x(0), 2.0, 1e-12);
  EXPECT_NEAR(s.nodes[0].v(0), 2.0, 1e-12);
  EXPECT_NEAR(s.nodes[0].v(1), 4.0, 1e-12);
  EXPECT_NEAR(f.value(d.features * assemble_x(s.nodes, s.partition)), 0.0, 1e-20);
  EXPECT_NEAR(r1.dx[0](0), 2.0, 1e-12);
  const auto r2 = cola_round(s.nodes, s.blocks, w, f, ElasticNet());
  EXPECT_NEAR(r2.dx[0](0), 0.0, 1e-12);
}

TEST(ColaRound, StationaryNodesDoNotMove) {
  cola::testing::Gen gen(5);
  const auto d = random_dataset(gen, 12, 4);
  auto s = setup(d, 4);
  const Vector x = cola::testing::normal_equations(d.features, d.target);
  const Vector ax = d.features * x;
  for (std::size_t k = 0; k < 4; ++k) {
    s.nodes[k].x(0) = x(static_cast<Index>(k));
    s.nodes[k].v = ax;
  }
  const auto r = cola_round(s.nodes, s.blocks, ring_topology(4), LeastSquaresLoss(d.target),
                            ElasticNet());
  for (const auto& dx : r.dx) EXPECT_LT(dx.norm(), 1e-10);
}

TEST(ColaRound, ConservationUnderSynchronousRounds) {
  cola::testing::Gen gen(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto d = random_dataset(gen, 20, 6);
    auto s = setup(d, trial % 2 ? 3 : 6);
    const LeastSquaresLoss f(d.target);
    const auto w = ring_topology(s.nodes.size());
    for (int round = 0; round < 30; ++round) {
      cola_round(s.nodes, s.blocks, w, f, ElasticNet(0.1, 0.5));
      EXPECT_LE(conservation_error(s, d.features), 1e-9);
    }
  }
}

// Stale reads break exact conservation, but the iteration still settles.
TEST(ColaRound, RandomOrderStillReducesObjective) {
  cola::testing::Gen gen(6);
  const auto d = random_dataset(gen, 20, 6);
  auto s = setup(d, 6);
  std::mt19937_64 rng(1);
  const LeastSquaresLoss f(d.target);
  const ElasticNet g(0.1, 0.5);
  const auto w = ring_topology(6);
  const double start = global_objective(f, g, d.features, Vector::Zero(6));
  for (int round = 0; round < 200; ++round) {
    cola_round(s.nodes, s.blocks, w, f, g, Scheduler::RandomOrder, &rng);
  }
  const Vector x = assemble_x(s.nodes, s.partition);
  EXPECT_LT(global_objective(f, g, d.features, x), start);
  EXPECT_TRUE(x.allFinite());
}

TEST(ColaRound, RandomOrderNeedsRng) {
  const auto d = tiny_problem();
  auto s = setup(d, 1);
  EXPECT_EQ(error_kind_of([&] {
              cola_round(s.nodes, s.blocks, complete_topology(1), LeastSquaresLoss(d.target),
                         ElasticNet(), Scheduler::RandomOrder, nullptr);
            }),
            ErrorKind::InvalidConfig);
}

TEST(ColaRound, NonNeighborStateDoesNotLeak) {
  cola::testing::Gen gen(7);
  const auto d = random_dataset(gen, 10, 6);
  const LeastSquaresLoss f(d.target);
  const auto w = ring_topology(6);
  auto base = setup(d, 6);
  for (int r = 0; r < 3; ++r) cola_round(base.nodes, base.blocks, w, f, ElasticNet(0.1, 0.3));
  auto perturbed = base;
  perturbed.nodes[3].v.array() += 1000.0;  // node 3 is not adjacent to node 0 in a ring of 6
  cola_round(base.nodes, base.blocks, w, f, ElasticNet(0.1, 0.3));
  cola_round(perturbed.nodes, perturbed.blocks, w, f, ElasticNet(0.1, 0.3));
  EXPECT_EQ(base.nodes[0].x, perturbed.nodes[0].x);
  EXPECT_EQ(base.nodes[0].v, perturbed.nodes[0].v);
  EXPECT_NE(base.nodes[2].x, perturbed.nodes[2].x);
}

TEST(Stopping, FixedIterations) {
  std::vector<NodeState> nodes(2);
  EXPECT_EQ(stopping_check(FixedIterations{3}, nodes, 2), StopReason::Continue);
  EXPECT_EQ(stopping_check(FixedIterations{3}, nodes, 3), StopReason::FixedIterations);
}

TEST(Stopping, AllQuietStopsImmediatelyWithPatienceOne) {
  std::vector<NodeState> nodes(3);
  EXPECT_EQ(stopping_check(UpdateMagnitude{1e-6, 1, 100}, nodes, 1), StopReason::UpdateMagnitude);
}

TEST(Stopping, OneLoudNodeKeepsGoing) {
  std::vector<NodeState> nodes(2);
  nodes[0].last_dx_norm = 1e-4;
  nodes[1].last_dx_norm = 2e-3;
  EXPECT_EQ(stopping_check(UpdateMagnitude{1e-3, 1, 100}, nodes, 1), StopReason::Continue);
}

TEST(Stopping, StreakResets) {
  std::vector<NodeState> nodes(1);
  const UpdateMagnitude rule{1e-3, 3, 100};
  nodes[0].last_dx_norm = 1e-4;
  EXPECT_EQ(stopping_check(rule, nodes, 10), StopReason::Continue);
  EXPECT_EQ(stopping_check(rule, nodes, 11), StopReason::Continue);
  nodes[0].last_dx_norm = 1.0;
  EXPECT_EQ(stopping_check(rule, nodes, 12), StopReason::Continue);
  EXPECT_EQ(nodes[0].stop_streak, 0);
  nodes[0].last_dx_norm = 0.0;
  EXPECT_EQ(stopping_check(rule, nodes, 13), StopReason::Continue);
  EXPECT_EQ(stopping_check(rule, nodes, 14), StopReason::Continue);
  EXPECT_EQ(stopping_check(rule, nodes, 15), StopReason::UpdateMagnitude);
}

TEST(Stopping, CapReached) {
  std::vector<NodeState> nodes(1);
  nodes[0].last_dx_norm = 1.0;
  EXPECT_EQ(stopping_check(UpdateMagnitude{1e-3, 3, 7}, nodes, 7), StopReason::CapReached);
  EXPECT_EQ(to_string(StopReason::CapReached), "cap_reached");
  EXPECT_EQ(to_string(StopReason::UpdateMagnitude), "update_magnitude");
}

TEST(Run, FixedRoundsOnRingCountMessages) {
  cola::testing::Gen gen(8);
  const auto d = random_dataset(gen, 30, 15);
  auto c = config(500);
  c.lambda = 1e-3;
  const auto r = run(c, d);
  ASSERT_EQ(r.trace.rows.size(), 500u);
  EXPECT_EQ(r.trace.back().comm_cumulative, 15000u);
  EXPECT_EQ(r.reason, StopReason::FixedIterations);
  EXPECT_EQ(r.trace.rows[0].dx_norms.size(), 15u);
}

TEST(Run, TinyProblemHaltsAfterSecondRound) {
  auto c = config(1);
  c.topology = TopologyKind::Complete;
  c.stopping = UpdateMagnitude{1e-8, 1, 100};
  const auto r = run(c, tiny_problem());
  EXPECT_EQ(r.trace.rows.size(), 2u);
  EXPECT_EQ(r.reason, StopReason::UpdateMagnitude);
  EXPECT_NEAR(r.x(0), 2.0, 1e-12);
}

TEST(Run, SingleNodeReachesLeastSquares) {
  cola::testing::Gen gen(9);
  const auto d = random_dataset(gen, 25, 4);
  auto c = config(1);
  c.partition = {PartitionStrategy::Blocks, 1};
  c.topology = TopologyKind::Complete;
  c.stopping = UpdateMagnitude{1e-13, 2, 1000};
  const auto r = run(c, d, SolverOptions{1e-14, 1000});
  EXPECT_LT((d.features.transpose() * (d.features * r.x - d.target)).norm(), 1e-8);
}

TEST(Run, DeterministicTraces) {
  cola::testing::Gen gen(10);
  const auto d = random_dataset(gen, 20, 6);
  for (auto scheduler : {Scheduler::Synchronous, Scheduler::RandomOrder}) {
    auto c = config(40);
    c.scheduler = scheduler;
    c.lambda = 0.05;
    c.seed = 99;
    const auto a = run(c, d), b = run(c, d);
    ASSERT_EQ(a.trace.rows.size(), b.trace.rows.size());
    for (std::size_t i = 0; i < a.trace.rows.size(); ++i) {
      EXPECT_EQ(a.trace.rows[i].objective, b.trace.rows[i].objective);
      EXPECT_EQ(a.trace.rows[i].dx_norms, b.trace.rows[i].dx_norms);
    }
    EXPECT_EQ(a.x, b.x);
  }
}

TEST(Run, BlocksPartitionAndFileTopology) {
  cola::testing::Gen gen(11);
  const auto d = random_dataset(gen, 20, 7);
  const auto path = (std::filesystem::temp_directory_path() / "cola_engine_topology.txt").string();
  {
    std::ofstream out(path);
    write_topology(out, ring_topology(3));
  }
  auto c = config(20);
  c.partition = {PartitionStrategy::Blocks, 3};
  c.topology = TopologyKind::File;
  c.topology_path = path;
  const auto r = run(c, d);
  EXPECT_EQ(r.nodes, 3u);
  EXPECT_EQ(r.trace.back().comm_cumulative, 20u * 6u);
  c.partition = {PartitionStrategy::Blocks, 4};
  EXPECT_EQ(error_kind_of([&] { run(c, d); }), ErrorKind::InvalidConfig);
  std::remove(path.c_str());
}

TEST(Run, WritesTraceCsv) {
  cola::testing::Gen gen(12);
  const auto d = random_dataset(gen, 10, 4);
  const auto path = (std::filesystem::temp_directory_path() / "cola_engine_trace.csv").string();
  auto c = config(7);
  c.trace_path = path;
  run(c, d);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header,
            "round,objective,loss,gamma_sum,dx_norm_1,dx_norm_2,dx_norm_3,dx_norm_4,comm_cumulative");
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 7);
  std::remove(path.c_str());
}

TEST(Run, InvalidInputs) {
  auto d = tiny_problem();
  EXPECT_EQ(error_kind_of([&] { run(config(3), d); }), ErrorKind::TopologyTooSmall);
  auto c = config(3);
  c.topology = TopologyKind::Complete;
  c.eta = 2.0;
  EXPECT_EQ(error_kind_of([&] { run(c, d); }), ErrorKind::InvalidConfig);
  c.eta = 0.5;
  d.features(0, 0) = 0.0;
  d.features(1, 0) = 0.0;
  EXPECT_EQ(error_kind_of([&] { run(c, d); }), ErrorKind::DegenerateColumn);
}
