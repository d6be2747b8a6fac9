#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace reann;

TEST(Constant, ZeroSpreadIsConstant) {
  const std::vector<double> v(10, 0.99);
  const auto c = is_constant_output(v, 0.02);
  EXPECT_TRUE(c.constant);
  EXPECT_DOUBLE_EQ(c.value, 0.99);
}

TEST(Constant, WideSpreadIsNotConstant) {
  EXPECT_FALSE(is_constant_output(std::vector<double>{-0.9, 0.0, 0.9}, 0.02).constant);
}

TEST(Constant, NarrowBandIsConstantWithItsMean) {
  const std::vector<double> v{0.980, 0.985, 0.992, 0.990};
  const auto c = is_constant_output(v, 0.02);
  EXPECT_TRUE(c.constant);
  EXPECT_NEAR(c.value, (0.980 + 0.985 + 0.992 + 0.990) / 4, 1e-15);
}

TEST(Cluster, ConstantSeriesFormsOneCluster) {
  const std::vector<double> v(7, 0.3);
  const auto m = cluster_activations(v, 0.1);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m.counts[0], 7u);
  EXPECT_DOUBLE_EQ(m.representatives[0], 0.3);
}

TEST(Cluster, HandTracedExample) {
  const std::vector<double> v{0.1, 0.15, 0.9};
  const auto m = cluster_activations(v, 0.2);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(m.representatives[0], 0.125);
  EXPECT_DOUBLE_EQ(m.representatives[1], 0.9);
  EXPECT_EQ(m.counts, (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(m.membership, (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(oracle::cluster_violation(v, 0.2, m), "");
}

TEST(Cluster, DistanceIsMeasuredToTheSeed) {
  // 0.35 is within 0.2 of the running mean (0.225) but not of the seed 0.1.
  const std::vector<double> v{0.1, 0.25, 0.35};
  const auto m = cluster_activations(v, 0.2);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.membership, (std::vector<std::size_t>{0, 0, 1}));
}

TEST(Cluster, RejectsBadArguments) {
  EXPECT_THROW(cluster_activations(std::vector<double>{}, 0.5), ContractViolation);
  EXPECT_THROW(cluster_activations(std::vector<double>{0.1}, 0.0), ContractViolation);
  EXPECT_THROW(cluster_activations(std::vector<double>{0.1}, 1.0), ContractViolation);
}

TEST(Assign, NearestRepresentativeWithLowestIndexOnTies) {
  ClusterModel m;
  m.representatives = {0.125, 0.9};
  EXPECT_EQ(m.assign(0.9), 1u);
  EXPECT_EQ(m.assign(0.5), 0u);  // 0.375 against 0.4
  m.representatives = {-1.0, 1.0};
  EXPECT_EQ(m.assign(0.0), 0u);
}

TEST(Invariants, HoldOnAThousandRandomSeries) { EXPECT_EQ(oracle::clustering_suite(1000), ""); }

TEST(Invariants, FineEpsilonPreservesPredictions) { EXPECT_EQ(oracle::small_epsilon_suite(200), ""); }

TEST(Invariants, OracleCatchesAWrongMembership) {
  const std::vector<double> v{0.1, 0.15, 0.9};
  auto m = cluster_activations(v, 0.2);
  m.membership[2] = 0;
  EXPECT_NE(oracle::cluster_violation(v, 0.2, m), "");
}

namespace {

Network trained_blob_net(std::uint64_t seed) {
  const auto ds = oracle::blob_dataset(5);
  NetworkConfig c;
  c.input_count = 4;
  c.output_count = 2;
  c.hidden_count = 2;
  c.seed = seed;
  return retrain(init_network(c), 100, ds);
}

}  // namespace

TEST(Discretize, ZeroRequirementSucceedsAtTheFirstEpsilon) {
  const auto ds = oracle::blob_dataset(5);
  const auto dn = discretize_network(trained_blob_net(1), ds, 0.0, EpsilonSchedule{});
  EXPECT_EQ(dn.attempts, 1u);
  EXPECT_EQ(dn.epsilon, 0.5);
  EXPECT_EQ(dn.nodes.size(), 2u);
}

TEST(Discretize, MeetsTheContinuousAccuracy) {
  const auto ds = oracle::blob_dataset(5);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto net = trained_blob_net(seed);
    const double required = accuracy(net, ds);
    const auto dn = discretize_network(net, ds, required, EpsilonSchedule{});
    EXPECT_GE(dn.achieved_accuracy, required);
    EXPECT_EQ(dn.achieved_accuracy, discretized_accuracy(dn, ds));
    for (const auto& n : dn.nodes) EXPECT_TRUE(net.hidden_active[n.node]);
  }
}

TEST(Discretize, WellSeparatedValuesBecomeTheirOwnClusters) {
  // One input feeding one hidden node; the inputs give activations with
  // gaps far above the final epsilon.
  auto ds = oracle::make_dataset({{0.0}, {0.25}, {0.5}, {0.75}, {1.0}}, {0, 0, 1, 0, 1}, 2);
  NetworkConfig c;
  c.input_count = 1;
  c.output_count = 2;
  c.seed = 3;
  auto net = init_network(c);
  net.w_ih[0] = 2.0;
  net.bias_h[0] = -1.0;
  const auto dn = discretize_network(net, ds, accuracy(net, ds), EpsilonSchedule{0.1, 0.5, 0.05}, 0.02);
  ASSERT_EQ(dn.nodes.size(), 1u);
  EXPECT_EQ(dn.nodes[0].model.size(), 5u);
  EXPECT_EQ(dn.achieved_accuracy, accuracy(net, ds));
}

TEST(Discretize, ExhaustedScheduleReportsTheBestAttempt) {
  const auto ds = oracle::make_dataset({{0.0}, {0.01}, {0.02}, {1.0}}, {0, 1, 0, 1}, 2);
  NetworkConfig c;
  c.input_count = 1;
  c.output_count = 2;
  c.seed = 3;
  const auto net = init_network(c);
  try {
    discretize_network(net, ds, 1.01, EpsilonSchedule{0.5, 0.5, 0.1});
    FAIL() << "expected a discretization error";
  } catch (const DiscretizationError& e) {
    EXPECT_GE(e.best_attempt().attempts, 1u);
    EXPECT_LE(e.best_attempt().attempts, 3u);  // epsilon 0.5, 0.25, 0.125
    EXPECT_LE(e.best_attempt().achieved_accuracy, 1.0);
  }
}

TEST(Discretize, ConstantNodesSkipClustering) {
  const auto ds = oracle::blob_dataset(5);
  auto net = trained_blob_net(1);
  for (std::size_t i = 0; i < net.inputs(); ++i) net.w_ih[net.ih(1, i)] = 0.0;
  net.bias_h[1] = 0.4;
  const auto dn = discretize_network(net, ds, 0.0, EpsilonSchedule{});
  ASSERT_EQ(dn.nodes.size(), 2u);
  EXPECT_TRUE(dn.nodes[1].constant);
  EXPECT_NEAR(dn.nodes[1].constant_value, std::tanh(0.4), 1e-12);
  EXPECT_EQ(dn.nodes[1].code_count(), 1u);
}
