#pragma once

// Discretization of hidden-node activations by single-pass threshold
// clustering, with an accuracy-gated retry that shrinks epsilon.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "reann/common.hpp"
#include "reann/dataset.hpp"
#include "reann/network.hpp"

namespace reann {

struct ConstantOutput {
  bool constant = false;
  double value = 0.0;
};

/// A node whose activations spread by no more than `tolerance` is treated as
/// constant and represented by its mean.
inline ConstantOutput is_constant_output(std::span<const double> values, double tolerance) {
  require(!values.empty(), "is_constant_output: empty series");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo > tolerance) return {false, 0.0};
  CompensatedSum s;
  for (double v : values) s.add(v);
  return {true, s.value() / static_cast<double>(values.size())};
}

struct ClusterModel {
  double epsilon = 0.0;
  std::vector<double> seeds;            // first member of each cluster, used during the pass
  std::vector<double> representatives;  // finalized: sum / count
  std::vector<std::size_t> counts;
  std::vector<double> sums;
  std::vector<std::size_t> membership;  // cluster joined by each value of the series

  std::size_t size() const { return representatives.size(); }

  /// Index of the nearest representative, lowest index on ties.
  std::size_t assign(double delta) const {
    require(!representatives.empty(), "assign: empty cluster model");
    std::size_t best = 0;
    double best_d = std::abs(delta - representatives[0]);
    for (std::size_t j = 1; j < representatives.size(); ++j) {
      const double d = std::abs(delta - representatives[j]);
      if (d < best_d) best = j, best_d = d;
    }
    return best;
  }

  double discretize(double delta) const { return representatives[assign(delta)]; }

  bool operator==(const ClusterModel&) const = default;
};

/// Single scan in series order. The first value seeds cluster 0; each later
/// value joins the nearest cluster (by seed) when within epsilon, otherwise
/// it opens a new cluster. Representatives become cluster means afterwards.
inline ClusterModel cluster_activations(std::span<const double> values, double epsilon) {
  require(!values.empty(), "cluster_activations: empty series");
  require(epsilon > 0.0 && epsilon < 1.0, "cluster_activations: epsilon must lie in (0, 1)");
  ClusterModel m;
  m.epsilon = epsilon;
  std::vector<CompensatedSum> sums;
  m.membership.reserve(values.size());
  for (double delta : values) {
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m.seeds.size(); ++j) {
      const double d = std::abs(delta - m.seeds[j]);
      if (d < best) nearest = j, best = d;
    }
    if (!m.seeds.empty() && best <= epsilon) {
      ++m.counts[nearest];
      sums[nearest].add(delta);
      m.membership.push_back(nearest);
    } else {
      m.seeds.push_back(delta);
      m.counts.push_back(1);
      sums.emplace_back().add(delta);
      m.membership.push_back(m.seeds.size() - 1);
    }
  }
  for (std::size_t j = 0; j < m.seeds.size(); ++j) {
    m.sums.push_back(sums[j].value());
    m.representatives.push_back(m.sums[j] / static_cast<double>(m.counts[j]));
  }
  return m;
}

struct EpsilonSchedule {
  double start = 0.5;
  double factor = 0.5;
  double floor = 1e-3;

  void validate() const {
    require(start > 0.0 && start < 1.0, "epsilon schedule: start must lie in (0, 1)");
    require(factor > 0.0 && factor < 1.0, "epsilon schedule: factor must lie in (0, 1)");
    require(floor > 0.0 && floor <= start, "epsilon schedule: floor must lie in (0, start]");
  }

  bool operator==(const EpsilonSchedule&) const = default;
};

/// Discretization of one hidden node: either a constant or a cluster model.
struct HiddenDiscretization {
  std::size_t node = 0;
  bool constant = false;
  double constant_value = 0.0;
  ClusterModel model;

  std::size_t code_count() const { return constant ? 1 : model.size(); }
  std::size_t code(double delta) const { return constant ? 0 : model.assign(delta); }
  double value_of_code(std::size_t c) const { return constant ? constant_value : model.representatives[c]; }
  double discretize(double delta) const { return constant ? constant_value : model.discretize(delta); }

  bool operator==(const HiddenDiscretization&) const = default;
};

struct DiscretizedNetwork {
  Network network;
  std::vector<HiddenDiscretization> nodes;  // one per active hidden node, ascending node index
  double epsilon = 0.0;
  double required_accuracy = 0.0;
  double achieved_accuracy = 0.0;
  std::size_t attempts = 0;

  const HiddenDiscretization* find(std::size_t node) const {
    for (const auto& n : nodes)
      if (n.node == node) return &n;
    return nullptr;
  }

  /// Hidden values with every active activation replaced by its representative.
  std::vector<double> discretized_hidden(std::span<const double> x) const {
    auto hidden = hidden_activations(network, x);
    for (const auto& n : nodes) hidden[n.node] = n.discretize(hidden[n.node]);
    return hidden;
  }

  int predict(std::span<const double> x) const {
    const auto hidden = discretized_hidden(x);
    return classify(output_from_hidden(network, hidden));
  }

  /// Network class for a vector of cluster codes (one per entry of `nodes`).
  int predict_codes(std::span<const std::size_t> codes) const {
    require(codes.size() == nodes.size(), "predict_codes: code arity mismatch");
    std::vector<double> hidden(network.hidden(), 0.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) hidden[nodes[j].node] = nodes[j].value_of_code(codes[j]);
    return classify(output_from_hidden(network, hidden));
  }
};

class DiscretizationError : public Error {
 public:
  DiscretizationError(const std::string& what, DiscretizedNetwork best)
      : Error(what), best_(std::move(best)) {}
  const DiscretizedNetwork& best_attempt() const { return best_; }

 private:
  DiscretizedNetwork best_;
};

inline double discretized_accuracy(const DiscretizedNetwork& dn, const Dataset& ds) {
  if (ds.empty()) throw ContractViolation("accuracy: empty dataset");
  std::size_t correct = 0;
  for (const auto& p : ds.patterns)
    if (dn.predict(p.normalized) == p.class_index) ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

/// Activation series of each hidden node over `ds`, in pattern order.
inline std::vector<std::vector<double>> activation_series(const Network& net, const Dataset& ds) {
  std::vector<std::vector<double>> series(net.hidden());
  for (const auto& p : ds.patterns) {
    const auto h = hidden_activations(net, p.normalized);
    for (std::size_t j = 0; j < net.hidden(); ++j) series[j].push_back(h[j]);
  }
  return series;
}

/// Clusters every active hidden node at the current epsilon and checks the
/// accuracy of the network with discretized activations; epsilon is
/// multiplied by the schedule factor until the required accuracy is met.
inline DiscretizedNetwork discretize_network(const Network& net, const Dataset& train, double required_accuracy,
                                             const EpsilonSchedule& schedule, double constant_tolerance = 0.02) {
  schedule.validate();
  require(!train.empty(), "discretize_network: empty training set");
  if (net.active_hidden_count() == 0) throw TrainingError("no active hidden nodes");
  const auto series = activation_series(net, train);

  DiscretizedNetwork best;
  bool have_best = false;
  std::size_t attempts = 0;
  for (double eps = schedule.start; eps >= schedule.floor; eps *= schedule.factor) {
    DiscretizedNetwork dn;
    dn.network = net;
    dn.epsilon = eps;
    dn.required_accuracy = required_accuracy;
    for (std::size_t h = 0; h < net.hidden(); ++h) {
      if (!net.hidden_active[h]) continue;
      HiddenDiscretization hd;
      hd.node = h;
      const auto c = is_constant_output(series[h], constant_tolerance);
      if (c.constant) {
        hd.constant = true;
        hd.constant_value = c.value;
      } else {
        hd.model = cluster_activations(series[h], eps);
      }
      dn.nodes.push_back(std::move(hd));
    }
    dn.achieved_accuracy = discretized_accuracy(dn, train);
    dn.attempts = ++attempts;
    if (dn.achieved_accuracy >= required_accuracy) return dn;
    if (!have_best || dn.achieved_accuracy > best.achieved_accuracy) best = dn, have_best = true;
  }
  throw DiscretizationError("epsilon fell below the schedule floor before the required accuracy was met",
                            std::move(best));
}

}  // namespace reann
