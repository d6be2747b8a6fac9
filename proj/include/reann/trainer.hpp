#pragma once

// Architecture search around the network: grow the hidden layer one node at
// a time, then prune connections (smallest magnitude first) under an
// accuracy floor, retraining after every change.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "reann/common.hpp"
#include "reann/dataset.hpp"
#include "reann/network.hpp"

namespace reann {

struct ConstructiveSpec {
  std::size_t max_hidden = 5;
  std::size_t epochs_per_stage = 50;
  double add_threshold = 0.005;  // training-accuracy gain needed to keep growing
  std::size_t error_plateau_patience = 10;
  double plateau_tolerance = 1e-5;  // MSE improvement that counts as progress

  void validate() const {
    if (max_hidden < 1) throw ContractViolation("max_hidden must be >= 1");
    if (epochs_per_stage < 1) throw ContractViolation("epochs_per_stage must be >= 1");
    if (!(add_threshold >= 0.0)) throw ContractViolation("add_threshold must be >= 0");
  }

  bool operator==(const ConstructiveSpec&) const = default;
};

struct PruneSpec {
  double accuracy_floor_drop = 0.005;
  std::size_t retrain_epochs = 25;
  std::size_t final_retrain_epochs = 25;
  double weight_decay = 1e-4;  // used by the retraining done while pruning

  void validate() const {
    if (!(accuracy_floor_drop >= 0.0)) throw ContractViolation("accuracy_floor_drop must be >= 0");
    if (!(weight_decay >= 0.0)) throw ContractViolation("weight_decay must be >= 0");
  }

  bool operator==(const PruneSpec&) const = default;
};

enum class Phase { constructive, prune, final_retrain };

inline std::string to_string(Phase p) {
  switch (p) {
    case Phase::constructive: return "constructive";
    case Phase::prune: return "prune";
    case Phase::final_retrain: return "final-retrain";
  }
  return "constructive";
}

/// One line of the training-error log.
struct EpochRecord {
  Phase phase = Phase::constructive;
  std::size_t epoch = 0;  // running index over the whole run
  std::size_t hidden = 0;
  double mse = 0.0;
  double accuracy = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct ArchitectureTrace {
  Architecture initial, intermediate, final;
  std::size_t constructive_epochs = 0;
  std::size_t prune_epochs = 0;
  std::size_t total_epochs = 0;

  bool operator==(const ArchitectureTrace&) const = default;
};

struct TrainingLog {
  std::vector<EpochRecord> epochs;

  void add(Phase phase, const Network& net, const EpochStats& s) {
    epochs.push_back({phase, epochs.size() + 1, net.active_hidden_count(), s.mean_squared_error,
                      s.training_accuracy});
  }
};

/// Runs `epochs` epochs honoring the masks. Zero epochs returns `net` unchanged.
inline Network retrain(Network net, std::size_t epochs, const Dataset& train, TrainingLog* log = nullptr,
                       Phase phase = Phase::prune) {
  if (net.active_hidden_count() == 0) throw TrainingError("no active hidden nodes");
  for (std::size_t e = 0; e < epochs; ++e) {
    const auto s = train_epoch(net, train);
    if (log) log->add(phase, net, s);
  }
  return net;
}

struct StageRecord {
  std::size_t hidden = 0;
  std::size_t epochs = 0;
  double accuracy = 0.0;
  double mse = 0.0;

  bool operator==(const StageRecord&) const = default;
};

struct ConstructiveResult {
  Network network;
  Architecture initial;
  Architecture intermediate;
  std::size_t epochs = 0;
  std::vector<StageRecord> stages;
};

namespace detail {

inline StageRecord train_stage(Network& net, const ConstructiveSpec& spec, const Dataset& train,
                               TrainingLog* log) {
  StageRecord rec;
  rec.hidden = net.hidden();
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  EpochStats last{};
  for (std::size_t e = 0; e < spec.epochs_per_stage; ++e) {
    last = train_epoch(net, train);
    if (log) log->add(Phase::constructive, net, last);
    ++rec.epochs;
    if (last.mean_squared_error < best - spec.plateau_tolerance) {
      best = last.mean_squared_error;
      since_best = 0;
    } else if (++since_best >= spec.error_plateau_patience) {
      break;
    }
  }
  rec.accuracy = last.training_accuracy;
  rec.mse = last.mean_squared_error;
  return rec;
}

}  // namespace detail

/// Grows the hidden layer from one node. After each stage, a node is added
/// only if the previous addition bought at least `add_threshold` training
/// accuracy; on stopping the better of the last two networks is kept
/// (the smaller one on ties).
inline ConstructiveResult constructive_train(const NetworkConfig& cfg, const ConstructiveSpec& spec,
                                             const Dataset& train, Rng& rng, TrainingLog* log = nullptr) {
  spec.validate();
  if (cfg.hidden_count != 1) throw ContractViolation("constructive training starts from one hidden node");
  ConstructiveResult result;
  Network net = init_network(cfg, rng);
  result.initial = architecture_of(net);

  auto stage = detail::train_stage(net, spec, train, log);
  result.epochs += stage.epochs;
  result.stages.push_back(stage);
  Network previous = net;
  double previous_acc = stage.accuracy;

  while (net.hidden() < spec.max_hidden) {
    add_hidden_node(net, rng);
    stage = detail::train_stage(net, spec, train, log);
    result.epochs += stage.epochs;
    result.stages.push_back(stage);
    const double gain = stage.accuracy - previous_acc;
    if (gain < spec.add_threshold) {
      if (stage.accuracy <= previous_acc) net = previous;
      break;
    }
    previous = net;
    previous_acc = stage.accuracy;
  }
  result.network = std::move(net);
  result.intermediate = architecture_of(result.network);
  return result;
}

/// Identifies one connection: layer 0 is input->hidden (from = input,
/// to = hidden), layer 1 is hidden->output (from = hidden, to = output).
struct ConnectionId {
  int layer = 0;
  std::size_t from = 0;
  std::size_t to = 0;

  auto operator<=>(const ConnectionId&) const = default;
};

inline std::size_t weight_index(const Network& net, const ConnectionId& c) {
  return c.layer == 0 ? net.ih(c.to, c.from) : net.ho(c.to, c.from);
}
inline double connection_weight(const Network& net, const ConnectionId& c) {
  return c.layer == 0 ? net.w_ih[weight_index(net, c)] : net.w_ho[weight_index(net, c)];
}
inline bool connection_active(const Network& net, const ConnectionId& c) {
  return c.layer == 0 ? net.mask_ih[weight_index(net, c)] != 0 : net.mask_ho[weight_index(net, c)] != 0;
}
inline void set_connection_mask(Network& net, const ConnectionId& c, bool on) {
  (c.layer == 0 ? net.mask_ih : net.mask_ho)[weight_index(net, c)] = on ? 1 : 0;
}

inline std::vector<ConnectionId> active_connections(const Network& net) {
  std::vector<ConnectionId> out;
  for (std::size_t h = 0; h < net.hidden(); ++h)
    for (std::size_t i = 0; i < net.inputs(); ++i)
      if (net.mask_ih[net.ih(h, i)]) out.push_back({0, i, h});
  for (std::size_t k = 0; k < net.outputs(); ++k)
    for (std::size_t h = 0; h < net.hidden(); ++h)
      if (net.mask_ho[net.ho(k, h)]) out.push_back({1, h, k});
  return out;
}

/// One pruning attempt, kept for replaying the floor check.
struct PruneStep {
  ConnectionId connection;
  double weight = 0.0;
  double accuracy = 0.0;  // training accuracy after the retrain
  bool committed = false;

  bool operator==(const PruneStep&) const = default;
};

struct PruneResult {
  Network network;
  Architecture before;
  Architecture after;
  double baseline_accuracy = 0.0;
  double floor = 0.0;
  double final_accuracy = 0.0;
  std::size_t epochs = 0;
  std::vector<PruneStep> steps;
};

/// Magnitude pruning with retraining. Each candidate is masked, the network
/// retrained, and the change kept only if training accuracy stays at or
/// above baseline - accuracy_floor_drop; otherwise the pre-attempt network
/// is restored and the connection is never tried again.
inline PruneResult prune(const Network& input, const PruneSpec& spec, const Dataset& train,
                         TrainingLog* log = nullptr) {
  spec.validate();
  PruneResult result;
  Network net = input;
  refresh_node_masks(net);
  result.before = architecture_of(net);
  result.baseline_accuracy = accuracy(net, train);
  result.floor = result.baseline_accuracy - spec.accuracy_floor_drop;

  const double saved_decay = net.config.weight_decay;
  std::set<ConnectionId> unprunable;
  while (true) {
    auto candidates = active_connections(net);
    std::erase_if(candidates, [&](const ConnectionId& c) { return unprunable.count(c) > 0; });
    if (candidates.empty()) break;
    const auto pick = *std::min_element(candidates.begin(), candidates.end(),
                                        [&](const ConnectionId& a, const ConnectionId& b) {
                                          const double wa = std::abs(connection_weight(net, a));
                                          const double wb = std::abs(connection_weight(net, b));
                                          if (wa != wb) return wa < wb;
                                          return a < b;
                                        });
    PruneStep step;
    step.connection = pick;
    step.weight = connection_weight(net, pick);

    Network trial = net;
    set_connection_mask(trial, pick, false);
    refresh_node_masks(trial);
    if (trial.active_hidden_count() == 0) {
      unprunable.insert(pick);
      step.accuracy = 0.0;
      result.steps.push_back(step);
      continue;
    }
    trial.config.weight_decay = spec.weight_decay;
    trial = retrain(std::move(trial), spec.retrain_epochs, train, log, Phase::prune);
    trial.config.weight_decay = saved_decay;
    result.epochs += spec.retrain_epochs;
    step.accuracy = accuracy(trial, train);
    if (step.accuracy >= result.floor) {
      step.committed = true;
      net = std::move(trial);
    } else {
      unprunable.insert(pick);
    }
    result.steps.push_back(step);
  }

  if (spec.final_retrain_epochs > 0) {
    Network tuned = retrain(net, spec.final_retrain_epochs, train, log, Phase::final_retrain);
    result.epochs += spec.final_retrain_epochs;
    // The final retrain may not push the network under the floor.
    if (accuracy(tuned, train) >= result.floor) net = std::move(tuned);
  }
  result.final_accuracy = accuracy(net, train);
  result.after = architecture_of(net);
  result.network = std::move(net);
  return result;
}

}  // namespace reann
