#pragma once

// Three-layer feedforward network: tanh hidden units, logistic outputs, one
// bias node (fixed input 1) feeding the hidden and output layers. Every
// non-bias connection carries a mask bit so pruning can switch it off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "reann/common.hpp"
#include "reann/dataset.hpp"

namespace reann {

struct NetworkConfig {
  std::size_t input_count = 0;
  std::size_t hidden_count = 1;
  std::size_t output_count = 0;
  double learning_rate = 0.5;
  double init_low = -1.0;
  double init_high = 1.0;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (input_count == 0 || output_count == 0) throw ContractViolation("network needs inputs and outputs");
    if (hidden_count == 0) throw ContractViolation("network needs at least one hidden node");
    if (!(learning_rate >= 0.1 && learning_rate <= 1.0))
      throw ContractViolation("learning rate must lie in [0.1, 1.0]");
    if (!(init_low >= -1.0 && init_high <= 1.0 && init_low <= init_high))
      throw ContractViolation("weight init range must lie within [-1, 1]");
    if (!(weight_decay >= 0.0)) throw ContractViolation("weight decay must be nonnegative");
  }

  bool operator==(const NetworkConfig&) const = default;
};

using Mask = std::vector<std::uint8_t>;

struct Network {
  NetworkConfig config;
  std::vector<double> w_ih;  // [hidden][input]
  Mask mask_ih;
  std::vector<double> bias_h;
  std::vector<double> w_ho;  // [output][hidden]
  Mask mask_ho;
  std::vector<double> bias_o;
  Mask input_active;
  Mask hidden_active;

  std::size_t inputs() const { return config.input_count; }
  std::size_t hidden() const { return config.hidden_count; }
  std::size_t outputs() const { return config.output_count; }

  std::size_t ih(std::size_t h, std::size_t i) const { return h * inputs() + i; }
  std::size_t ho(std::size_t k, std::size_t h) const { return k * hidden() + h; }

  std::size_t active_hidden_count() const {
    return static_cast<std::size_t>(std::count(hidden_active.begin(), hidden_active.end(), 1));
  }
  std::size_t active_input_count() const {
    return static_cast<std::size_t>(std::count(input_active.begin(), input_active.end(), 1));
  }
  std::size_t active_connection_count() const {
    return static_cast<std::size_t>(std::count(mask_ih.begin(), mask_ih.end(), 1) +
                                    std::count(mask_ho.begin(), mask_ho.end(), 1));
  }

  bool operator==(const Network&) const = default;
};

/// Node and connection counts; bias connections are not counted.
struct Architecture {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  std::size_t connections = 0;

  std::size_t node_count() const { return inputs + hidden + outputs; }
  std::string triple() const {
    return std::to_string(inputs) + "-" + std::to_string(hidden) + "-" + std::to_string(outputs);
  }

  bool operator==(const Architecture&) const = default;
};

inline Architecture architecture_of(const Network& net) {
  return {net.active_input_count(), net.active_hidden_count(), net.outputs(), net.active_connection_count()};
}

namespace detail {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void init_hidden_node(Network& net, std::size_t h, Rng& rng) {
  const auto& c = net.config;
  for (std::size_t i = 0; i < net.inputs(); ++i) net.w_ih[net.ih(h, i)] = rng.uniform(c.init_low, c.init_high);
  net.bias_h[h] = rng.uniform(c.init_low, c.init_high);
  for (std::size_t k = 0; k < net.outputs(); ++k) net.w_ho[net.ho(k, h)] = rng.uniform(c.init_low, c.init_high);
}

}  // namespace detail

/// Draws every weight uniformly from the configured range using `rng`.
inline Network init_network(const NetworkConfig& cfg, Rng& rng) {
  cfg.validate();
  Network net;
  net.config = cfg;
  const std::size_t n_in = cfg.input_count, n_h = cfg.hidden_count, n_out = cfg.output_count;
  net.w_ih.assign(n_h * n_in, 0.0);
  net.mask_ih.assign(n_h * n_in, 1);
  net.bias_h.assign(n_h, 0.0);
  net.w_ho.assign(n_out * n_h, 0.0);
  net.mask_ho.assign(n_out * n_h, 1);
  net.bias_o.assign(n_out, 0.0);
  net.input_active.assign(n_in, 1);
  net.hidden_active.assign(n_h, 1);
  for (std::size_t h = 0; h < n_h; ++h) detail::init_hidden_node(net, h, rng);
  for (auto& b : net.bias_o) b = rng.uniform(cfg.init_low, cfg.init_high);
  return net;
}

inline Network init_network(const NetworkConfig& cfg) {
  Rng rng(cfg.seed);
  return init_network(cfg, rng);
}

/// Appends a fully connected hidden node with fresh weights; existing
/// weights and masks are kept.
inline void add_hidden_node(Network& net, Rng& rng) {
  const std::size_t n_in = net.inputs(), n_h = net.hidden(), n_out = net.outputs();
  std::vector<double> w_ho(n_out * (n_h + 1), 0.0);
  Mask m_ho(n_out * (n_h + 1), 1);
  for (std::size_t k = 0; k < n_out; ++k)
    for (std::size_t h = 0; h < n_h; ++h) {
      w_ho[k * (n_h + 1) + h] = net.w_ho[net.ho(k, h)];
      m_ho[k * (n_h + 1) + h] = net.mask_ho[net.ho(k, h)];
    }
  net.w_ho = std::move(w_ho);
  net.mask_ho = std::move(m_ho);
  net.w_ih.resize((n_h + 1) * n_in, 0.0);
  net.mask_ih.resize((n_h + 1) * n_in, 1);
  net.bias_h.push_back(0.0);
  net.hidden_active.push_back(1);
  net.config.hidden_count = n_h + 1;
  detail::init_hidden_node(net, n_h, rng);
  // A new node may reconnect inputs that were inactive.
  for (std::size_t i = 0; i < n_in; ++i) net.input_active[i] = 1;
}

/// Re-derives node masks from connection masks until stable: a hidden node
/// without active outgoing connections is switched off along with its
/// incoming connections; an input without active outgoing connections is off.
inline void refresh_node_masks(Network& net) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t h = 0; h < net.hidden(); ++h) {
      if (!net.hidden_active[h]) continue;
      bool out = false;
      for (std::size_t k = 0; k < net.outputs(); ++k) out = out || net.mask_ho[net.ho(k, h)];
      if (!out) {
        net.hidden_active[h] = 0;
        for (std::size_t i = 0; i < net.inputs(); ++i) net.mask_ih[net.ih(h, i)] = 0;
        changed = true;
      }
    }
  }
  for (std::size_t h = 0; h < net.hidden(); ++h)
    if (!net.hidden_active[h]) {
      for (std::size_t i = 0; i < net.inputs(); ++i) net.mask_ih[net.ih(h, i)] = 0;
      for (std::size_t k = 0; k < net.outputs(); ++k) net.mask_ho[net.ho(k, h)] = 0;
    }
  for (std::size_t i = 0; i < net.inputs(); ++i) {
    bool any = false;
    for (std::size_t h = 0; h < net.hidden(); ++h) any = any || net.mask_ih[net.ih(h, i)];
    net.input_active[i] = any ? 1 : 0;
  }
}

struct Activations {
  std::vector<double> hidden;
  std::vector<double> output;
};

/// Hidden pre-activation sum followed by tanh; masked nodes output 0.
inline std::vector<double> hidden_activations(const Network& net, std::span<const double> x) {
  require(x.size() == net.inputs(), "forward: input dimension mismatch");
  std::vector<double> hidden(net.hidden(), 0.0);
  for (std::size_t h = 0; h < net.hidden(); ++h) {
    if (!net.hidden_active[h]) continue;
    double s = net.bias_h[h];
    for (std::size_t i = 0; i < net.inputs(); ++i)
      if (net.mask_ih[net.ih(h, i)]) s += net.w_ih[net.ih(h, i)] * x[i];
    hidden[h] = std::tanh(s);
  }
  return hidden;
}

/// Output layer evaluated on given hidden values (used with discretized
/// hidden activations as well as the continuous ones).
inline std::vector<double> output_from_hidden(const Network& net, std::span<const double> hidden) {
  require(hidden.size() == net.hidden(), "output_from_hidden: hidden dimension mismatch");
  std::vector<double> out(net.outputs(), 0.0);
  for (std::size_t k = 0; k < net.outputs(); ++k) {
    double s = net.bias_o[k];
    for (std::size_t h = 0; h < net.hidden(); ++h)
      if (net.mask_ho[net.ho(k, h)] && net.hidden_active[h]) s += net.w_ho[net.ho(k, h)] * hidden[h];
    out[k] = detail::logistic(s);
  }
  return out;
}

inline Activations forward(const Network& net, std::span<const double> x) {
  Activations a;
  a.hidden = hidden_activations(net, x);
  a.output = output_from_hidden(net, a.hidden);
  return a;
}

/// Argmax with ties going to the lowest index.
inline int classify(std::span<const double> output) {
  require(!output.empty(), "classify: empty output vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < output.size(); ++k)
    if (output[k] > output[best]) best = k;
  return static_cast<int>(best);
}

inline int predict(const Network& net, std::span<const double> x) {
  return classify(forward(net, x).output);
}

inline double accuracy(const Network& net, const Dataset& ds) {
  if (ds.empty()) throw ContractViolation("accuracy: empty dataset");
  std::size_t correct = 0;
  for (const auto& p : ds.patterns)
    if (predict(net, p.normalized) == p.class_index) ++correct;
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

// ---------------------------------------------------------------------------
// Training

/// Gradient of one pattern's loss, same layout as the network's weights.
struct Gradient {
  std::vector<double> w_ih, bias_h, w_ho, bias_o;
};

inline std::vector<double> one_hot(int cls, std::size_t n) {
  std::vector<double> t(n, 0.0);
  t[static_cast<std::size_t>(cls)] = 1.0;
  return t;
}

/// Per-pattern loss: 0.5 * sum_k (o_k - t_k)^2 + 0.5 * decay * |w|^2 over
/// the active weights and biases.
inline double pattern_loss(const Network& net, std::span<const double> x, std::span<const double> target) {
  const auto a = forward(net, x);
  double e = 0.0;
  for (std::size_t k = 0; k < net.outputs(); ++k) e += 0.5 * (a.output[k] - target[k]) * (a.output[k] - target[k]);
  const double decay = net.config.weight_decay;
  if (decay > 0.0) {
    double sq = 0.0;
    for (std::size_t j = 0; j < net.w_ih.size(); ++j)
      if (net.mask_ih[j]) sq += net.w_ih[j] * net.w_ih[j];
    for (std::size_t j = 0; j < net.w_ho.size(); ++j)
      if (net.mask_ho[j]) sq += net.w_ho[j] * net.w_ho[j];
    for (std::size_t h = 0; h < net.hidden(); ++h)
      if (net.hidden_active[h]) sq += net.bias_h[h] * net.bias_h[h];
    for (double b : net.bias_o) sq += b * b;
    e += 0.5 * decay * sq;
  }
  return e;
}

inline Gradient pattern_gradient(const Network& net, std::span<const double> x, std::span<const double> target) {
  require(target.size() == net.outputs(), "gradient: target dimension mismatch");
  const auto a = forward(net, x);
  const double decay = net.config.weight_decay;
  Gradient g;
  g.w_ih.assign(net.w_ih.size(), 0.0);
  g.bias_h.assign(net.hidden(), 0.0);
  g.w_ho.assign(net.w_ho.size(), 0.0);
  g.bias_o.assign(net.outputs(), 0.0);

  std::vector<double> delta_o(net.outputs());
  for (std::size_t k = 0; k < net.outputs(); ++k) {
    const double o = a.output[k];
    delta_o[k] = (o - target[k]) * o * (1.0 - o);
    g.bias_o[k] = delta_o[k] + decay * net.bias_o[k];
    for (std::size_t h = 0; h < net.hidden(); ++h) {
      const auto j = net.ho(k, h);
      if (net.mask_ho[j] && net.hidden_active[h]) g.w_ho[j] = delta_o[k] * a.hidden[h] + decay * net.w_ho[j];
    }
  }
  for (std::size_t h = 0; h < net.hidden(); ++h) {
    if (!net.hidden_active[h]) continue;
    double back = 0.0;
    for (std::size_t k = 0; k < net.outputs(); ++k)
      if (net.mask_ho[net.ho(k, h)]) back += delta_o[k] * net.w_ho[net.ho(k, h)];
    const double delta_h = back * (1.0 - a.hidden[h] * a.hidden[h]);
    g.bias_h[h] = delta_h + decay * net.bias_h[h];
    for (std::size_t i = 0; i < net.inputs(); ++i) {
      const auto j = net.ih(h, i);
      if (net.mask_ih[j]) g.w_ih[j] = delta_h * x[i] + decay * net.w_ih[j];
    }
  }
  return g;
}

/// w := w - learning_rate * g on every active weight.
inline void apply_gradient(Network& net, const Gradient& g) {
  const double eta = net.config.learning_rate;
  for (std::size_t j = 0; j < net.w_ih.size(); ++j)
    if (net.mask_ih[j]) net.w_ih[j] -= eta * g.w_ih[j];
  for (std::size_t h = 0; h < net.hidden(); ++h)
    if (net.hidden_active[h]) net.bias_h[h] -= eta * g.bias_h[h];
  for (std::size_t j = 0; j < net.w_ho.size(); ++j)
    if (net.mask_ho[j]) net.w_ho[j] -= eta * g.w_ho[j];
  for (std::size_t k = 0; k < net.outputs(); ++k) net.bias_o[k] -= eta * g.bias_o[k];
}

struct EpochStats {
  std::size_t epoch_index = 0;
  double mean_squared_error = 0.0;
  double training_accuracy = 0.0;

  bool operator==(const EpochStats&) const = default;
};

/// Mean over patterns and outputs of (o - t)^2, plus accuracy.
inline EpochStats evaluate(const Network& net, const Dataset& ds) {
  if (ds.empty()) throw ContractViolation("evaluate: empty dataset");
  CompensatedSum se;
  std::size_t correct = 0;
  for (const auto& p : ds.patterns) {
    const auto a = forward(net, p.normalized);
    for (std::size_t k = 0; k < net.outputs(); ++k) {
      const double t = static_cast<int>(k) == p.class_index ? 1.0 : 0.0;
      se.add((a.output[k] - t) * (a.output[k] - t));
    }
    if (classify(a.output) == p.class_index) ++correct;
  }
  EpochStats s;
  s.mean_squared_error = se.value() / static_cast<double>(ds.size() * net.outputs());
  s.training_accuracy = static_cast<double>(correct) / static_cast<double>(ds.size());
  return s;
}

/// One pass of per-pattern gradient descent in dataset order.
inline EpochStats train_epoch(Network& net, const Dataset& train) {
  require(!train.empty(), "train_epoch: empty dataset");
  require(train.attribute_count() == net.inputs() && train.class_count() == net.outputs(),
          "train_epoch: network does not match dataset");
  if (net.active_hidden_count() == 0) throw TrainingError("no active hidden nodes");
  for (const auto& p : train.patterns) {
    const auto target = one_hot(p.class_index, net.outputs());
    apply_gradient(net, pattern_gradient(net, p.normalized, target));
  }
  auto stats = evaluate(net, train);
  if (!std::isfinite(stats.mean_squared_error))
    throw TrainingError("training diverged (non-finite error); lower the learning rate");
  return stats;
}

}  // namespace reann
