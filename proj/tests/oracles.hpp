#pragma once

// Independent checks shared by the unit tests and the acceptance binary.
// Each oracle recomputes a property from first principles instead of
// trusting the code under test.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "reann/reann.hpp"

namespace oracle {

using namespace reann;

// ---------------------------------------------------------------------------
// Synthetic data

/// In-memory dataset with continuous attributes, normalized on all rows.
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                            std::size_t class_count) {
  Dataset ds;
  ds.schema.name = "synthetic";
  for (std::size_t a = 0; a < rows.front().size(); ++a) ds.schema.attributes.push_back({"x" + std::to_string(a + 1)});
  for (std::size_t c = 0; c < class_count; ++c)
    ds.schema.classes.push_back({"c" + std::to_string(c), "c" + std::to_string(c)});
  for (std::size_t i = 0; i < rows.size(); ++i) ds.patterns.push_back({rows[i], {}, labels[i]});
  return normalize(std::move(ds));
}

inline Dataset xor_dataset() { return make_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0}, 2); }

/// Two noisy blobs in four dimensions, the last two attributes pure noise.
inline Dataset blob_dataset(std::uint64_t seed, std::size_t n = 40) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 2);
    const double centre = c ? 0.7 : 0.3;
    rows.push_back({centre + rng.uniform(-0.2, 0.2), centre + rng.uniform(-0.2, 0.2), rng.unit(), rng.unit()});
    labels.push_back(c);
  }
  return make_dataset(rows, labels, 2);
}

// ---------------------------------------------------------------------------
// Gradient check

/// Random small network with some masked connections and optional decay.
inline Network random_network(Rng& rng) {
  NetworkConfig cfg;
  cfg.input_count = 1 + rng.below(4);
  cfg.hidden_count = 1 + rng.below(4);
  cfg.output_count = 1 + rng.below(3);
  cfg.weight_decay = rng.below(2) ? rng.uniform(0.0, 0.01) : 0.0;
  auto net = init_network(cfg, rng);
  for (auto& m : net.mask_ih) m = rng.below(5) ? 1 : 0;
  for (auto& m : net.mask_ho) m = rng.below(5) ? 1 : 0;
  refresh_node_masks(net);
  return net;
}

/// Largest relative error between the analytic gradient and a central
/// difference of the loss over every active parameter.
inline double gradient_error(const Network& net, const std::vector<double>& x, const std::vector<double>& t,
                             double step = 1e-5) {
  const auto g = pattern_gradient(net, x, t);
  double worst = 0.0;
  auto check = [&](std::vector<double> Network::*field, const std::vector<double>& analytic, std::size_t j) {
    Network plus = net, minus = net;
    (plus.*field)[j] += step;
    (minus.*field)[j] -= step;
    const double numeric = (pattern_loss(plus, x, t) - pattern_loss(minus, x, t)) / (2.0 * step);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[j]), 1e-4});
    worst = std::max(worst, std::abs(numeric - analytic[j]) / scale);
  };
  for (std::size_t j = 0; j < net.w_ih.size(); ++j)
    if (net.mask_ih[j]) check(&Network::w_ih, g.w_ih, j);
  for (std::size_t j = 0; j < net.w_ho.size(); ++j)
    if (net.mask_ho[j]) check(&Network::w_ho, g.w_ho, j);
  for (std::size_t h = 0; h < net.hidden(); ++h)
    if (net.hidden_active[h]) check(&Network::bias_h, g.bias_h, h);
  for (std::size_t k = 0; k < net.outputs(); ++k) check(&Network::bias_o, g.bias_o, k);
  return worst;
}

// ---------------------------------------------------------------------------
// Clustering

/// Replays the single pass from the recorded membership and returns a
/// description of the first violated invariant, or an empty string.
inline std::string cluster_violation(const std::vector<double>& series, double eps, const ClusterModel& m) {
  const std::size_t d = m.representatives.size();
  if (m.counts.size() != d || m.sums.size() != d || m.seeds.size() != d) return "size mismatch";
  if (m.membership.size() != series.size()) return "membership does not cover the series";
  if (std::accumulate(m.counts.begin(), m.counts.end(), std::size_t{0}) != series.size()) return "counts do not sum";

  std::vector<double> seeds;
  std::vector<std::vector<double>> members(d);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = series[i];
    const std::size_t j = m.membership[i];
    double nearest = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s)
      if (std::abs(v - seeds[s]) < nearest) nearest = std::abs(v - seeds[s]), arg = s;
    if (j == seeds.size()) {
      if (nearest <= eps) return "new cluster opened although a seed was within epsilon";
      seeds.push_back(v);
    } else {
      if (j > seeds.size()) return "joined a cluster that does not exist yet";
      if (j != arg) return "joined a cluster other than the nearest";
      if (nearest > eps) return "joined a cluster farther than epsilon";
    }
    members[j].push_back(v);
  }
  if (seeds != m.seeds) return "seed values differ from replay";
  for (std::size_t j = 0; j < d; ++j) {
    if (members[j].size() != m.counts[j]) return "count differs from replay";
    long double exact = 0;
    for (double v : members[j]) exact += v;
    if (std::abs(static_cast<double>(exact) - m.sums[j]) > 1e-12) return "sum differs from replay";
    if (std::abs(m.representatives[j] * static_cast<double>(m.counts[j]) - m.sums[j]) > 1e-12)
      return "representative is not the centroid";
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a + 1; b < d; ++b)
      if (m.representatives[a] == m.representatives[b]) return "representatives are not distinct";
  return {};
}

inline std::vector<double> random_series(Rng& rng) {
  const std::size_t n = 1 + rng.below(80);
  const std::size_t modes = 1 + rng.below(4);
  std::vector<double> centres;
  for (std::size_t k = 0; k < modes; ++k) centres.push_back(rng.uniform(-0.95, 0.95));
  std::vector<double> s;
  for (std::size_t i = 0; i < n; ++i)
    s.push_back(std::clamp(centres[rng.below(modes)] + rng.uniform(-0.1, 0.1), -0.999, 0.999));
  return s;
}

// ---------------------------------------------------------------------------
// Rule extraction

inline DiscreteTable random_table(Rng& rng) {
  DiscreteTable t;
  const std::size_t attrs = 1 + rng.below(6);
  t.class_count = 2 + rng.below(2);
  for (std::size_t a = 0; a < attrs; ++a) {
    t.code_counts.push_back(2 + rng.below(3));
    t.ordered.push_back(rng.below(2) == 0);
  }
  const std::size_t n = 1 + rng.below(64);
  for (std::size_t p = 0; p < n; ++p) {
    std::vector<int> row;
    for (std::size_t a = 0; a < attrs; ++a) row.push_back(static_cast<int>(rng.below(t.code_counts[a])));
    // Labels follow a hidden rule on the first attribute, with some noise.
    int label = row[0] % static_cast<int>(t.class_count);
    if (rng.below(5) == 0) label = static_cast<int>(rng.below(t.class_count));
    t.rows.push_back(std::move(row));
    t.labels.push_back(label);
  }
  return t;
}

/// Boolean truth table over `inputs` binary attributes.
template <typename F>
DiscreteTable truth_table(std::size_t inputs, F f) {
  DiscreteTable t;
  t.class_count = 2;
  t.code_counts.assign(inputs, 2);
  t.ordered.assign(inputs, false);
  for (std::size_t m = 0; m < (std::size_t{1} << inputs); ++m) {
    std::vector<int> row;
    for (std::size_t a = 0; a < inputs; ++a) row.push_back(static_cast<int>((m >> (inputs - 1 - a)) & 1));
    t.labels.push_back(f(row) ? 1 : 0);
    t.rows.push_back(std::move(row));
  }
  return t;
}

/// Fewest total conditions of any set of consistent equality rules that
/// covers every row, by exhaustive search over all conjunctions.
inline std::size_t minimal_condition_count(const DiscreteTable& t) {
  struct Candidate {
    std::uint64_t covered = 0;
    std::size_t conditions = 0;
  };
  std::vector<Candidate> candidates;
  const std::size_t attrs = t.attributes();
  std::size_t total = 1;
  for (std::size_t a = 0; a < attrs; ++a) total *= t.code_counts[a] + 1;  // +1: attribute unconstrained
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<int> want(attrs);
    std::size_t rest = code, conds = 0;
    for (std::size_t a = 0; a < attrs; ++a) {
      want[a] = static_cast<int>(rest % (t.code_counts[a] + 1)) - 1;
      rest /= t.code_counts[a] + 1;
      if (want[a] >= 0) ++conds;
    }
    for (std::size_t cls = 0; cls < t.class_count; ++cls) {
      Candidate c{0, conds};
      bool consistent = true;
      for (std::size_t p = 0; p < t.size() && consistent; ++p) {
        bool match = true;
        for (std::size_t a = 0; a < attrs; ++a) match = match && (want[a] < 0 || t.rows[p][a] == want[a]);
        if (!match) continue;
        if (t.labels[p] != static_cast<int>(cls)) consistent = false;
        c.covered |= std::uint64_t{1} << p;
      }
      if (consistent && c.covered) candidates.push_back(c);
    }
  }
  const std::uint64_t all = t.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << t.size()) - 1;
  // Cheapest cover of each row subset, by dynamic programming over subsets.
  std::vector<std::size_t> best(all + 1, std::numeric_limits<std::size_t>::max());
  best[0] = 0;
  for (std::uint64_t s = 0; s <= all; ++s) {
    if (best[s] == std::numeric_limits<std::size_t>::max()) continue;
    for (const auto& c : candidates) {
      const std::uint64_t next = s | c.covered;
      best[next] = std::min(best[next], best[s] + c.conditions);
    }
  }
  return best[all];
}

/// Extraction followed by accuracy-preserving pruning and the default rule.
inline RuleSet consistent_rules(const DiscreteTable& t) {
  return default_rule(prune_rules(extract_rules(t), t, RulePruneOptions{0, 0}), t);
}

/// First violated rule-set invariant on `t`, or an empty string.
inline std::string rex_violation(const DiscreteTable& t, const RuleSet& rs, Rng& rng) {
  if (!rs.has_default()) return "no default rule";
  double inconsistency = 0;
  {
    std::vector<std::vector<int>> rows = t.rows;
    inconsistency = inconsistency_rate(rows, t.labels);
  }
  std::size_t errors = 0;
  for (std::size_t p = 0; p < t.size(); ++p) {
    std::vector<int> classes;
    for (const auto& r : rs.rules)
      if (r.covers(t.rows[p])) classes.push_back(r.class_index);
    std::sort(classes.begin(), classes.end());
    if (std::unique(classes.begin(), classes.end()) - classes.begin() > 1) return "rules of two classes cover a row";
    const int cls = classes.empty() ? rs.default_class : classes.front();
    if (cls < 0 || static_cast<std::size_t>(cls) >= t.class_count) return "row left without a class";
    if (cls != t.labels[p]) ++errors;
  }
  if (static_cast<double>(errors) / static_cast<double>(t.size()) > inconsistency + 1e-12)
    return "training error exceeds the inconsistency rate";

  for (std::size_t i = 0; i < rs.rules.size(); ++i)
    for (std::size_t j = 0; j < rs.rules.size(); ++j) {
      const Rule &g = rs.rules[i], &s = rs.rules[j];
      if (i == j || g.class_index != s.class_index) continue;
      bool contains = true;
      for (const auto& c : g.conditions) {
        bool found = false;
        for (const auto& d : s.conditions) found = found || (d.attribute == c.attribute && d.lo >= c.lo && d.hi <= c.hi);
        contains = contains && found;
      }
      if (contains) return "a rule is subsumed by a more general rule of its class";
    }

  std::vector<int> reference;
  for (const auto& row : t.rows) reference.push_back(classify(rs, row).class_index);
  for (int round = 0; round < 5; ++round) {
    RuleSet shuffled = rs;
    for (std::size_t i = shuffled.rules.size(); i > 1; --i)
      std::swap(shuffled.rules[i - 1], shuffled.rules[rng.below(i)]);
    for (std::size_t p = 0; p < t.size(); ++p)
      if (classify(shuffled, t.rows[p]).class_index != reference[p]) return "classification depends on rule order";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Pruning

/// Re-runs every recorded pruning attempt from the public building blocks
/// and checks that each commit met the floor and the end state matches.
inline std::string prune_replay_violation(const Network& input, const PruneSpec& spec, const Dataset& train,
                                          const PruneResult& result) {
  Network net = input;
  refresh_node_masks(net);
  const double baseline = accuracy(net, train);
  if (baseline != result.baseline_accuracy) return "baseline differs";
  const double floor = baseline - spec.accuracy_floor_drop;
  std::vector<ConnectionId> rejected;
  auto untried = [&] {
    std::vector<ConnectionId> out;
    for (const auto& c : active_connections(net))
      if (std::find(rejected.begin(), rejected.end(), c) == rejected.end()) out.push_back(c);
    return out;
  };
  for (const auto& step : result.steps) {
    if (!connection_active(net, step.connection)) return "attempt on an inactive connection";
    for (const auto& c : untried())
      if (std::abs(connection_weight(net, c)) < std::abs(step.weight)) return "a smaller weight was skipped";
    if (step.weight != connection_weight(net, step.connection)) return "recorded weight differs";
    Network trial = net;
    set_connection_mask(trial, step.connection, false);
    refresh_node_masks(trial);
    if (trial.active_hidden_count() == 0) {
      if (step.committed) return "committed a mask that leaves no hidden node";
      rejected.push_back(step.connection);
      continue;
    }
    const double decay = trial.config.weight_decay;
    trial.config.weight_decay = spec.weight_decay;
    trial = retrain(std::move(trial), spec.retrain_epochs, train);
    trial.config.weight_decay = decay;
    const double acc = accuracy(trial, train);
    if (acc != step.accuracy) return "recorded accuracy differs from replay";
    if (step.committed != (acc >= floor)) return "commit decision disagrees with the floor";
    if (step.committed) {
      net = std::move(trial);
    } else {
      rejected.push_back(step.connection);
    }
  }
  if (!untried().empty()) return "stopped with connections left to try";
  if (spec.final_retrain_epochs > 0) {
    Network tuned = retrain(net, spec.final_retrain_epochs, train);
    if (accuracy(tuned, train) >= floor) net = std::move(tuned);
  }
  if (!(net == result.network)) return "replayed network differs";
  if (result.final_accuracy < floor) return "final accuracy below the floor";
  return {};
}

// ---------------------------------------------------------------------------
// Property suites, each returning an empty string or the first failure

inline std::string gradient_suite(std::size_t nets, double* worst_out = nullptr) {
  Rng rng(0x9e3779b9);
  double worst = 0.0;
  for (std::size_t t = 0; t < nets; ++t) {
    const auto net = random_network(rng);
    std::vector<double> x(net.inputs());
    for (auto& v : x) v = rng.unit();
    const auto target = one_hot(static_cast<int>(rng.below(net.outputs())), net.outputs());
    worst = std::max(worst, gradient_error(net, x, target, 1e-5));
  }
  if (worst_out) *worst_out = worst;
  return worst <= 1e-6 ? std::string{} : "relative gradient error " + std::to_string(worst);
}

/// Leader clustering on random series over the halving schedule plus random
/// epsilons: soundness, centroids, coverage and monotone refinement.
inline std::string clustering_suite(std::size_t series_count) {
  Rng rng(0x5eed);
  for (std::size_t n = 0; n < series_count; ++n) {
    const auto series = random_series(rng);
    std::vector<double> eps;
    for (double e = 0.5; e >= 1e-3; e *= 0.5) eps.push_back(e);
    for (int k = 0; k < 3; ++k) eps.push_back(rng.uniform(1e-3, 0.99));
    std::sort(eps.rbegin(), eps.rend());
    std::size_t previous = 0;
    for (double e : eps) {
      const auto m = cluster_activations(series, e);
      if (auto v = cluster_violation(series, e, m); !v.empty())
        return "series " + std::to_string(n) + ", eps " + std::to_string(e) + ": " + v;
      if (m.size() < previous) return "series " + std::to_string(n) + ": shrinking epsilon merged clusters";
      previous = m.size();
      for (double v : series)
        if (m.assign(v) >= m.size()) return "value left unassigned";
    }
  }
  return {};
}

/// Random networks on random data: with epsilon below every gap between
/// distinct activations the discretized network predicts like the original.
inline std::string small_epsilon_suite(std::size_t nets) {
  Rng rng(0xacc);
  for (std::size_t t = 0; t < nets; ++t) {
    const auto net = random_network(rng);
    if (net.active_hidden_count() == 0) continue;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    const std::size_t n = 5 + rng.below(40);
    for (std::size_t p = 0; p < n; ++p) {
      std::vector<double> x(net.inputs());
      for (auto& v : x) v = rng.unit();
      rows.push_back(std::move(x));
      labels.push_back(static_cast<int>(rng.below(net.outputs())));
    }
    auto ds = make_dataset(rows, labels, net.outputs());
    const auto series = activation_series(net, ds);
    DiscretizedNetwork dn;
    dn.network = net;
    for (std::size_t h = 0; h < net.hidden(); ++h) {
      if (!net.hidden_active[h]) continue;
      auto sorted = series[h];
      std::sort(sorted.begin(), sorted.end());
      double gap = 1.0;
      for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1]) gap = std::min(gap, sorted[i] - sorted[i - 1]);
      HiddenDiscretization hd;
      hd.node = h;
      hd.model = cluster_activations(series[h], std::min(0.5, gap / 2));
      dn.nodes.push_back(std::move(hd));
    }
    for (std::size_t p = 0; p < ds.size(); ++p)
      if (dn.predict(ds.patterns[p].normalized) != predict(net, ds.patterns[p].normalized))
        return "net " + std::to_string(t) + ": prediction changed under fine discretization";
    if (discretized_accuracy(dn, ds) != accuracy(net, ds)) return "accuracy changed under fine discretization";
  }
  return {};
}

inline std::string rex_suite(std::size_t tables) {
  Rng rng(0x7ab1e);
  for (std::size_t n = 0; n < tables; ++n) {
    const auto t = random_table(rng);
    if (auto v = rex_violation(t, consistent_rules(t), rng); !v.empty()) return "table " + std::to_string(n) + ": " + v;
  }
  return {};
}

/// Extracted rules for AND, OR and XOR (two and three inputs) must use the
/// brute-force minimum number of conditions.
inline std::string boolean_suite() {
  struct Case {
    std::string name;
    DiscreteTable table;
  };
  const std::vector<Case> cases{
      {"AND", truth_table(2, [](const std::vector<int>& r) { return r[0] && r[1]; })},
      {"OR", truth_table(2, [](const std::vector<int>& r) { return r[0] || r[1]; })},
      {"XOR", truth_table(2, [](const std::vector<int>& r) { return r[0] != r[1]; })},
      {"AND3", truth_table(3, [](const std::vector<int>& r) { return r[0] && r[1] && r[2]; })},
      {"OR3", truth_table(3, [](const std::vector<int>& r) { return r[0] || r[1] || r[2]; })},
      {"XOR3", truth_table(3, [](const std::vector<int>& r) { return (r[0] ^ r[1] ^ r[2]) != 0; })},
  };
  Rng rng(3);
  for (const auto& c : cases) {
    const auto rs = extract_rules(c.table);
    const std::size_t got = condition_count(rs), want = minimal_condition_count(c.table);
    if (got != want) return c.name + ": " + std::to_string(got) + " conditions, minimum " + std::to_string(want);
    if (auto v = rex_violation(c.table, default_rule(rs, c.table), rng); !v.empty()) return c.name + ": " + v;
  }
  return {};
}

inline std::string prune_replay_suite(std::size_t seeds) {
  const auto ds = blob_dataset(11);
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    NetworkConfig cfg;
    cfg.input_count = ds.attribute_count();
    cfg.output_count = ds.class_count();
    cfg.hidden_count = 1 + seed % 3;
    cfg.seed = seed;
    const auto net = retrain(init_network(cfg), 40, ds);
    PruneSpec spec;
    spec.retrain_epochs = 10;
    const auto r = prune(net, spec, ds);
    if (auto v = prune_replay_violation(net, spec, ds, r); !v.empty()) return "seed " + std::to_string(seed) + ": " + v;
  }
  return {};
}

/// Two full runs of the same configuration render byte-identical reports,
/// whatever the thread count.
inline std::string determinism_check(ExperimentConfig cfg, const PreparedData& data) {
  const auto a = render_report(run_reann(cfg, data, 1), ReportFormat::structured);
  const auto b = render_report(run_reann(cfg, data, 1), ReportFormat::structured);
  const auto c = render_report(run_reann(cfg, data, 4), ReportFormat::structured);
  if (a != b) return "repeated runs differ";
  if (a != c) return "threaded run differs";
  return {};
}

}  // namespace oracle
