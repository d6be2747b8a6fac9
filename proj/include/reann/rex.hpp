#pragma once

// REx: sequential-covering rule extraction over discrete tables, rule
// clustering and pruning, default-rule selection and the DNF merge that
// turns hidden-layer rules into rules over the inputs.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "reann/common.hpp"

namespace reann {

/// Rows of attribute codes with class labels. Attributes flagged `ordered`
/// allow conditions over contiguous code ranges; others only code equality.
struct DiscreteTable {
  std::vector<std::size_t> code_counts;
  std::vector<bool> ordered;
  std::vector<std::vector<int>> rows;
  std::vector<int> labels;
  std::size_t class_count = 0;

  std::size_t size() const { return rows.size(); }
  std::size_t attributes() const { return code_counts.size(); }

  void validate() const {
    require(ordered.size() == code_counts.size(), "table: ordered flags do not match attributes");
    require(labels.size() == rows.size(), "table: one label per row required");
    for (const auto& r : rows) {
      require(r.size() == code_counts.size(), "table: row arity mismatch");
      for (std::size_t a = 0; a < r.size(); ++a)
        require(r[a] >= 0 && static_cast<std::size_t>(r[a]) < code_counts[a], "table: code out of range");
    }
    for (int l : labels) require(l >= 0 && static_cast<std::size_t>(l) < class_count, "table: label out of range");
  }
};

/// attribute code in [lo, hi]. Equality conditions have lo == hi.
struct Condition {
  std::size_t attribute = 0;
  int lo = 0;
  int hi = 0;

  bool holds(int code) const { return code >= lo && code <= hi; }
  auto operator<=>(const Condition&) const = default;
};

struct RuleStats {
  std::size_t covered = 0;
  std::size_t correct = 0;
  bool operator==(const RuleStats&) const = default;
};

struct Rule {
  std::vector<Condition> conditions;  // sorted by attribute, at most one per attribute
  int class_index = 0;
  RuleStats stats;

  bool covers(std::span<const int> codes) const {
    for (const auto& c : conditions)
      if (!c.holds(codes[c.attribute])) return false;
    return true;
  }

  /// Same conditions and consequent; stats are not compared.
  bool same_as(const Rule& o) const { return class_index == o.class_index && conditions == o.conditions; }

  bool operator==(const Rule&) const = default;
};

inline bool rule_covers(const Rule& r, std::span<const int> codes) { return r.covers(codes); }

struct RuleSet {
  std::vector<Rule> rules;
  int default_class = -1;  // -1 until a default rule is chosen

  bool has_default() const { return default_class >= 0; }
  bool operator==(const RuleSet&) const = default;
};

namespace detail {

using Coverage = std::vector<std::uint8_t>;

inline Coverage coverage(const Rule& r, const DiscreteTable& t) {
  Coverage c(t.size(), 0);
  for (std::size_t p = 0; p < t.size(); ++p) c[p] = r.covers(t.rows[p]) ? 1 : 0;
  return c;
}

inline RuleStats stats_of(const Rule& r, const DiscreteTable& t) {
  RuleStats s;
  for (std::size_t p = 0; p < t.size(); ++p)
    if (r.covers(t.rows[p])) {
      ++s.covered;
      if (t.labels[p] == r.class_index) ++s.correct;
    }
  return s;
}

inline Rule without(const Rule& r, std::size_t attribute) {
  Rule out = r;
  std::erase_if(out.conditions, [&](const Condition& c) { return c.attribute == attribute; });
  return out;
}

inline Condition* find_condition(Rule& r, std::size_t attribute) {
  for (auto& c : r.conditions)
    if (c.attribute == attribute) return &c;
  return nullptr;
}

/// Widens the range condition on `attribute` towards both ends while `ok`
/// accepts the widened rule. A range that reaches the full domain is removed.
template <typename Accept>
void widen_condition(Rule& rule, std::size_t attribute, int code_count, Accept&& ok) {
  for (int dir : {-1, +1}) {
    Condition* c = find_condition(rule, attribute);
    if (!c) return;
    const int limit = dir < 0 ? 0 : code_count - 1;
    Rule trial = rule;
    Condition* tc = find_condition(trial, attribute);
    (dir < 0 ? tc->lo : tc->hi) = limit;
    if ((dir < 0 ? c->lo : c->hi) != limit && ok(trial)) {
      rule = trial;
    } else {
      while ((dir < 0 ? c->lo : c->hi) != limit) {
        trial = rule;
        tc = find_condition(trial, attribute);
        (dir < 0 ? tc->lo : tc->hi) += dir;
        if (!ok(trial)) break;
        rule = trial;
        c = find_condition(rule, attribute);
      }
    }
  }
  if (Condition* c = find_condition(rule, attribute); c && c->lo == 0 && c->hi == code_count - 1)
    rule = without(rule, attribute);
}

/// Attribute order for condition-removal attempts: fewest other-class
/// patterns excluded first, so the most discriminating conditions survive.
/// Among equally discriminating conditions the lower attribute index is kept,
/// so higher indices are tried first.
inline std::vector<std::size_t> removal_order(const Rule& r, const DiscreteTable& t, const std::vector<int>& labels) {
  std::vector<std::pair<std::size_t, std::size_t>> keyed;
  for (const auto& c : r.conditions) {
    std::size_t excluded = 0;
    for (std::size_t q = 0; q < t.size(); ++q)
      if (labels[q] != r.class_index && !c.holds(t.rows[q][c.attribute])) ++excluded;
    keyed.emplace_back(excluded, c.attribute);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second > b.second;
  });
  std::vector<std::size_t> out;
  for (const auto& [n, a] : keyed) out.push_back(a);
  return out;
}

}  // namespace detail

/// Majority class of each row's code-vector group (ties to the lowest class).
/// Rows whose label differs from this are the table's inconsistencies.
inline std::vector<int> majority_labels(const DiscreteTable& t) {
  std::map<std::vector<int>, std::vector<std::size_t>> hist;
  for (std::size_t p = 0; p < t.size(); ++p) {
    auto& h = hist[t.rows[p]];
    if (h.empty()) h.assign(t.class_count, 0);
    ++h[static_cast<std::size_t>(t.labels[p])];
  }
  std::vector<int> out(t.size());
  for (std::size_t p = 0; p < t.size(); ++p) {
    const auto& h = hist[t.rows[p]];
    out[p] = static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
  }
  return out;
}

/// Sequential covering. The first unmarked row seeds a rule holding all of
/// its codes; conditions are dropped (least discriminating first) and ordered
/// ranges widened while the rule covers no row whose majority class differs;
/// every row the rule covers is then marked.
inline RuleSet extract_rules(const DiscreteTable& t) {
  t.validate();
  require(t.size() > 0, "extract_rules: empty table");
  const auto target = majority_labels(t);
  std::vector<std::uint8_t> marked(t.size(), 0);
  RuleSet rs;
  for (std::size_t p = 0; p < t.size(); ++p) {
    if (marked[p]) continue;
    Rule rule;
    rule.class_index = target[p];
    for (std::size_t a = 0; a < t.attributes(); ++a)
      if (t.code_counts[a] > 1) rule.conditions.push_back({a, t.rows[p][a], t.rows[p][a]});

    auto consistent = [&](const Rule& r) {
      for (std::size_t q = 0; q < t.size(); ++q)
        if (target[q] != r.class_index && r.covers(t.rows[q])) return false;
      return true;
    };
    const auto order = detail::removal_order(rule, t, target);
    for (std::size_t a : order) {
      auto trial = detail::without(rule, a);
      if (consistent(trial)) rule = std::move(trial);
    }
    for (std::size_t a : order)
      if (t.ordered[a] && detail::find_condition(rule, a))
        detail::widen_condition(rule, a, static_cast<int>(t.code_counts[a]), consistent);

    rule.stats = detail::stats_of(rule, t);
    for (std::size_t q = 0; q < t.size(); ++q)
      if (rule.covers(t.rows[q])) marked[q] = 1;
    rs.rules.push_back(std::move(rule));
  }
  return rs;
}

/// Groups rules by class (ascending class index, original order within a
/// class) and removes exact duplicates. Stats are left untouched.
inline RuleSet cluster_rules(const RuleSet& rs) {
  RuleSet out;
  out.default_class = rs.default_class;
  auto rules = rs.rules;
  std::stable_sort(rules.begin(), rules.end(),
                   [](const Rule& a, const Rule& b) { return a.class_index < b.class_index; });
  for (auto& r : rules) {
    const bool dup = std::any_of(out.rules.begin(), out.rules.end(), [&](const Rule& o) { return o.same_as(r); });
    if (!dup) out.rules.push_back(std::move(r));
  }
  return out;
}

/// True when every row matched by `specific` is matched by `general` by
/// construction (each condition of `general` contains the corresponding one).
inline bool is_more_general(const Rule& general, const Rule& specific) {
  for (const auto& g : general.conditions) {
    const auto it = std::find_if(specific.conditions.begin(), specific.conditions.end(),
                                 [&](const Condition& s) { return s.attribute == g.attribute; });
    if (it == specific.conditions.end() || it->lo < g.lo || it->hi > g.hi) return false;
  }
  return true;
}

inline std::size_t default_noise_floor(std::size_t table_size) { return table_size < 25 ? 1 : 2; }

struct RulePruneOptions {
  std::size_t noise_floor = 2;      // minimum correctly covered rows for a rule to stay
  std::size_t error_allowance = 0;  // extra misclassified rows a generalization may add
  bool operator==(const RulePruneOptions&) const = default;
};

inline void refresh_stats(RuleSet& rs, const DiscreteTable& t) {
  for (auto& r : rs.rules) r.stats = detail::stats_of(r, t);
}

/// Within each class group: generalize rules by dropping conditions and
/// widening ranges as long as misclassifications on `t` grow by at most the
/// allowance and no row becomes covered by rules of two classes; then drop
/// subsumed rules, rules whose rows are all covered by same-class rules,
/// and noise rules under the floor.
inline RuleSet prune_rules(const RuleSet& rs, const DiscreteTable& t, const RulePruneOptions& opt) {
  t.validate();
  RuleSet out = cluster_rules(rs);
  auto& rules = out.rules;
  const std::size_t n = t.size();

  // cover[c][p]: rules of class c covering row p.
  std::vector<std::vector<std::size_t>> cover(t.class_count, std::vector<std::size_t>(n, 0));
  std::vector<detail::Coverage> cov;
  for (const auto& r : rules) {
    cov.push_back(detail::coverage(r, t));
    for (std::size_t p = 0; p < n; ++p) cover[static_cast<std::size_t>(r.class_index)][p] += cov.back()[p];
  }
  auto misclassified = [&](const Rule& r) {
    std::size_t m = 0;
    for (std::size_t p = 0; p < n; ++p)
      if (t.labels[p] != r.class_index && r.covers(t.rows[p])) ++m;
    return m;
  };
  auto cross_overlap = [&](const Rule& r) {
    for (std::size_t p = 0; p < n; ++p) {
      if (!r.covers(t.rows[p])) continue;
      for (std::size_t c = 0; c < t.class_count; ++c)
        if (static_cast<int>(c) != r.class_index && cover[c][p] > 0) return true;
    }
    return false;
  };

  for (std::size_t i = 0; i < rules.size(); ++i) {
    const std::size_t limit = misclassified(rules[i]) + opt.error_allowance;
    auto ok = [&](const Rule& trial) { return misclassified(trial) <= limit && !cross_overlap(trial); };
    Rule rule = rules[i];
    const auto order = detail::removal_order(rule, t, t.labels);
    for (std::size_t a : order) {
      auto trial = detail::without(rule, a);
      if (ok(trial)) rule = std::move(trial);
    }
    for (std::size_t a : order)
      if (a < t.ordered.size() && t.ordered[a] && detail::find_condition(rule, a))
        detail::widen_condition(rule, a, static_cast<int>(t.code_counts[a]), ok);
    const auto c = static_cast<std::size_t>(rule.class_index);
    for (std::size_t p = 0; p < n; ++p) cover[c][p] -= cov[i][p];
    cov[i] = detail::coverage(rule, t);
    for (std::size_t p = 0; p < n; ++p) cover[c][p] += cov[i][p];
    rules[i] = std::move(rule);
  }

  std::vector<std::uint8_t> alive(rules.size(), 1);
  auto kill = [&](std::size_t i) {
    alive[i] = 0;
    const auto c = static_cast<std::size_t>(rules[i].class_index);
    for (std::size_t p = 0; p < n; ++p) cover[c][p] -= cov[i][p];
  };

  // Duplicates and subsumed rules.
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (!alive[i]) continue;
    for (std::size_t j = 0; j < rules.size(); ++j) {
      if (i == j || !alive[j] || rules[i].class_index != rules[j].class_index) continue;
      if (!is_more_general(rules[j], rules[i])) continue;
      if (rules[i].same_as(rules[j]) && j > i) continue;  // keep the earlier copy
      kill(i);
      break;
    }
  }

  // Rules whose covered rows are all covered by other rules of the class,
  // smallest coverage first.
  std::vector<std::size_t> by_size(rules.size());
  std::iota(by_size.begin(), by_size.end(), std::size_t{0});
  auto covered_count = [&](std::size_t i) { return std::accumulate(cov[i].begin(), cov[i].end(), std::size_t{0}); };
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](std::size_t a, std::size_t b) { return covered_count(a) < covered_count(b); });
  for (std::size_t i : by_size) {
    if (!alive[i]) continue;
    const auto c = static_cast<std::size_t>(rules[i].class_index);
    bool redundant = true;
    for (std::size_t p = 0; p < n && redundant; ++p)
      if (cov[i][p] && cover[c][p] < 2) redundant = false;
    if (redundant) kill(i);
  }

  // Noise rules: too few correctly classified rows that no other rule of
  // the class covers. Weakest first, re-measured after every removal.
  auto unique_correct = [&](std::size_t i) {
    const auto c = static_cast<std::size_t>(rules[i].class_index);
    std::size_t u = 0;
    for (std::size_t p = 0; p < n; ++p)
      if (cov[i][p] && cover[c][p] == 1 && t.labels[p] == rules[i].class_index) ++u;
    return u;
  };
  while (opt.noise_floor > 0) {
    std::size_t weakest = rules.size(), weakest_u = 0;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (!alive[i]) continue;
      const auto u = unique_correct(i);
      if (u < opt.noise_floor && (weakest == rules.size() || u < weakest_u)) weakest = i, weakest_u = u;
    }
    if (weakest == rules.size()) break;
    kill(weakest);
  }

  RuleSet kept;
  kept.default_class = out.default_class;
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (alive[i]) kept.rules.push_back(rules[i]);
  refresh_stats(kept, t);
  return kept;
}

struct Classification {
  int class_index = 0;
  bool covered = false;
  bool conflict = false;
};

/// Class of any covering rule, the default when none covers. When rules of
/// different classes cover the row, the one with more correct coverage wins
/// (earlier rule on ties) and the conflict is reported.
inline Classification classify(const RuleSet& rs, std::span<const int> codes) {
  Classification out;
  out.class_index = rs.default_class;
  const Rule* winner = nullptr;
  for (const auto& r : rs.rules) {
    if (!r.covers(codes)) continue;
    if (winner && winner->class_index != r.class_index) out.conflict = true;
    if (!winner || r.stats.correct > winner->stats.correct) winner = &r;
  }
  if (winner) {
    out.covered = true;
    out.class_index = winner->class_index;
  }
  return out;
}

inline int majority_class(const std::vector<int>& labels, std::size_t class_count,
                          const std::vector<std::uint8_t>* mask = nullptr) {
  std::vector<std::size_t> h(class_count, 0);
  for (std::size_t p = 0; p < labels.size(); ++p)
    if (!mask || (*mask)[p]) ++h[static_cast<std::size_t>(labels[p])];
  return static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
}

/// Picks the default class (majority among uncovered rows, falling back to
/// the table majority) and drops default-class rules whose removal changes
/// no row's classification.
inline RuleSet default_rule(const RuleSet& rs, const DiscreteTable& t) {
  t.validate();
  RuleSet out = rs;
  refresh_stats(out, t);
  std::vector<std::uint8_t> uncovered(t.size(), 1);
  bool any_uncovered = false;
  for (std::size_t p = 0; p < t.size(); ++p) {
    for (const auto& r : out.rules)
      if (r.covers(t.rows[p])) {
        uncovered[p] = 0;
        break;
      }
    any_uncovered = any_uncovered || uncovered[p];
  }
  const int overall = majority_class(t.labels, t.class_count);
  if (!any_uncovered) {
    out.default_class = overall;
  } else {
    std::vector<std::size_t> h(t.class_count, 0);
    for (std::size_t p = 0; p < t.size(); ++p)
      if (uncovered[p]) ++h[static_cast<std::size_t>(t.labels[p])];
    const std::size_t best = *std::max_element(h.begin(), h.end());
    out.default_class = h[static_cast<std::size_t>(overall)] == best
                            ? overall
                            : static_cast<int>(std::find(h.begin(), h.end(), best) - h.begin());
  }

  auto classes_of = [&](const RuleSet& s) {
    std::vector<int> c(t.size());
    for (std::size_t p = 0; p < t.size(); ++p) c[p] = classify(s, t.rows[p]).class_index;
    return c;
  };
  const auto reference = classes_of(out);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < out.rules.size(); ++i)
    if (out.rules[i].class_index == out.default_class) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return out.rules[a].stats.covered < out.rules[b].stats.covered;
  });
  std::vector<std::uint8_t> alive(out.rules.size(), 1);
  for (std::size_t i : order) {
    alive[i] = 0;
    RuleSet trial;
    trial.default_class = out.default_class;
    for (std::size_t j = 0; j < out.rules.size(); ++j)
      if (alive[j]) trial.rules.push_back(out.rules[j]);
    if (classes_of(trial) != reference) alive[i] = 1;
  }
  RuleSet kept;
  kept.default_class = out.default_class;
  for (std::size_t j = 0; j < out.rules.size(); ++j)
    if (alive[j]) kept.rules.push_back(out.rules[j]);
  return kept;
}

inline std::size_t condition_count(const RuleSet& rs) {
  std::size_t n = 0;
  for (const auto& r : rs.rules) n += r.conditions.size();
  return n;
}

inline double rule_accuracy(const RuleSet& rs, const DiscreteTable& t) {
  if (t.size() == 0) return 0.0;
  std::size_t ok = 0;
  for (std::size_t p = 0; p < t.size(); ++p)
    if (classify(rs, t.rows[p]).class_index == t.labels[p]) ++ok;
  return static_cast<double>(ok) / static_cast<double>(t.size());
}

/// Tries every class as the default: the class's rules are dropped and the
/// default re-chosen. Candidates must classify `t` at least as accurately as
/// `rs` minus `tolerance`. The default moves away from the one chosen by
/// default_rule only for strictly fewer conditions (or as many conditions
/// and higher accuracy); remaining ties go to the lowest class.
inline RuleSet reselect_default(const RuleSet& rs, const DiscreteTable& t, double tolerance = 0.0) {
  RuleSet best = default_rule(rs, t);
  double best_acc = rule_accuracy(best, t);
  const double floor = rule_accuracy(rs, t) - tolerance - 1e-12;
  for (std::size_t c = 0; c < t.class_count; ++c) {
    if (static_cast<int>(c) == best.default_class) continue;
    RuleSet trial;
    for (const auto& r : rs.rules)
      if (r.class_index != static_cast<int>(c)) trial.rules.push_back(r);
    trial = default_rule(trial, t);
    const double acc = rule_accuracy(trial, t);
    if (acc < floor) continue;
    const auto key = [&](const RuleSet& s, double a) {
      return std::make_tuple(condition_count(s), -a);
    };
    if (key(trial, acc) < key(best, best_acc)) best = std::move(trial), best_acc = acc;
  }
  return best;
}

struct RuleMetrics {
  std::size_t rule_count = 0;               // non-default rules
  std::size_t rule_count_with_default = 0;
  double avg_conditions = 0.0;              // default rule counted with 0 conditions
  double avg_conditions_excluding_default = 0.0;
  double accuracy = 0.0;
  std::size_t conflicts = 0;                // rows hit by rules of two classes
  std::size_t uncovered = 0;                // rows classified by the default

  bool operator==(const RuleMetrics&) const = default;
};

inline RuleMetrics evaluate_rules(const RuleSet& rs, const std::vector<std::vector<int>>& rows,
                                  const std::vector<int>& labels) {
  require(rows.size() == labels.size(), "evaluate_rules: one label per row required");
  RuleMetrics m;
  m.rule_count = rs.rules.size();
  m.rule_count_with_default = rs.rules.size() + (rs.has_default() ? 1 : 0);
  std::size_t conds = 0;
  for (const auto& r : rs.rules) conds += r.conditions.size();
  if (m.rule_count_with_default > 0)
    m.avg_conditions = static_cast<double>(conds) / static_cast<double>(m.rule_count_with_default);
  if (m.rule_count > 0)
    m.avg_conditions_excluding_default = static_cast<double>(conds) / static_cast<double>(m.rule_count);
  std::size_t correct = 0;
  for (std::size_t p = 0; p < rows.size(); ++p) {
    const auto c = classify(rs, rows[p]);
    if (c.conflict) ++m.conflicts;
    if (!c.covered) ++m.uncovered;
    if (c.class_index == labels[p]) ++correct;
  }
  if (!rows.empty()) m.accuracy = static_cast<double>(correct) / static_cast<double>(rows.size());
  return m;
}

inline RuleMetrics evaluate_rules(const RuleSet& rs, const DiscreteTable& t) {
  return evaluate_rules(rs, t.rows, t.labels);
}

/// Input-layer explanations: for each hidden attribute, the rules (over
/// input codes) concluding each of its cluster codes.
using LayerExplanations = std::vector<std::map<int, std::vector<Rule>>>;

inline LayerExplanations explanations_by_code(const std::vector<RuleSet>& per_hidden) {
  LayerExplanations out(per_hidden.size());
  for (std::size_t h = 0; h < per_hidden.size(); ++h)
    for (const auto& r : per_hidden[h].rules) out[h][r.class_index].push_back(r);
  return out;
}

/// Conjunction of two rules' conditions with ranges intersected per
/// attribute; false when some attribute's ranges are disjoint. Conditions
/// spanning an attribute's whole domain are dropped.
inline bool conjoin(const Rule& a, const Rule& b, const std::vector<std::size_t>& code_counts, Rule& out) {
  std::map<std::size_t, Condition> merged;
  for (const auto* r : {&a, &b})
    for (const auto& c : r->conditions) {
      auto [it, inserted] = merged.emplace(c.attribute, c);
      if (!inserted) {
        it->second.lo = std::max(it->second.lo, c.lo);
        it->second.hi = std::min(it->second.hi, c.hi);
        if (it->second.lo > it->second.hi) return false;
      }
    }
  out.conditions.clear();
  for (const auto& [attr, c] : merged)
    if (!(c.lo == 0 && static_cast<std::size_t>(c.hi) + 1 >= code_counts[attr])) out.conditions.push_back(c);
  return true;
}

/// Replaces each hidden-layer condition by the disjunction of the input
/// rules explaining that cluster code and expands into DNF.
inline RuleSet merge_layers(const RuleSet& hidden_rules, const LayerExplanations& input_rules,
                            const std::vector<std::size_t>& input_code_counts, std::size_t max_conjuncts = 200000) {
  RuleSet merged;
  for (const auto& hr : hidden_rules.rules) {
    std::vector<Rule> conj(1);
    for (const auto& cond : hr.conditions) {
      require(cond.attribute < input_rules.size(), "merge_layers: hidden attribute without explanations");
      std::vector<const Rule*> alternatives;
      for (int code = cond.lo; code <= cond.hi; ++code) {
        const auto it = input_rules[cond.attribute].find(code);
        if (it == input_rules[cond.attribute].end() || it->second.empty())
          throw ExtractionError("hidden node " + std::to_string(cond.attribute + 1) + " cluster " +
                                std::to_string(code + 1) + " has no input rules");
        for (const auto& r : it->second) alternatives.push_back(&r);
      }
      std::vector<Rule> next;
      for (const auto& a : conj)
        for (const Rule* b : alternatives) {
          Rule m;
          if (!conjoin(a, *b, input_code_counts, m)) continue;
          const bool dup = std::any_of(next.begin(), next.end(),
                                       [&](const Rule& o) { return o.conditions == m.conditions; });
          if (!dup) next.push_back(std::move(m));
          if (next.size() > max_conjuncts) throw ExtractionError("DNF expansion exceeded the conjunct limit");
        }
      conj = std::move(next);
    }
    for (auto& r : conj) {
      r.class_index = hr.class_index;
      merged.rules.push_back(std::move(r));
    }
  }
  return cluster_rules(merged);
}

/// Rewrites attribute indices through `ids` (column -> global attribute).
inline RuleSet remap_attributes(RuleSet rs, const std::vector<std::size_t>& ids) {
  for (auto& r : rs.rules) {
    for (auto& c : r.conditions) c.attribute = ids.at(c.attribute);
    std::sort(r.conditions.begin(), r.conditions.end());
  }
  return rs;
}

}  // namespace reann
