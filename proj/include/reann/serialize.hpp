#pragma once

// JSON mapping for the library's records plus the two versioned file
// formats shared by the pipeline stages: network checkpoints and rule files.
// Doubles are written in shortest round-trip form, so load(save(x)) == x.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "reann/clusterer.hpp"
#include "reann/common.hpp"
#include "reann/dataset.hpp"
#include "reann/network.hpp"
#include "reann/rex.hpp"
#include "reann/trainer.hpp"

namespace reann {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NetworkConfig, input_count, hidden_count, output_count, learning_rate, init_low,
                                   init_high, weight_decay, seed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Network, config, w_ih, mask_ih, bias_h, w_ho, mask_ho, bias_o, input_active,
                                   hidden_active)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Architecture, inputs, hidden, outputs, connections)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ArchitectureTrace, initial, intermediate, final, constructive_epochs,
                                   prune_epochs, total_epochs)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(StageRecord, hidden, epochs, accuracy, mse)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConstructiveSpec, max_hidden, epochs_per_stage, add_threshold,
                                   error_plateau_patience, plateau_tolerance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PruneSpec, accuracy_floor_drop, retrain_epochs, final_retrain_epochs,
                                   weight_decay)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EpsilonSchedule, start, factor, floor)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ClusterModel, epsilon, seeds, representatives, counts, sums, membership)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HiddenDiscretization, node, constant, constant_value, model)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Condition, attribute, lo, hi)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RuleStats, covered, correct)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Rule, conditions, class_index, stats)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RuleSet, rules, default_class)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RuleMetrics, rule_count, rule_count_with_default, avg_conditions,
                                   avg_conditions_excluding_default, accuracy, conflicts, uncovered)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RulePruneOptions, noise_floor, error_allowance)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AttributeBins, categorical, code_count, edges, below, above)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AttributeTransform, offset, span, constant)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NormalizationMap, transforms)

inline void expect_format(const nlohmann::json& j, const std::string& tag) {
  if (!j.is_object() || !j.contains("format")) throw FormatError("missing format tag, expected " + tag);
  const auto got = j.at("format").get<std::string>();
  if (got != tag) throw FormatError("format tag '" + got + "' where " + tag + " was expected");
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
}

/// Trained and pruned network plus what is needed to rebuild its data view.
struct Checkpoint {
  static constexpr const char* format = "reann-checkpoint/1";
  std::string dataset;  // name or schema path, as configured
  std::size_t train_count = 0;
  std::uint64_t seed = 0;
  Network network;
  ArchitectureTrace trace;
  double train_accuracy = 0.0;

  bool operator==(const Checkpoint&) const = default;
};

inline nlohmann::json to_json_document(const Checkpoint& c) {
  return {{"format", Checkpoint::format}, {"dataset", c.dataset},   {"train_count", c.train_count},
          {"seed", c.seed},               {"network", c.network},   {"trace", c.trace},
          {"train_accuracy", c.train_accuracy}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  expect_format(j, Checkpoint::format);
  try {
    Checkpoint c;
    c.dataset = j.at("dataset").get<std::string>();
    c.train_count = j.at("train_count").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.network = j.at("network").get<Network>();
    c.trace = j.at("trace").get<ArchitectureTrace>();
    c.train_accuracy = j.at("train_accuracy").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

/// A rule set together with the input bins its codes refer to, so it can
/// be applied to raw patterns without the network.
struct RulesDocument {
  static constexpr const char* format = "reann-rules/1";
  std::string dataset;
  std::vector<std::string> attribute_names;
  std::vector<std::string> class_names;
  std::vector<AttributeBins> bins;
  RuleSet rules;
  std::vector<std::string> text;

  bool operator==(const RulesDocument&) const = default;
};

inline nlohmann::json to_json_document(const RulesDocument& d) {
  return {{"format", RulesDocument::format},
          {"dataset", d.dataset},
          {"attribute_names", d.attribute_names},
          {"class_names", d.class_names},
          {"bins", d.bins},
          {"rules", d.rules},
          {"text", d.text}};
}

inline RulesDocument rules_from_json(const nlohmann::json& j) {
  expect_format(j, RulesDocument::format);
  try {
    RulesDocument d;
    d.dataset = j.at("dataset").get<std::string>();
    d.attribute_names = j.at("attribute_names").get<std::vector<std::string>>();
    d.class_names = j.at("class_names").get<std::vector<std::string>>();
    d.bins = j.at("bins").get<std::vector<AttributeBins>>();
    d.rules = j.at("rules").get<RuleSet>();
    d.text = j.value("text", std::vector<std::string>{});
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("rules: ") + e.what());
  }
}

}  // namespace reann
