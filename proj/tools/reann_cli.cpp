// Command-line front end for the REANN pipeline.
//
//   reann run      --config configs/iris.json --format text
//   reann train    --dataset season --seed 1 --out season.ckpt.json
//   reann extract  --checkpoint season.ckpt.json --out season.rules.json
//   reann evaluate --rules season.rules.json --dataset season --min-accuracy 0.95
//   reann report   --in iris.report.json --format text
//
// Exit codes: 0 success, 1 usage or configuration error, 2 stage failure,
// 3 accuracy below --min-accuracy in evaluate.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "reann/reann.hpp"

namespace {

enum Exit : int { ok = 0, usage = 1, stage = 2, rejected = 3 };

struct Options {
  std::string config;
  std::string dataset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::string out;
  std::string format = "text";
  std::string data_dir;
  std::size_t threads = 1;
  std::string checkpoint;
  std::string rules;
  std::string in;
  std::string split = "test";
  std::optional<double> min_accuracy;
  std::string log;
};

/// Thrown for problems with the pipeline stages themselves, as opposed to
/// bad input files or flags.
struct StageFailure : reann::Error {
  using reann::Error::Error;
};

std::filesystem::path data_dir(const Options& o) {
  return o.data_dir.empty() ? reann::default_data_dir() : std::filesystem::path(o.data_dir);
}

reann::ExperimentConfig load_config(const Options& o) {
  reann::ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = reann::config_from_json(reann::read_json_file(o.config));
  } else if (o.dataset.empty()) {
    throw reann::ContractViolation("either --config or --dataset is required");
  }
  if (!o.dataset.empty()) cfg.dataset = o.dataset;
  if (o.runs) cfg.runs = *o.runs, cfg.seeds.clear();
  if (o.seed) cfg.seeds = {*o.seed}, cfg.runs = 1;
  cfg.validate();
  return cfg;
}

reann::ReportFormat report_format(const Options& o) {
  return o.format == "structured" ? reann::ReportFormat::structured : reann::ReportFormat::text;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    reann::write_text_file(o.out, text);
  }
}

int cmd_run(const Options& o) {
  const auto cfg = load_config(o);
  const auto rep = reann::run_reann(cfg, data_dir(o), o.threads);
  emit(o, reann::render_report(rep, report_format(o)));
  for (const auto& r : rep.runs)
    if (!r.ok) std::cerr << "seed " << r.seed << " failed in " << r.failed_stage << ": " << r.failure << "\n";
  return rep.failed_runs ? stage : ok;
}

int cmd_train(const Options& o) {
  auto cfg = load_config(o);
  const auto data = reann::prepare_data(reann::resolve_dataset(cfg.dataset, data_dir(o)), cfg.train_count);
  const std::uint64_t seed = cfg.effective_seeds().front();
  reann::TrainingLog log;
  reann::TrainOutcome trained;
  try {
    trained = reann::train_network(cfg, data.train, seed, o.log.empty() ? nullptr : &log);
  } catch (const reann::TrainingError& e) {
    throw StageFailure(std::string("train: ") + e.what());
  }
  if (!o.log.empty()) {
    std::ofstream csv(o.log);
    if (!csv) throw reann::LoadError("cannot write " + o.log);
    csv << "epoch,phase,hidden,mse,accuracy\n";
    for (const auto& e : log.epochs)
      csv << e.epoch << "," << reann::to_string(e.phase) << "," << e.hidden << "," << e.mse << "," << e.accuracy
          << "\n";
  }
  reann::Checkpoint ck;
  ck.dataset = cfg.dataset;
  ck.train_count = data.train.size();
  ck.seed = seed;
  ck.network = trained.network;
  ck.trace = trained.trace;
  ck.train_accuracy = trained.train_accuracy;
  const auto doc = reann::to_json_document(ck).dump(2) + "\n";
  emit(o, doc);
  std::cerr << "trained " << trained.trace.final.triple() << " with " << trained.trace.final.connections
            << " connections, training accuracy " << reann::format_number(100.0 * trained.train_accuracy, 2)
            << " %\n";
  return ok;
}

int cmd_extract(const Options& o) {
  if (o.checkpoint.empty()) throw reann::ContractViolation("--checkpoint is required");
  const auto ck = reann::checkpoint_from_json(reann::read_json_file(o.checkpoint));
  reann::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = reann::config_from_json(reann::read_json_file(o.config));
  cfg.dataset = ck.dataset;
  const auto data = reann::prepare_data(reann::resolve_dataset(ck.dataset, data_dir(o)), ck.train_count);

  reann::RulesDocument doc;
  try {
    const double required = cfg.clustering.required == "fixed" ? cfg.clustering.required_value
                                                                : reann::accuracy(ck.network, data.train);
    const auto dn = reann::discretize_network(ck.network, data.train, required, cfg.clustering.schedule,
                                              cfg.clustering.constant_tolerance);
    const auto ex = reann::extract_network_rules(dn, data.train, cfg.rex);
    doc.rules = ex.rules;
    doc.bins = ex.view.bins;
    doc.text = reann::render_rules(ex.rules, reann::RuleVocabulary::of(data.schema, ex.view, data.train.normalization));
  } catch (const reann::DiscretizationError& e) {
    throw StageFailure(std::string("discretize: ") + e.what());
  } catch (const reann::ExtractionError& e) {
    throw StageFailure(std::string("extract: ") + e.what());
  }
  doc.dataset = ck.dataset;
  for (const auto& a : data.schema.attributes) doc.attribute_names.push_back(a.name);
  for (const auto& c : data.schema.classes) doc.class_names.push_back(c.name);
  emit(o, reann::to_json_document(doc).dump(2) + "\n");
  for (const auto& line : doc.text) std::cerr << line << "\n";
  return ok;
}

int cmd_evaluate(const Options& o) {
  if (o.rules.empty()) throw reann::ContractViolation("--rules is required");
  const auto doc = reann::rules_from_json(reann::read_json_file(o.rules));
  const std::string dataset = o.dataset.empty() ? doc.dataset : o.dataset;
  const auto schema = reann::resolve_dataset(dataset, data_dir(o));
  if (schema.attributes.size() != doc.bins.size())
    throw reann::ContractViolation("rules file has " + std::to_string(doc.bins.size()) + " attributes, dataset has " +
                                   std::to_string(schema.attributes.size()));
  const auto data = reann::prepare_data(schema, 0);
  const reann::Dataset& ds = o.split == "train" ? data.train : data.test;
  reann::DiscretizedView view;
  view.bins = doc.bins;
  const auto m = reann::evaluate_rules(doc.rules, view.encode(ds), ds.classes());
  std::cout << "rules " << m.rule_count << " (+default = " << m.rule_count_with_default << "), avg conditions "
            << reann::format_number(m.avg_conditions, 2) << ", " << o.split << " accuracy "
            << reann::format_number(100.0 * m.accuracy, 2) << " % on " << ds.size() << " patterns\n";
  if (o.min_accuracy && m.accuracy < *o.min_accuracy) {
    std::cerr << "accuracy below the required " << reann::format_number(100.0 * *o.min_accuracy, 2) << " %\n";
    return rejected;
  }
  return ok;
}

int cmd_report(const Options& o) {
  if (o.in.empty()) throw reann::ContractViolation("--in is required");
  const auto rep = reann::report_from_json(reann::read_json_file(o.in));
  emit(o, reann::render_report(rep, report_format(o)));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule extraction from constructively trained and pruned neural networks"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--data-dir", o.data_dir, "Directory holding bundled dataset schemas");
    sub->add_option("--out", o.out, "Write the result here instead of standard output");
  };
  auto experiment = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment configuration file");
    sub->add_option("--dataset", o.dataset, "Bundled dataset name or schema path");
    sub->add_option("--seed", o.seed, "Run a single seed");
    sub->add_option("--runs", o.runs, "Number of seeded runs")->check(CLI::PositiveNumber);
  };
  auto format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "structured"}));
  };

  auto* run = app.add_subcommand("run", "Run the full pipeline and print a report");
  experiment(run), common(run), format(run);
  run->add_option("--threads", o.threads, "Seeds to run concurrently")->check(CLI::PositiveNumber);

  auto* train = app.add_subcommand("train", "Grow and prune a network, write a checkpoint");
  experiment(train), common(train);
  train->add_option("--log", o.log, "Write the per-epoch training log as CSV");

  auto* extract = app.add_subcommand("extract", "Cluster a checkpoint's hidden nodes and extract rules");
  common(extract);
  extract->add_option("--checkpoint", o.checkpoint, "Checkpoint written by train")->required();
  extract->add_option("--config", o.config, "Configuration for clustering and rule settings");

  auto* evaluate = app.add_subcommand("evaluate", "Score a rules file against a dataset split");
  evaluate->add_option("--data-dir", o.data_dir, "Directory holding bundled dataset schemas");
  evaluate->add_option("--rules", o.rules, "Rules file written by extract")->required();
  evaluate->add_option("--dataset", o.dataset, "Dataset to score against (default: the rules file's)");
  evaluate->add_option("--split", o.split, "Which split to score")->check(CLI::IsMember({"train", "test"}));
  evaluate->add_option("--min-accuracy", o.min_accuracy, "Fail with exit code 3 below this accuracy")
      ->check(CLI::Range(0.0, 1.0));

  auto* report = app.add_subcommand("report", "Render a stored structured report");
  common(report), format(report);
  report->add_option("--in", o.in, "Structured report written by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (*run) return cmd_run(o);
    if (*train) return cmd_train(o);
    if (*extract) return cmd_extract(o);
    if (*evaluate) return cmd_evaluate(o);
    return cmd_report(o);
  } catch (const StageFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stage;
  } catch (const reann::TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stage;
  } catch (const reann::ExtractionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return stage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
}
