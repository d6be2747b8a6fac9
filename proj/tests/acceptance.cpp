// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"

using namespace reann;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t threads() { return std::max(1u, std::thread::hardware_concurrency()); }

ExperimentReport run_config(const std::string& name) {
  const auto path = std::filesystem::path(REANN_SOURCE_DIR) / "configs" / (name + ".json");
  return run_reann(config_from_json(read_json_file(path)), default_data_dir(), threads());
}

std::string pct(double f) { return format_number(100.0 * f, 2) + "%"; }

std::string check(bool ok, const std::string& what) { return std::string(ok ? "" : "!") + what; }

/// True when some rendered condition on a petal attribute cuts at `value`.
bool has_petal_cut(const std::vector<std::string>& lines, const std::string& value) {
  for (const auto& line : lines)
    for (const std::string attr : {"Petal-length (A3)", "Petal-width (A4)"})
      for (const auto& form : {attr + " <= " + value, attr + " > " + value, value + " < " + attr})
        if (line.find(form) != std::string::npos) return true;
  return false;
}

Outcome ac1() {
  const auto rep = run_config("season");
  if (rep.failed_runs) return {false, "run failed: " + rep.runs[0].failure};
  const auto& run = rep.runs[0];
  std::set<std::string> bodies;
  for (const auto& l : run.rule_text) bodies.insert(l.substr(l.find(':') + 2));
  const std::set<std::string> expected{"If Tree (A2) = yellow then autumn", "If Tree (A2) = leafless then autumn",
                                       "If Temperature (A3) = low then winter",
                                       "If Temperature (A3) = high then summer", "spring"};
  const bool rules_ok = bodies == expected && run.train_metrics.rule_count == 4;
  const auto data = prepare_data(resolve_dataset("season", default_data_dir()), 0);
  const bool acc_ok = data.train.size() == 11 && run.train_metrics.accuracy == 1.0 && run.test_metrics.accuracy == 1.0;
  return {rules_ok && acc_ok, check(rules_ok, "4 rules + default spring") + ", " +
                                  check(acc_ok, "accuracy " + pct(run.train_metrics.accuracy) + " on " +
                                                    std::to_string(data.train.size()) + " patterns")};
}

Outcome ac2() {
  const auto rep = run_config("iris");
  if (rep.failed_runs) return {false, std::to_string(rep.failed_runs) + " runs failed"};
  const double rules = rep.aggregates.at("rule_count").median;
  const double acc = rep.aggregates.at("rule_test_accuracy").median;
  std::size_t with_cuts = 0;
  for (const auto& r : rep.runs) with_cuts += has_petal_cut(r.rule_text, "1.9") && has_petal_cut(r.rule_text, "4.9");
  const bool a = rep.runs.size() == 10 && rules <= 3, b = acc >= 0.943, c = with_cuts >= 1;
  return {a && b && c, check(a, "median rules " + format_number(rules, 1)) + ", " +
                           check(b, "median test accuracy " + pct(acc)) + ", " +
                           check(c, "runs with 1.9/4.9 petal cuts " + std::to_string(with_cuts) + "/10")};
}

Outcome ac3() {
  const auto rep = run_config("breast-cancer");
  if (rep.failed_runs) return {false, std::to_string(rep.failed_runs) + " runs failed"};
  const double rules = rep.aggregates.at("rule_count").median;
  const double acc = rep.aggregates.at("rule_test_accuracy").median;
  const double conns = rep.aggregates.at("final_connections").mean;
  std::size_t pruned5 = 0;
  for (const auto& r : rep.runs) pruned5 += r.pruned_inputs >= 5;
  const bool a = rep.runs.size() == 10 && rules <= 3, b = acc >= 0.933, c = pruned5 >= 5, d = conns <= 12;
  return {a && b && c && d, check(a, "median rules " + format_number(rules, 1)) + ", " +
                                check(b, "median test accuracy " + pct(acc)) + ", " +
                                check(c, "runs with >=5 inputs pruned " + std::to_string(pruned5) + "/10") + ", " +
                                check(d, "mean final connections " + format_number(conns, 1))};
}

Outcome ac4() {
  const auto rep = run_config("diabetes");
  if (rep.failed_runs) return {false, std::to_string(rep.failed_runs) + " runs failed"};
  const double rules = rep.aggregates.at("rule_count").median;
  const double acc = rep.aggregates.at("rule_test_accuracy").median;
  const bool a = rep.runs.size() == 10 && acc >= 0.72, b = rules <= 4;
  return {a && b, check(a, "median test accuracy " + pct(acc)) + ", " + check(b, "median rules " + format_number(rules, 1))};
}

Outcome ac5() {
  std::vector<std::string> failures;
  auto note = [&](const std::string& name, const std::string& v) {
    if (!v.empty()) failures.push_back(name + ": " + v);
  };
  double worst = 0;
  note("gradient", oracle::gradient_suite(100, &worst));
  note("clustering", oracle::clustering_suite(1000));
  note("small epsilon", oracle::small_epsilon_suite(200));
  note("rex", oracle::rex_suite(1000));
  note("boolean", oracle::boolean_suite());
  note("prune replay", oracle::prune_replay_suite(10));
  {
    ExperimentConfig cfg;
    cfg.dataset = "synthetic";
    cfg.runs = 3;
    PreparedData data;
    data.train = data.test = oracle::blob_dataset(13);
    data.schema = data.train.schema;
    note("determinism", oracle::determinism_check(cfg, data));
  }
  std::string detail = "max gradient error " + format_number(worst, 12);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  struct Criterion {
    std::string id, name;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "season", 5, ac1},   {"AC2", "iris", 60, ac2},        {"AC3", "breast cancer", 300, ac3},
      {"AC4", "diabetes", 600, ac4}, {"AC5", "property suite", 0, ac5},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::string timing = format_number(secs, 2) + " s";
    if (c.limit_seconds > 0) timing += check(in_time, " (limit " + format_number(c.limit_seconds, 0) + " s)");
    std::printf("[%s] %s %s: %s; %s\n", pass ? "PASS" : "FAIL", c.id.c_str(), c.name.c_str(), o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
