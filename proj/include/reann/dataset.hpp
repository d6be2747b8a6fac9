#pragma once

// Benchmark data handling: schema-driven loading, positional splits,
// normalization to the unit interval and class-boundary discretization.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "reann/common.hpp"

namespace reann {

enum class AttributeKind { continuous, ordinal, categorical };

/// How rule thresholds are printed: in the file's units or on the [0,1] scale.
enum class DisplayMode { raw, normalized };

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::continuous;
  std::vector<std::string> values;  // categorical domain, in code order
  double scale = 0.0;               // > 0: normalize by division instead of min-max
  DisplayMode display = DisplayMode::raw;
  int precision = 2;

  bool operator==(const Attribute&) const = default;
};

struct ClassInfo {
  std::string name;
  std::string label;  // token used in the data file

  bool operator==(const ClassInfo&) const = default;
};

struct DatasetSchema {
  std::string name;
  std::string file;
  std::string delimiter = ",";  // "whitespace" splits on any run of blanks
  std::vector<std::size_t> skip_columns;
  std::string missing_marker = "?";
  std::size_t header_lines = 0;
  std::size_t train_count = 0;
  std::string note;
  std::vector<Attribute> attributes;
  std::vector<ClassInfo> classes;
  std::filesystem::path base_dir;

  std::size_t attribute_count() const { return attributes.size(); }
  std::size_t class_count() const { return classes.size(); }

  void validate() const {
    if (attributes.empty()) throw SchemaError("schema '" + name + "' declares no attributes");
    if (classes.empty()) throw SchemaError("schema '" + name + "' declares no classes");
    std::set<std::string> seen;
    for (const auto& a : attributes) {
      if (!seen.insert(a.name).second)
        throw SchemaError("duplicate attribute name '" + a.name + "'");
      if (a.kind == AttributeKind::categorical && a.values.empty())
        throw SchemaError("categorical attribute '" + a.name + "' has no values");
    }
    std::set<std::string> names, labels;
    for (const auto& c : classes) {
      if (!names.insert(c.name).second) throw SchemaError("duplicate class name '" + c.name + "'");
      if (!labels.insert(c.label).second) throw SchemaError("duplicate class label '" + c.label + "'");
    }
  }
};

inline AttributeKind parse_attribute_kind(const std::string& s) {
  if (s == "continuous") return AttributeKind::continuous;
  if (s == "ordinal") return AttributeKind::ordinal;
  if (s == "categorical") return AttributeKind::categorical;
  throw SchemaError("unknown attribute kind '" + s + "'");
}

inline std::string to_string(AttributeKind k) {
  switch (k) {
    case AttributeKind::continuous: return "continuous";
    case AttributeKind::ordinal: return "ordinal";
    case AttributeKind::categorical: return "categorical";
  }
  return "continuous";
}

inline DatasetSchema schema_from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir = {}) {
  if (j.value("format", std::string{}) != "reann-schema/1")
    throw FormatError("schema: expected format tag reann-schema/1");
  DatasetSchema s;
  s.name = j.at("name").get<std::string>();
  s.file = j.value("file", std::string{});
  s.delimiter = j.value("delimiter", std::string{","});
  s.skip_columns = j.value("skip_columns", std::vector<std::size_t>{});
  s.missing_marker = j.value("missing_marker", std::string{"?"});
  s.header_lines = j.value("header_lines", std::size_t{0});
  s.train_count = j.value("train_count", std::size_t{0});
  s.note = j.value("note", std::string{});
  s.base_dir = base_dir;
  for (const auto& ja : j.at("attributes")) {
    Attribute a;
    a.name = ja.at("name").get<std::string>();
    a.kind = parse_attribute_kind(ja.value("kind", std::string{"continuous"}));
    a.values = ja.value("values", std::vector<std::string>{});
    a.scale = ja.value("scale", 0.0);
    a.display = ja.value("display", std::string{"raw"}) == "normalized" ? DisplayMode::normalized
                                                                        : DisplayMode::raw;
    a.precision = ja.value("precision", 2);
    s.attributes.push_back(std::move(a));
  }
  for (const auto& jc : j.at("classes")) {
    ClassInfo c;
    c.name = jc.at("name").get<std::string>();
    c.label = jc.value("label", c.name);
    s.classes.push_back(std::move(c));
  }
  s.validate();
  return s;
}

inline DatasetSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open schema " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("schema " + path.string() + ": " + e.what());
  }
  return schema_from_json(j, path.parent_path());
}

struct Pattern {
  std::vector<double> raw;         // categorical attributes hold the category code
  std::vector<double> normalized;  // [0,1]; empty until normalized
  int class_index = 0;

  bool operator==(const Pattern&) const = default;
};

/// Affine map from raw units to [0,1].
struct AttributeTransform {
  double offset = 0.0;
  double span = 1.0;
  bool constant = false;

  double normalize(double raw) const {
    if (constant) return 0.0;
    return std::clamp((raw - offset) / span, 0.0, 1.0);
  }
  double denormalize(double value) const { return constant ? offset : offset + value * span; }

  bool operator==(const AttributeTransform&) const = default;
};

struct NormalizationMap {
  std::vector<AttributeTransform> transforms;
  bool operator==(const NormalizationMap&) const = default;
};

struct MissingCell {
  std::size_t row = 0;
  std::size_t attribute = 0;
  double imputed = 0.0;
  bool operator==(const MissingCell&) const = default;
};

struct Dataset {
  DatasetSchema schema;
  std::vector<Pattern> patterns;
  NormalizationMap normalization;
  std::vector<MissingCell> imputed;

  std::size_t size() const { return patterns.size(); }
  bool empty() const { return patterns.empty(); }
  std::size_t attribute_count() const { return schema.attribute_count(); }
  std::size_t class_count() const { return schema.class_count(); }
  bool is_normalized() const { return !normalization.transforms.empty(); }

  std::vector<int> classes() const {
    std::vector<int> out;
    out.reserve(patterns.size());
    for (const auto& p : patterns) out.push_back(p.class_index);
    return out;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_fields(const std::string& line, const std::string& delimiter) {
  std::vector<std::string> out;
  if (delimiter == "whitespace") {
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + delimiter.size();
  }
  return out;
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size() && std::isfinite(out);
}

inline double round_to(double value, int digits) {
  const double f = std::pow(10.0, digits);
  return std::round(value * f) / f;
}

}  // namespace detail

/// Reads patterns in file order. Missing cells are imputed with the rounded
/// mean of the attribute over the training prefix (schema.train_count rows);
/// categorical cells get the most frequent training category.
inline Dataset load_dataset(std::istream& in, const DatasetSchema& schema) {
  schema.validate();
  Dataset ds;
  ds.schema = schema;
  const std::size_t attrs = schema.attribute_count();
  const std::set<std::size_t> skip(schema.skip_columns.begin(), schema.skip_columns.end());

  std::map<std::string, int> class_of;
  for (std::size_t c = 0; c < schema.classes.size(); ++c)
    class_of[schema.classes[c].label] = static_cast<int>(c);

  std::vector<std::vector<bool>> missing;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no <= schema.header_lines) continue;
    if (detail::trim(line).empty()) continue;
    auto raw_fields = detail::split_fields(line, schema.delimiter);
    std::vector<std::string> fields;
    for (std::size_t i = 0; i < raw_fields.size(); ++i)
      if (!skip.count(i)) fields.push_back(raw_fields[i]);
    if (fields.size() != attrs + 1)
      throw LoadError("line " + std::to_string(line_no) + ": expected " + std::to_string(attrs + 1) +
                      " fields, found " + std::to_string(fields.size()));

    Pattern p;
    p.raw.resize(attrs);
    std::vector<bool> miss(attrs, false);
    for (std::size_t a = 0; a < attrs; ++a) {
      const auto& tok = fields[a];
      const auto& attr = schema.attributes[a];
      if (tok == schema.missing_marker) {
        miss[a] = true;
        continue;
      }
      if (attr.kind == AttributeKind::categorical) {
        const auto it = std::find(attr.values.begin(), attr.values.end(), tok);
        if (it == attr.values.end())
          throw LoadError("line " + std::to_string(line_no) + ": unknown value '" + tok +
                          "' for attribute '" + attr.name + "'");
        p.raw[a] = static_cast<double>(it - attr.values.begin());
      } else if (!detail::parse_number(tok, p.raw[a])) {
        throw LoadError("line " + std::to_string(line_no) + ": cannot parse '" + tok +
                        "' for attribute '" + attr.name + "'");
      }
    }
    const auto label = fields.back();
    const auto it = class_of.find(label);
    if (it == class_of.end())
      throw SchemaError("line " + std::to_string(line_no) + ": unknown class label '" + label + "'");
    p.class_index = it->second;
    ds.patterns.push_back(std::move(p));
    missing.push_back(std::move(miss));
  }
  if (ds.patterns.empty()) throw LoadError("no patterns");

  const std::size_t prefix =
      schema.train_count > 0 ? std::min(schema.train_count, ds.patterns.size()) : ds.patterns.size();
  for (std::size_t a = 0; a < attrs; ++a) {
    bool any = false;
    for (const auto& m : missing) any = any || m[a];
    if (!any) continue;
    const auto& attr = schema.attributes[a];
    double fill = 0.0;
    if (attr.kind == AttributeKind::categorical) {
      std::map<double, std::size_t> freq;
      for (std::size_t r = 0; r < prefix; ++r)
        if (!missing[r][a]) ++freq[ds.patterns[r].raw[a]];
      std::size_t best = 0;
      for (const auto& [v, n] : freq)
        if (n > best) best = n, fill = v;
    } else {
      CompensatedSum sum;
      std::size_t n = 0;
      for (std::size_t r = 0; r < prefix; ++r)
        if (!missing[r][a]) sum.add(ds.patterns[r].raw[a]), ++n;
      if (n == 0) throw LoadError("attribute '" + attr.name + "' has no observed training values");
      const double mean = sum.value() / static_cast<double>(n);
      fill = attr.kind == AttributeKind::ordinal ? std::round(mean) : detail::round_to(mean, attr.precision);
    }
    for (std::size_t r = 0; r < ds.patterns.size(); ++r) {
      if (!missing[r][a]) continue;
      ds.patterns[r].raw[a] = fill;
      ds.imputed.push_back({r, a, fill});
    }
  }
  std::sort(ds.imputed.begin(), ds.imputed.end(),
            [](const MissingCell& x, const MissingCell& y) {
              return std::tie(x.row, x.attribute) < std::tie(y.row, y.attribute);
            });
  return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open data file " + path.string());
  return load_dataset(in, schema);
}

/// Loads the data file named by the schema, relative to the schema's directory.
inline Dataset load_dataset(const DatasetSchema& schema) {
  return load_dataset(schema.base_dir / schema.file, schema);
}

/// Fits the per-attribute transforms on the first `fit_count` patterns.
/// Attributes with a fixed scale divide by it; categorical codes map to
/// code/(k-1); everything else is min-max over the fitted prefix.
inline NormalizationMap fit_normalization(const Dataset& ds, std::size_t fit_count) {
  require(fit_count > 0 && fit_count <= ds.size(), "fit_normalization: bad fit count");
  NormalizationMap map;
  for (std::size_t a = 0; a < ds.attribute_count(); ++a) {
    const auto& attr = ds.schema.attributes[a];
    AttributeTransform t;
    if (attr.kind == AttributeKind::categorical) {
      t.offset = 0.0;
      t.span = static_cast<double>(attr.values.size()) - 1.0;
      t.constant = attr.values.size() < 2;
    } else if (attr.scale > 0.0) {
      t.offset = 0.0;
      t.span = attr.scale;
    } else {
      double lo = ds.patterns[0].raw[a], hi = lo;
      for (std::size_t r = 0; r < fit_count; ++r) {
        lo = std::min(lo, ds.patterns[r].raw[a]);
        hi = std::max(hi, ds.patterns[r].raw[a]);
      }
      t.offset = lo;
      t.span = hi - lo;
      t.constant = !(hi > lo);
      if (t.constant) t.span = 1.0;
    }
    map.transforms.push_back(t);
  }
  return map;
}

/// Fills `normalized` from `raw` using `map`. Raw values are never modified,
/// so applying this twice gives the same result as applying it once.
inline Dataset normalize(Dataset ds, const NormalizationMap& map) {
  require(map.transforms.size() == ds.attribute_count(), "normalize: map arity mismatch");
  for (auto& p : ds.patterns) {
    p.normalized.resize(p.raw.size());
    for (std::size_t a = 0; a < p.raw.size(); ++a) p.normalized[a] = map.transforms[a].normalize(p.raw[a]);
  }
  ds.normalization = map;
  return ds;
}

inline Dataset normalize(Dataset ds) {
  const auto map = fit_normalization(ds, ds.size());
  return normalize(std::move(ds), map);
}

/// Positional split: the first `train_count` patterns train, the rest test.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, std::size_t train_count) {
  if (train_count == 0 || train_count >= ds.size()) throw ContractViolation("degenerate split");
  Dataset train, test;
  train.schema = test.schema = ds.schema;
  train.normalization = test.normalization = ds.normalization;
  train.patterns.assign(ds.patterns.begin(), ds.patterns.begin() + static_cast<std::ptrdiff_t>(train_count));
  test.patterns.assign(ds.patterns.begin() + static_cast<std::ptrdiff_t>(train_count), ds.patterns.end());
  for (const auto& m : ds.imputed) {
    if (m.row < train_count)
      train.imputed.push_back(m);
    else
      test.imputed.push_back({m.row - train_count, m.attribute, m.imputed});
  }
  return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Discretization of inputs

struct AttributeBins {
  bool categorical = false;
  std::size_t code_count = 1;
  std::vector<double> edges;  // raw units, strictly increasing
  std::vector<double> below;  // per edge: largest training value under the edge
  std::vector<double> above;  // per edge: smallest training value over the edge

  int code(double raw) const {
    if (categorical) return static_cast<int>(std::lround(raw));
    return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), raw) - edges.begin());
  }

  bool operator==(const AttributeBins&) const = default;
};

struct DiscretizedView {
  std::vector<AttributeBins> bins;
  std::vector<std::vector<int>> codes;  // per training pattern

  std::vector<int> encode(const Pattern& p) const {
    std::vector<int> out(bins.size());
    for (std::size_t a = 0; a < bins.size(); ++a) out[a] = bins[a].code(p.raw[a]);
    return out;
  }

  std::vector<std::vector<int>> encode(const Dataset& ds) const {
    std::vector<std::vector<int>> out;
    out.reserve(ds.size());
    for (const auto& p : ds.patterns) out.push_back(encode(p));
    return out;
  }

  std::vector<std::size_t> code_counts() const {
    std::vector<std::size_t> out;
    for (const auto& b : bins) out.push_back(b.code_count);
    return out;
  }

  bool operator==(const DiscretizedView&) const = default;
};

struct Binning {
  std::size_t bins_per_attribute = 4;
};

namespace detail {

inline double gini(const std::vector<double>& hist) {
  double n = 0.0, sq = 0.0;
  for (double h : hist) n += h, sq += h * h;
  return n > 0.0 ? 1.0 - sq / (n * n) : 0.0;
}

/// Weighted Gini impurity of the partition of `hists` (one per distinct
/// value) induced by cutting after each index in `cuts` (sorted).
inline double partition_impurity(const std::vector<std::vector<double>>& hists,
                                 const std::vector<std::size_t>& cuts) {
  const std::size_t classes = hists.front().size();
  double total = 0.0, weighted = 0.0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::vector<double> acc(classes, 0.0);
    double n = 0.0;
    for (std::size_t i = start; i < end; ++i)
      for (std::size_t c = 0; c < classes; ++c) acc[c] += hists[i][c], n += hists[i][c];
    weighted += n * gini(acc);
    total += n;
    start = end;
  };
  for (std::size_t c : cuts) flush(c + 1);
  flush(hists.size());
  return total > 0.0 ? weighted / total : 0.0;
}

}  // namespace detail

/// Class-boundary discretization of one attribute: candidate cuts are the
/// midpoints between adjacent distinct values whose class sets differ or are
/// mixed. When there are more candidates than `max_cuts`, cuts are picked
/// greedily by weighted Gini reduction (ties to the smaller cut).
inline AttributeBins boundary_bins(const std::vector<double>& values, const std::vector<int>& classes,
                                   std::size_t class_count, std::size_t max_cuts) {
  AttributeBins bins;
  std::map<double, std::vector<double>> by_value;
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto& h = by_value[values[i]];
    if (h.empty()) h.assign(class_count, 0.0);
    h[static_cast<std::size_t>(classes[i])] += 1.0;
  }
  std::vector<double> distinct;
  std::vector<std::vector<double>> hists;
  for (auto& [v, h] : by_value) distinct.push_back(v), hists.push_back(h);

  auto pure_class = [&](std::size_t i) -> int {
    int cls = -1;
    for (std::size_t c = 0; c < class_count; ++c) {
      if (hists[i][c] == 0.0) continue;
      if (cls >= 0) return -1;
      cls = static_cast<int>(c);
    }
    return cls;
  };

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
    const int a = pure_class(i), b = pure_class(i + 1);
    if (a < 0 || b < 0 || a != b) candidates.push_back(i);
  }

  std::vector<std::size_t> chosen;
  if (candidates.size() <= max_cuts) {
    chosen = candidates;
  } else {
    std::vector<bool> used(candidates.size(), false);
    for (std::size_t step = 0; step < max_cuts; ++step) {
      double best = 0.0;
      std::size_t best_k = candidates.size();
      for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (used[k]) continue;
        auto trial = chosen;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), candidates[k]), candidates[k]);
        const double imp = detail::partition_impurity(hists, trial);
        if (best_k == candidates.size() || imp < best) best = imp, best_k = k;
      }
      used[best_k] = true;
      chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), candidates[best_k]), candidates[best_k]);
    }
  }
  for (std::size_t i : chosen) {
    bins.edges.push_back(0.5 * (distinct[i] + distinct[i + 1]));
    bins.below.push_back(distinct[i]);
    bins.above.push_back(distinct[i + 1]);
  }
  bins.code_count = bins.edges.size() + 1;
  return bins;
}

/// Builds the discrete view of the training split. Pure function of `train`.
inline DiscretizedView discretize_inputs(const Dataset& train, const Binning& binning) {
  require(binning.bins_per_attribute >= 2, "discretize_inputs: need at least two bins");
  require(!train.empty(), "discretize_inputs: empty training set");
  DiscretizedView view;
  const auto classes = train.classes();
  for (std::size_t a = 0; a < train.attribute_count(); ++a) {
    const auto& attr = train.schema.attributes[a];
    if (attr.kind == AttributeKind::categorical) {
      AttributeBins b;
      b.categorical = true;
      b.code_count = attr.values.size();
      view.bins.push_back(std::move(b));
      continue;
    }
    std::vector<double> values;
    values.reserve(train.size());
    for (const auto& p : train.patterns) values.push_back(p.raw[a]);
    view.bins.push_back(
        boundary_bins(values, classes, train.class_count(), binning.bins_per_attribute - 1));
  }
  view.codes = view.encode(train);
  return view;
}

/// Fraction of patterns that disagree with the majority class of their
/// code-vector group.
inline double inconsistency_rate(const std::vector<std::vector<int>>& codes, const std::vector<int>& classes) {
  require(codes.size() == classes.size(), "inconsistency_rate: size mismatch");
  if (codes.empty()) return 0.0;
  std::map<std::vector<int>, std::map<int, std::size_t>> groups;
  for (std::size_t i = 0; i < codes.size(); ++i) ++groups[codes[i]][classes[i]];
  std::size_t minority = 0;
  for (const auto& [key, hist] : groups) {
    std::size_t total = 0, best = 0;
    for (const auto& [c, n] : hist) total += n, best = std::max(best, n);
    minority += total - best;
  }
  return static_cast<double>(minority) / static_cast<double>(codes.size());
}

inline double inconsistency_rate(const DiscretizedView& view, const std::vector<int>& classes) {
  return inconsistency_rate(view.codes, classes);
}

}  // namespace reann
