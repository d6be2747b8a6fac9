#pragma once

// Human-readable rule text: "Rule k: If <cond> and <cond> then <class>".
// Range conditions print the largest training value below each cut, in the
// attribute's display units, so a cut between 1.9 and 3.0 reads "<= 1.9".

#include <cstdio>
#include <string>
#include <vector>

#include "reann/dataset.hpp"
#include "reann/rex.hpp"

namespace reann {

inline std::string format_number(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision < 0 ? 0 : precision, v);
  std::string s = buf;
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    bool zero = s.find_first_not_of("-0.") == std::string::npos;
    if (zero) s.erase(0, 1);
  }
  return s;
}

/// Everything needed to turn code ranges back into attribute wording.
struct RuleVocabulary {
  std::vector<Attribute> attributes;
  std::vector<std::string> class_names;
  std::vector<AttributeBins> bins;
  std::vector<AttributeTransform> transforms;  // may be empty: raw display only

  static RuleVocabulary of(const DatasetSchema& schema, const DiscretizedView& view,
                           const NormalizationMap& norm) {
    RuleVocabulary v;
    v.attributes = schema.attributes;
    for (const auto& c : schema.classes) v.class_names.push_back(c.name);
    v.bins = view.bins;
    v.transforms = norm.transforms;
    return v;
  }

  std::string cut(std::size_t attribute, int edge) const {
    const auto& a = attributes.at(attribute);
    double v = bins.at(attribute).below.at(static_cast<std::size_t>(edge));
    if (a.display == DisplayMode::normalized && attribute < transforms.size()) v = transforms[attribute].normalize(v);
    return format_number(v, a.precision);
  }

  std::string class_name(int c) const {
    return c >= 0 && static_cast<std::size_t>(c) < class_names.size() ? class_names[static_cast<std::size_t>(c)]
                                                                       : "class " + std::to_string(c);
  }
};

inline std::string render_condition(const Condition& c, const RuleVocabulary& v) {
  const auto& a = v.attributes.at(c.attribute);
  const std::string label = a.name + " (A" + std::to_string(c.attribute + 1) + ")";
  if (a.kind == AttributeKind::categorical || v.bins.at(c.attribute).categorical) {
    std::string out = label + " = " + a.values.at(static_cast<std::size_t>(c.lo));
    for (int k = c.lo + 1; k <= c.hi; ++k) out += " or " + a.values.at(static_cast<std::size_t>(k));
    return out;
  }
  const int last = static_cast<int>(v.bins.at(c.attribute).code_count) - 1;
  if (c.lo == 0 && c.hi < last) return label + " <= " + v.cut(c.attribute, c.hi);
  if (c.lo > 0 && c.hi == last) return label + " > " + v.cut(c.attribute, c.lo - 1);
  if (c.lo > 0 && c.hi < last) return v.cut(c.attribute, c.lo - 1) + " < " + label + " <= " + v.cut(c.attribute, c.hi);
  return label + " any";
}

inline std::vector<std::string> render_rules(const RuleSet& rs, const RuleVocabulary& v) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < rs.rules.size(); ++i) {
    const auto& r = rs.rules[i];
    std::string line = "Rule " + std::to_string(i + 1) + ": If ";
    if (r.conditions.empty()) line += "true";
    for (std::size_t k = 0; k < r.conditions.size(); ++k) {
      if (k) line += " and ";
      line += render_condition(r.conditions[k], v);
    }
    line += " then " + v.class_name(r.class_index);
    lines.push_back(std::move(line));
  }
  if (rs.has_default()) lines.push_back("Default Rule: " + v.class_name(rs.default_class));
  return lines;
}

}  // namespace reann
