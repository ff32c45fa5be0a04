// Copyright 2026 The codequal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "codequal/error.hpp"
#include "codequal/util.hpp"

namespace codequal {

enum class Severity { info = 0, minor = 1, major = 2, critical = 3 };
enum class Impact { low = 0, medium = 1, high = 2 };
enum class Dimension { correctness = 0, security, style, maintainability };

inline const char* severity_name(Severity s) {
  switch (s) {
    case Severity::critical: return "critical";
    case Severity::major: return "major";
    case Severity::minor: return "minor";
    case Severity::info: return "info";
  }
  return "info";
}

inline const char* impact_name(Impact i) {
  switch (i) {
    case Impact::high: return "high";
    case Impact::medium: return "medium";
    case Impact::low: return "low";
  }
  return "medium";
}

inline const char* dimension_name(Dimension d) {
  switch (d) {
    case Dimension::correctness: return "correctness";
    case Dimension::security: return "security";
    case Dimension::style: return "style";
    case Dimension::maintainability: return "maintainability";
  }
  return "correctness";
}

/// Priority used as the final ranking tiebreak; lower sorts first.
inline int dimension_priority(Dimension d) {
  switch (d) {
    case Dimension::correctness: return 0;
    case Dimension::security: return 1;
    case Dimension::style: return 2;
    case Dimension::maintainability: return 3;
  }
  return 3;
}

inline std::optional<Severity> severity_from_word(const std::string& word) {
  std::string w = to_lower(word);
  if (w == "critical") return Severity::critical;
  if (w == "major") return Severity::major;
  if (w == "minor") return Severity::minor;
  if (w == "info") return Severity::info;
  return std::nullopt;
}

inline std::optional<Impact> impact_from_word(const std::string& word) {
  std::string w = to_lower(word);
  if (w == "high") return Impact::high;
  if (w == "medium") return Impact::medium;
  if (w == "low") return Impact::low;
  return std::nullopt;
}

inline std::optional<Dimension> dimension_from_word(const std::string& word) {
  std::string w = to_lower(word);
  if (w == "correctness") return Dimension::correctness;
  if (w == "security") return Dimension::security;
  if (w == "style") return Dimension::style;
  if (w == "maintainability") return Dimension::maintainability;
  return std::nullopt;
}

/// One evidence-backed issue attributed to a unit of code.
struct Finding {
  Dimension dimension = Dimension::correctness;
  Severity severity = Severity::info;
  std::string unit_path;
  std::vector<int> lines;            // sorted ascending, unique
  std::vector<std::string> lint_codes;
  std::string description;
  std::string source_agent;
};

/// Splits a section body into list items. An item starts with "- ", "* ",
/// or "N." / "N)"; later non-blank, non-item lines continue the previous
/// item. "(none)" alone yields no items.
inline std::vector<std::string> split_list_items(const std::string& body) {
  static const std::regex kItemStart(R"(^\s*(?:[-*]\s+|\d+[.)]\s+)(.*)$)");
  std::vector<std::string> items;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::smatch m;
    if (std::regex_match(line, m, kItemStart)) {
      items.push_back(trim(m[1].str()));
    } else if (!items.empty() && !trim(line).empty()) {
      items.back() += " " + trim(line);
    }
  }
  items.erase(std::remove_if(items.begin(), items.end(),
                             [](const std::string& s) {
                               std::string t = to_lower(trim(s));
                               return t.empty() || t == "none" ||
                                      t == "(none)" || t == "n/a";
                             }),
              items.end());
  return items;
}

/// Pulls "line N" / "lines N-M" references out of free text. Ranges are
/// expanded; the result is sorted and deduplicated.
inline std::vector<int> extract_line_refs(const std::string& text) {
  // The en dash alternative is spliced in as a raw UTF-8 literal.
  static const std::regex kLineRefReal(
      std::string(R"([Ll]ines?\s*[:#]?\s*(\d{1,6})(?:\s*(?:-|)") +
          "–" + R"(|to)\s*(\d{1,6}))?)",
      std::regex::ECMAScript);
  std::set<int> out;
  auto begin = std::sregex_iterator(text.begin(), text.end(), kLineRefReal);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    int lo = std::stoi((*it)[1].str());
    int hi = (*it)[2].matched ? std::stoi((*it)[2].str()) : lo;
    if (hi < lo) std::swap(lo, hi);
    hi = std::min(hi, lo + 10000);
    for (int n = lo; n <= hi; ++n) out.insert(n);
  }
  return {out.begin(), out.end()};
}

/// Pulls linter rule codes (one category letter, four digits) out of text.
inline std::vector<std::string> extract_lint_codes(const std::string& text) {
  static const std::regex kCode(R"(\b([CRWEFI][0-9]{4})\b)");
  std::vector<std::string> out;
  auto begin = std::sregex_iterator(text.begin(), text.end(), kCode);
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    std::string code = (*it)[1].str();
    if (std::find(out.begin(), out.end(), code) == out.end())
      out.push_back(code);
  }
  return out;
}

inline Severity extract_severity(const std::string& text, Severity fallback) {
  for (const auto& tok : normalize_tokens(text))
    if (auto s = severity_from_word(tok)) return *s;
  return fallback;
}

/// Parses the items under a "## Findings" body into findings attributed to
/// unit_path. Severity, line references, and lint codes are best-effort
/// token extraction; absent severity defaults to info.
inline std::vector<Finding> parse_findings(const std::string& body,
                                           const std::string& unit_path,
                                           Dimension dimension,
                                           const std::string& source_agent) {
  std::vector<Finding> findings;
  for (const auto& item : split_list_items(body)) {
    Finding f;
    f.dimension = dimension;
    f.severity = extract_severity(item, Severity::info);
    f.unit_path = unit_path;
    f.lines = extract_line_refs(item);
    f.lint_codes = extract_lint_codes(item);
    f.description = item;
    f.source_agent = source_agent;
    findings.push_back(std::move(f));
  }
  return findings;
}

struct ParsedScore {
  double value = 5.0;
  bool clamped = false;
  bool defaulted = false;
  std::string note;
};

/// First numeric token in a score body, clamped to [0,10]. Accepts bare
/// numbers and the "N/10" / "N out of 10" shapes (the leading numeral wins
/// either way). No numeric token at all falls back to the midpoint 5.0.
inline ParsedScore parse_score(const std::string& body) {
  static const std::regex kNumber(R"(-?\d+(\.\d+)?)");
  ParsedScore result;
  std::smatch m;
  if (!std::regex_search(body, m, kNumber)) {
    result.defaulted = true;
    result.note = "no numeric score found; defaulted to 5.0";
    return result;
  }
  double v = std::stod(m[0].str());
  if (v < 0.0 || v > 10.0) {
    result.clamped = true;
    std::ostringstream note;
    note << "reported score " << m[0].str() << " clamped into [0,10]";
    result.note = note.str();
    v = std::min(10.0, std::max(0.0, v));
  }
  result.value = v;
  return result;
}

/// The style assessor reports two labeled ratings in one score body:
/// "style: N" and "maintainability: N". Unlabeled bodies fall back to
/// first-numeric = style, second = maintainability.
inline std::pair<ParsedScore, ParsedScore> parse_style_scores(
    const std::string& body) {
  static const std::regex kLabeled(
      R"(^\s*[-*]?\s*(style|maintainability)\s*[:=]\s*(.*)$)",
      std::regex::icase);
  std::optional<ParsedScore> style, maint;
  std::istringstream in(body);
  std::string line;
  while (std::getline(in, line)) {
    std::smatch m;
    if (!std::regex_match(line, m, kLabeled)) continue;
    std::string label = to_lower(m[1].str());
    ParsedScore s = parse_score(m[2].str());
    if (s.defaulted) continue;
    if (label == "style" && !style) style = s;
    if (label == "maintainability" && !maint) maint = s;
  }
  if (!style || !maint) {
    static const std::regex kNumber(R"(-?\d+(\.\d+)?)");
    std::vector<std::string> numbers;
    auto begin = std::sregex_iterator(body.begin(), body.end(), kNumber);
    for (auto it = begin; it != std::sregex_iterator(); ++it)
      numbers.push_back((*it)[0].str());
    if (!style && !numbers.empty()) style = parse_score(numbers[0]);
    if (!maint && numbers.size() >= 2) maint = parse_score(numbers[1]);
  }
  ParsedScore fallback;
  fallback.defaulted = true;
  fallback.note = "no numeric score found; defaulted to 5.0";
  return {style.value_or(fallback), maint.value_or(fallback)};
}

/// Jaccard similarity of two token sets; two empty sets count as identical.
inline double jaccard(const std::set<std::string>& a,
                      const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  size_t inter = 0;
  for (const auto& t : a)
    if (b.count(t)) ++inter;
  size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

inline bool lines_overlap(const std::vector<int>& a,
                          const std::vector<int>& b) {
  if (a.empty() && b.empty()) return true;
  if (a.empty() || b.empty()) return false;
  std::set<int> sa(a.begin(), a.end());
  for (int n : b)
    if (sa.count(n)) return true;
  return false;
}

constexpr double kDedupJaccardThreshold = 0.8;

namespace internal_findings {

inline std::vector<Finding> dedup_pass(const std::vector<Finding>& findings) {
  std::vector<Finding> out;
  std::vector<std::set<std::string>> out_tokens;
  for (const auto& f : findings) {
    std::set<std::string> f_tokens = token_set(f.description);
    bool merged = false;
    for (size_t i = 0; i < out.size(); ++i) {
      Finding& g = out[i];
      if (g.unit_path != f.unit_path) continue;
      if (!lines_overlap(g.lines, f.lines)) continue;
      if (jaccard(out_tokens[i], f_tokens) < kDedupJaccardThreshold)
        continue;
      if (static_cast<int>(f.severity) > static_cast<int>(g.severity)) {
        g.severity = f.severity;
        g.description = f.description;
        g.dimension = f.dimension;
        g.source_agent = f.source_agent;
        out_tokens[i] = f_tokens;
      }
      std::set<int> lines(g.lines.begin(), g.lines.end());
      lines.insert(f.lines.begin(), f.lines.end());
      g.lines.assign(lines.begin(), lines.end());
      for (const auto& code : f.lint_codes)
        if (std::find(g.lint_codes.begin(), g.lint_codes.end(), code) ==
            g.lint_codes.end())
          g.lint_codes.push_back(code);
      merged = true;
      break;
    }
    if (!merged) {
      out.push_back(f);
      out_tokens.push_back(std::move(f_tokens));
    }
  }
  return out;
}

}  // namespace internal_findings

/// Collapses findings that describe the same issue: same unit, overlapping
/// (or both absent) line references, and near-identical wording. Each group
/// keeps its highest-severity member's wording, merges lint codes and line
/// references, and stays at the group's first occurrence. Merging widens
/// line sets, which can expose new overlaps, so the pass repeats until a
/// fixed point: applying this function to its own output changes nothing.
inline std::vector<Finding> deduplicate_findings(
    const std::vector<Finding>& findings) {
  std::vector<Finding> out = internal_findings::dedup_pass(findings);
  for (;;) {
    std::vector<Finding> next = internal_findings::dedup_pass(out);
    if (next.size() == out.size()) return out;
    out = std::move(next);
  }
}

/// Configurable markers that flag a finding as security-relevant.
struct SecurityRules {
  std::vector<std::string> keywords{
      "injection",  "secret",     "password", "credential",
      "deserial",   "pickle",     "eval(",    "exec(",
      "shell=true", "os.system",  "hardcoded", "hard-coded"};
  std::set<std::string> codes{"W0122", "W0123", "W1509", "W1510"};
};

inline bool is_security_finding(const Finding& f, const SecurityRules& rules) {
  std::string text = to_lower(f.description);
  for (const auto& kw : rules.keywords)
    if (text.find(kw) != std::string::npos) return true;
  for (const auto& code : f.lint_codes)
    if (rules.codes.count(code)) return true;
  return false;
}

/// Retags correctness findings that hit the security rules.
inline void apply_security_tagging(std::vector<Finding>& findings,
                                   const SecurityRules& rules) {
  for (auto& f : findings)
    if (f.dimension == Dimension::correctness && is_security_finding(f, rules))
      f.dimension = Dimension::security;
}

struct DimensionScore {
  Dimension dimension = Dimension::correctness;
  double value = 0.0;
  std::string rationale;
};

/// Transparent penalty count over security-tagged findings: start at 10,
/// subtract 3 per critical, 2 per major, 1 per minor, floor at 0.
inline DimensionScore derive_security_score(
    const std::vector<Finding>& findings) {
  DimensionScore score;
  score.dimension = Dimension::security;
  double value = 10.0;
  std::vector<std::string> tags;
  for (const auto& f : findings) {
    if (f.dimension != Dimension::security) continue;
    switch (f.severity) {
      case Severity::critical: value -= 3.0; break;
      case Severity::major: value -= 2.0; break;
      case Severity::minor: value -= 1.0; break;
      case Severity::info: break;
    }
    tags.push_back(clip_utf8(f.description, 60) + " (" +
                   severity_name(f.severity) + ")");
  }
  score.value = std::max(0.0, value);
  if (tags.empty()) {
    score.rationale = "no heuristic indicators";
  } else {
    std::ostringstream r;
    r << tags.size() << " heuristic indicator(s): ";
    for (size_t i = 0; i < tags.size(); ++i) {
      if (i) r << "; ";
      r << tags[i];
    }
    score.rationale = r.str();
  }
  return score;
}

/// One concrete improvement action, ranked for the report.
struct Recommendation {
  int rank = 0;
  Severity severity = Severity::info;
  Impact impact = Impact::medium;
  Dimension dimension = Dimension::correctness;
  std::string action;
  std::vector<std::string> related_findings;
};

/// Sorts drafts by severity, then impact, then dimension priority, keeping
/// input order among equals; caps the list at ten and renumbers 1..n.
inline std::vector<Recommendation> rank_recommendations(
    std::vector<Recommendation> drafts) {
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Recommendation& a, const Recommendation& b) {
                     if (a.severity != b.severity)
                       return static_cast<int>(a.severity) >
                              static_cast<int>(b.severity);
                     if (a.impact != b.impact)
                       return static_cast<int>(a.impact) >
                              static_cast<int>(b.impact);
                     return dimension_priority(a.dimension) <
                            dimension_priority(b.dimension);
                   });
  if (drafts.size() > 10) drafts.resize(10);
  for (size_t i = 0; i < drafts.size(); ++i)
    drafts[i].rank = static_cast<int>(i) + 1;
  return drafts;
}

/// Parses recommender output items. The trailing annotation
/// "(severity: S; impact: I; dimension: D)" is the instructed shape; free
/// text falls back to token scanning with documented defaults.
inline std::vector<Recommendation> parse_recommendations(
    const std::string& body) {
  static const std::regex kAnnotation(
      R"(\s*\(\s*severity\s*:\s*(\w+)\s*;\s*impact\s*:\s*(\w+)\s*;\s*dimension\s*:\s*(\w+)\s*\)\s*$)",
      std::regex::icase);
  std::vector<Recommendation> drafts;
  for (const auto& item : split_list_items(body)) {
    Recommendation r;
    std::smatch m;
    std::string action = item;
    if (std::regex_search(item, m, kAnnotation)) {
      r.severity = severity_from_word(m[1].str()).value_or(Severity::info);
      r.impact = impact_from_word(m[2].str()).value_or(Impact::medium);
      r.dimension =
          dimension_from_word(m[3].str()).value_or(Dimension::correctness);
      action = trim(item.substr(0, item.size() - m[0].length()));
    } else {
      r.severity = extract_severity(item, Severity::info);
      for (const auto& tok : normalize_tokens(item)) {
        if (auto imp = impact_from_word(tok)) {
          r.impact = *imp;
          break;
        }
      }
      for (const auto& tok : normalize_tokens(item)) {
        if (auto dim = dimension_from_word(tok)) {
          r.dimension = *dim;
          break;
        }
      }
    }
    r.action = action.empty() ? item : action;
    for (const auto& code : extract_lint_codes(item))
      r.related_findings.push_back(code);
    for (int line : extract_line_refs(item))
      r.related_findings.push_back("line " + std::to_string(line));
    drafts.push_back(std::move(r));
  }
  return drafts;
}

/// Fallback plan when the recommender agent is unavailable: the highest
/// severity findings become actions directly.
inline std::vector<Recommendation> heuristic_recommendations(
    std::vector<Finding> findings) {
  std::stable_sort(findings.begin(), findings.end(),
                   [](const Finding& a, const Finding& b) {
                     return static_cast<int>(a.severity) >
                            static_cast<int>(b.severity);
                   });
  std::vector<Recommendation> drafts;
  for (const auto& f : findings) {
    Recommendation r;
    r.severity = f.severity;
    r.impact = f.severity >= Severity::major
                   ? Impact::high
                   : (f.severity == Severity::minor ? Impact::medium
                                                    : Impact::low);
    r.dimension = f.dimension;
    r.action = "Address in " + f.unit_path + ": " + f.description;
    for (const auto& code : f.lint_codes) r.related_findings.push_back(code);
    drafts.push_back(std::move(r));
  }
  return rank_recommendations(std::move(drafts));
}

/// Per-dimension weighted mean across files, weight = line count, rounded
/// to one decimal and kept inside the per-file min/max envelope. A zero
/// total weight degrades to the unweighted mean.
struct UnitScoreRow {
  std::string path;
  int line_count = 0;
  std::array<double, 4> values{};  // dimension order: correctness, security,
                                   // style, maintainability
};

inline std::array<DimensionScore, 4> aggregate_file_scores(
    const std::vector<UnitScoreRow>& rows) {
  if (rows.empty())
    throw permanent_error("cannot aggregate scores over zero files");
  std::array<DimensionScore, 4> out;
  for (int d = 0; d < 4; ++d) {
    long double weighted = 0.0L;
    long double weight_total = 0.0L;
    long double plain = 0.0L;
    size_t best = 0, worst = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
      weighted += static_cast<long double>(rows[i].values[d]) *
                  rows[i].line_count;
      weight_total += rows[i].line_count;
      plain += rows[i].values[d];
      if (rows[i].values[d] > rows[best].values[d]) best = i;
      if (rows[i].values[d] < rows[worst].values[d]) worst = i;
    }
    long double mean = weight_total > 0.0L
                           ? weighted / weight_total
                           : plain / static_cast<long double>(rows.size());
    double value = round1(static_cast<double>(mean));
    value = std::min(rows[best].values[d],
                     std::max(rows[worst].values[d], value));
    DimensionScore score;
    score.dimension = static_cast<Dimension>(d);
    score.value = value;
    if (rows.size() == 1) {
      score.rationale = "single file " + rows[0].path;
    } else {
      std::ostringstream r;
      r << "weighted mean over " << rows.size() << " files; best "
        << rows[best].path << " (" << format1(rows[best].values[d])
        << "), worst " << rows[worst].path << " ("
        << format1(rows[worst].values[d]) << ")";
      score.rationale = r.str();
    }
    out[d] = std::move(score);
  }
  return out;
}

}  // namespace codequal
