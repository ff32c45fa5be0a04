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

#include <array>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "codequal/error.hpp"
#include "codequal/findings.hpp"
#include "codequal/util.hpp"

namespace codequal {

/// The assembled report. All six sections exist for every valid instance;
/// emptiness is expressed through placeholder prose, never missing parts.
struct Report {
  std::string target_descriptor;
  int unit_count = 1;
  std::string executive_summary;
  std::array<DimensionScore, 4> scores{};
  std::string correctness_analysis;
  std::string style_analysis;
  std::vector<Recommendation> recommendations;
  std::string conclusion;
  std::vector<std::string> degraded_flags;
};

/// Everything synthesis hands to assembly.
struct ReportInputs {
  std::string target_descriptor;
  int unit_count = 1;
  std::string description_text;
  std::vector<Finding> findings;
  std::array<DimensionScore, 4> scores{};
  std::vector<Recommendation> recommendations;
  std::string lint_summary;
  std::string executive_summary;  // orchestrator prose; may be absent
  std::string conclusion;         // orchestrator prose; may be absent
  std::vector<std::string> degraded_flags;
};

namespace internal_report {

inline std::string findings_text(const std::vector<Finding>& findings,
                                 std::initializer_list<Dimension> dims,
                                 const std::string& empty_text) {
  std::ostringstream out;
  bool any = false;
  for (const auto& f : findings) {
    bool wanted = false;
    for (Dimension d : dims)
      if (f.dimension == d) wanted = true;
    if (!wanted) continue;
    any = true;
    out << "- **" << severity_name(f.severity) << "** (" << f.unit_path;
    if (!f.lines.empty()) {
      out << ", line" << (f.lines.size() > 1 ? "s " : " ");
      for (size_t i = 0; i < f.lines.size(); ++i) {
        if (i) out << ", ";
        out << f.lines[i];
      }
    }
    out << "): " << f.description << "\n";
  }
  if (!any) return empty_text + "\n";
  return out.str();
}

}  // namespace internal_report

/// Deterministic assembly. Orchestrator prose is used where present; the
/// fallback composes the summary from the code description and the
/// conclusion from score extremes plus the top recommendation. Degradation
/// flags are surfaced inside the conclusion.
inline Report assemble_report(const ReportInputs& inputs) {
  Report report;
  report.target_descriptor = inputs.target_descriptor;
  report.unit_count = inputs.unit_count;
  report.scores = inputs.scores;
  report.recommendations = inputs.recommendations;
  report.degraded_flags = inputs.degraded_flags;

  if (!trim(inputs.executive_summary).empty()) {
    report.executive_summary = trim(inputs.executive_summary);
  } else {
    std::ostringstream out;
    if (!trim(inputs.description_text).empty())
      out << trim(inputs.description_text) << "\n\n";
    out << "Overall scores (0-10): ";
    for (size_t i = 0; i < inputs.scores.size(); ++i) {
      if (i) out << ", ";
      out << dimension_name(inputs.scores[i].dimension) << " "
          << format1(inputs.scores[i].value);
    }
    out << ".";
    report.executive_summary = out.str();
  }

  {
    std::ostringstream out;
    out << internal_report::findings_text(
        inputs.findings, {Dimension::correctness, Dimension::security},
        "No correctness issues identified.");
    out << "\nStatic analysis: "
        << (trim(inputs.lint_summary).empty() ? "not available."
                                              : trim(inputs.lint_summary))
        << "\n";
    report.correctness_analysis = out.str();
  }

  report.style_analysis = internal_report::findings_text(
      inputs.findings, {Dimension::style, Dimension::maintainability},
      "No style issues identified.");

  {
    std::ostringstream out;
    if (!trim(inputs.conclusion).empty()) {
      out << trim(inputs.conclusion);
    } else {
      size_t best = 0, worst = 0;
      for (size_t i = 1; i < inputs.scores.size(); ++i) {
        if (inputs.scores[i].value > inputs.scores[best].value) best = i;
        if (inputs.scores[i].value < inputs.scores[worst].value) worst = i;
      }
      out << "The strongest dimension is "
          << dimension_name(inputs.scores[best].dimension) << " ("
          << format1(inputs.scores[best].value) << ") and the weakest is "
          << dimension_name(inputs.scores[worst].dimension) << " ("
          << format1(inputs.scores[worst].value) << ").";
      if (!inputs.recommendations.empty())
        out << " Top priority: " << inputs.recommendations.front().action;
    }
    if (!inputs.degraded_flags.empty()) {
      out << "\n\nNote: this report was produced in degraded mode:";
      for (const auto& flag : inputs.degraded_flags) out << "\n- " << flag;
    }
    report.conclusion = out.str();
  }
  return report;
}

namespace internal_report {

/// Level-2 headers are reserved for the six section names; embedded prose
/// must never mint additional ones.
inline std::string escape_prose(const std::string& text) {
  std::ostringstream out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) out << "\n";
    first = false;
    size_t indent = line.find_first_not_of(" \t");
    if (indent != std::string::npos && line[indent] == '#')
      line.insert(indent, "\\");
    out << line;
  }
  if (!text.empty() && text.back() == '\n') out << "\n";
  return out.str();
}

inline std::string table_cell(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '|')
      out += "\\|";
    else if (c == '\n' || c == '\r')
      out += ' ';
    else
      out += c;
  }
  return out;
}

inline std::string capitalized(const std::string& word) {
  std::string out = word;
  if (!out.empty())
    out[0] = static_cast<char>(
        std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

}  // namespace internal_report

inline const std::array<const char*, 6>& report_section_names() {
  static const std::array<const char*, 6> names = {
      "Executive Summary",          "Scores Table",
      "Correctness Analysis",       "Style Analysis",
      "Improvement Recommendations", "Conclusion"};
  return names;
}

inline std::string render_markdown(const Report& report) {
  using internal_report::capitalized;
  using internal_report::escape_prose;
  using internal_report::table_cell;

  std::ostringstream out;
  out << "# Code Quality Assessment\n\n";
  out << "Target: `" << report.target_descriptor << "` ("
      << report.unit_count << " file" << (report.unit_count == 1 ? "" : "s")
      << ")\n\n";

  out << "## Executive Summary\n\n"
      << escape_prose(trim(report.executive_summary)) << "\n\n";

  out << "## Scores Table\n\n";
  out << "| Dimension | Score (0-10) | Rationale |\n";
  out << "| --- | --- | --- |\n";
  for (const auto& s : report.scores) {
    out << "| " << capitalized(dimension_name(s.dimension)) << " | "
        << format1(s.value) << " | " << table_cell(s.rationale) << " |\n";
  }
  out << "\n";

  out << "## Correctness Analysis\n\n"
      << escape_prose(trim(report.correctness_analysis)) << "\n\n";

  out << "## Style Analysis\n\n"
      << escape_prose(trim(report.style_analysis)) << "\n\n";

  out << "## Improvement Recommendations\n\n";
  if (report.recommendations.empty()) {
    out << "No recommendations; no issues identified.\n";
  } else {
    for (const auto& r : report.recommendations) {
      out << r.rank << ". " << r.action << " *(severity: "
          << severity_name(r.severity) << "; impact: " << impact_name(r.impact)
          << "; dimension: " << dimension_name(r.dimension) << ")*\n";
    }
  }
  out << "\n";

  out << "## Conclusion\n\n" << escape_prose(trim(report.conclusion)) << "\n";
  return out.str();
}

namespace internal_html {

inline std::string escape_html(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Inline markup over already-escaped text: code spans, bold, emphasis.
inline std::string render_inline(const std::string& escaped) {
  static const std::regex kCode(R"(`([^`]+)`)");
  static const std::regex kBold(R"(\*\*([^*]+)\*\*)");
  static const std::regex kEm(R"(\*([^*]+)\*)");
  std::string out = std::regex_replace(escaped, kCode, "<code>$1</code>");
  out = std::regex_replace(out, kBold, "<strong>$1</strong>");
  out = std::regex_replace(out, kEm, "<em>$1</em>");
  // Backslash escapes from the Markdown layer are resolved last.
  std::string resolved;
  resolved.reserve(out.size());
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i] == '\\' && i + 1 < out.size() &&
        (out[i + 1] == '#' || out[i + 1] == '|' || out[i + 1] == '\\')) {
      resolved += out[i + 1];
      ++i;
    } else {
      resolved += out[i];
    }
  }
  return resolved;
}

inline std::vector<std::string> split_table_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool escaped = false;
  std::string body = trim(line);
  if (body.empty()) return cells;
  size_t begin = body.front() == '|' ? 1 : 0;
  size_t end = body.size();
  if (end > begin && body.back() == '|') --end;
  for (size_t i = begin; i < end; ++i) {
    char c = body[i];
    if (escaped) {
      if (c != '|') cur += '\\';
      cur += c;
      escaped = false;
    } else if (c == '\\') {
      escaped = true;
    } else if (c == '|') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (escaped) cur += '\\';
  cells.push_back(trim(cur));
  return cells;
}

inline bool is_separator_row(const std::string& line) {
  std::string t = trim(line);
  if (t.find('-') == std::string::npos) return false;
  for (char c : t)
    if (c != '|' && c != '-' && c != ':' && c != ' ') return false;
  return true;
}

inline const char* stylesheet() {
  return R"(body { font-family: -apple-system, "Segoe UI", Roboto, Helvetica, Arial, sans-serif; margin: 2rem auto; max-width: 52rem; padding: 0 1rem; color: #1f2328; line-height: 1.55; }
h1, h2, h3 { line-height: 1.25; }
h1 { border-bottom: 2px solid #d0d7de; padding-bottom: .3rem; }
h2 { border-bottom: 1px solid #d0d7de; padding-bottom: .25rem; margin-top: 2rem; }
table { border-collapse: collapse; width: 100%; margin: 1rem 0; }
th, td { border: 1px solid #d0d7de; padding: .4rem .6rem; text-align: left; }
th { background: #f6f8fa; }
code { background: #f6f8fa; border-radius: 4px; padding: .1rem .3rem; font-family: ui-monospace, SFMono-Regular, Menlo, Consolas, monospace; font-size: .92em; }
pre { background: #f6f8fa; border-radius: 6px; padding: .8rem 1rem; overflow-x: auto; }
pre code { background: none; padding: 0; }
pre code.language-python { color: #0a3069; }
li { margin: .25rem 0; }
)";
}

}  // namespace internal_html

/// Renders the Markdown subset produced by render_markdown into a
/// standalone HTML document: headers, pipe tables, lists, fenced code
/// blocks (annotated with a language class), inline emphasis. Everything
/// else is passed through entity-escaped. No scripts, embedded CSS only.
inline std::string render_html(const std::string& markdown) {
  using namespace internal_html;

  std::ostringstream body;
  std::vector<std::string> lines;
  {
    std::istringstream in(markdown);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }

  enum class Block { none, paragraph, ulist, olist };
  Block open = Block::none;
  auto close_block = [&] {
    switch (open) {
      case Block::paragraph: body << "</p>\n"; break;
      case Block::ulist: body << "</ul>\n"; break;
      case Block::olist: body << "</ol>\n"; break;
      case Block::none: break;
    }
    open = Block::none;
  };

  static const std::regex kHeader(R"(^(#{1,4})\s+(.*)$)");
  static const std::regex kUItem(R"(^\s*[-*]\s+(.*)$)");
  static const std::regex kOItem(R"(^\s*\d+[.)]\s+(.*)$)");
  static const std::regex kFence(R"(^```\s*([A-Za-z0-9_+-]*)\s*$)");

  size_t i = 0;
  while (i < lines.size()) {
    const std::string& line = lines[i];
    std::smatch m;

    if (std::regex_match(line, m, kFence)) {
      close_block();
      std::string lang = m[1].str();
      body << "<pre><code";
      if (!lang.empty()) body << " class=\"language-" << lang << "\"";
      body << ">";
      ++i;
      while (i < lines.size() && !std::regex_match(lines[i], kFence)) {
        body << escape_html(lines[i]) << "\n";
        ++i;
      }
      if (i < lines.size()) ++i;  // closing fence
      body << "</code></pre>\n";
      continue;
    }

    if (std::regex_match(line, m, kHeader)) {
      close_block();
      size_t level = m[1].str().size();
      body << "<h" << level << ">" << render_inline(escape_html(m[2].str()))
           << "</h" << level << ">\n";
      ++i;
      continue;
    }

    if (!trim(line).empty() && trim(line).front() == '|' &&
        i + 1 < lines.size() && is_separator_row(lines[i + 1])) {
      close_block();
      body << "<table>\n<thead>\n<tr>";
      for (const auto& cell : split_table_row(line))
        body << "<th>" << render_inline(escape_html(cell)) << "</th>";
      body << "</tr>\n</thead>\n<tbody>\n";
      i += 2;
      while (i < lines.size() && !trim(lines[i]).empty() &&
             trim(lines[i]).front() == '|') {
        body << "<tr>";
        for (const auto& cell : split_table_row(lines[i]))
          body << "<td>" << render_inline(escape_html(cell)) << "</td>";
        body << "</tr>\n";
        ++i;
      }
      body << "</tbody>\n</table>\n";
      continue;
    }

    if (std::regex_match(line, m, kUItem)) {
      if (open != Block::ulist) {
        close_block();
        body << "<ul>\n";
        open = Block::ulist;
      }
      body << "<li>" << render_inline(escape_html(m[1].str())) << "</li>\n";
      ++i;
      continue;
    }

    if (std::regex_match(line, m, kOItem)) {
      if (open != Block::olist) {
        close_block();
        body << "<ol>\n";
        open = Block::olist;
      }
      body << "<li>" << render_inline(escape_html(m[1].str())) << "</li>\n";
      ++i;
      continue;
    }

    if (trim(line).empty()) {
      close_block();
      ++i;
      continue;
    }

    if (open != Block::paragraph) {
      close_block();
      body << "<p>";
      open = Block::paragraph;
    } else {
      body << "\n";
    }
    body << render_inline(escape_html(line));
    ++i;
  }
  close_block();

  std::ostringstream doc;
  doc << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n"
      << "<meta charset=\"utf-8\">\n"
      << "<meta name=\"viewport\" content=\"width=device-width, "
         "initial-scale=1\">\n"
      << "<title>Code Quality Assessment</title>\n"
      << "<style>\n"
      << internal_html::stylesheet() << "</style>\n</head>\n<body>\n"
      << body.str() << "</body>\n</html>\n";
  return doc.str();
}

/// Writes through a sibling temp file plus rename so failures never leave
/// a half-written artifact at the destination.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  namespace fs = std::filesystem;
  fs::path dir = path.parent_path();
  if (!dir.empty()) {
    std::error_code ec;
    fs::create_directories(dir, ec);
  }
  fs::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out)
      throw permanent_error("cannot open for writing: " + temp.string());
    out << content;
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(temp, ec);
      throw permanent_error("write failed: " + temp.string());
    }
  }
  std::error_code ec;
  fs::rename(temp, path, ec);
  if (ec) {
    fs::remove(temp, ec);
    throw permanent_error("cannot move report into place: " + path.string());
  }
}

}  // namespace codequal
