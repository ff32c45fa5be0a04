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

#include "codequal/report.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "testutil.hpp"

namespace codequal {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

std::array<DimensionScore, 4> sample_scores() {
  std::array<DimensionScore, 4> scores;
  const double values[4] = {6.0, 7.0, 7.0, 6.0};
  const char* rationales[4] = {
      "model-assessed", "1 heuristic indicator(s): x (critical)",
      "model-assessed", "model-assessed"};
  for (int d = 0; d < 4; ++d) {
    scores[d].dimension = static_cast<Dimension>(d);
    scores[d].value = values[d];
    scores[d].rationale = rationales[d];
  }
  return scores;
}

Recommendation sample_rec() {
  Recommendation r;
  r.rank = 1;
  r.severity = Severity::major;
  r.impact = Impact::high;
  r.dimension = Dimension::correctness;
  r.action = "Validate the divisor";
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

TEST(AssembleReport, OrchestratorProseWinsWhenPresent) {
  ReportInputs inputs;
  inputs.target_descriptor = "small.py";
  inputs.scores = sample_scores();
  inputs.executive_summary = "  The code is sound.  \n";
  inputs.conclusion = "\nShip it.\n";
  Report report = assemble_report(inputs);
  EXPECT_EQ(report.executive_summary, "The code is sound.");
  EXPECT_EQ(report.conclusion, "Ship it.");
}

TEST(AssembleReport, FallbackSummaryListsScores) {
  ReportInputs inputs;
  inputs.target_descriptor = "small.py";
  inputs.scores = sample_scores();
  inputs.description_text = "A divide utility.";
  Report report = assemble_report(inputs);
  EXPECT_EQ(report.executive_summary,
            "A divide utility.\n\nOverall scores (0-10): correctness 6.0, "
            "security 7.0, style 7.0, maintainability 6.0.");
}

TEST(AssembleReport, FallbackConclusionNamesExtremesAndTopPriority) {
  ReportInputs inputs;
  inputs.target_descriptor = "small.py";
  inputs.scores = sample_scores();
  inputs.recommendations = {sample_rec()};
  Report report = assemble_report(inputs);
  // First strict maximum is security (7.0); first strict minimum stays at
  // correctness (6.0).
  EXPECT_EQ(report.conclusion,
            "The strongest dimension is security (7.0) and the weakest is "
            "correctness (6.0). Top priority: Validate the divisor");
}

TEST(AssembleReport, DegradedFlagsAppendToConclusion) {
  ReportInputs inputs;
  inputs.target_descriptor = "small.py";
  inputs.scores = sample_scores();
  inputs.conclusion = "Fine overall.";
  inputs.degraded_flags = {"static analysis unavailable: no linter",
                           "agent improvement_recommender failed"};
  Report report = assemble_report(inputs);
  EXPECT_EQ(report.conclusion,
            "Fine overall.\n\nNote: this report was produced in degraded "
            "mode:\n- static analysis unavailable: no linter\n- agent "
            "improvement_recommender failed");
  EXPECT_EQ(report.degraded_flags.size(), 2u);
}

TEST(AssembleReport, CorrectnessAnalysisListsFindingsAndLintSummary) {
  Finding f;
  f.dimension = Dimension::correctness;
  f.severity = Severity::major;
  f.unit_path = "small.py";
  f.lines = {7, 8};
  f.description = "divide crash";
  Finding s;
  s.dimension = Dimension::style;
  s.severity = Severity::minor;
  s.unit_path = "small.py";
  s.lines = {7};
  s.description = "missing docstring";

  ReportInputs inputs;
  inputs.target_descriptor = "small.py";
  inputs.scores = sample_scores();
  inputs.findings = {f, s};
  inputs.lint_summary = "pylint reported 3 issue(s) across 1 file(s).";
  Report report = assemble_report(inputs);
  EXPECT_EQ(report.correctness_analysis,
            "- **major** (small.py, lines 7, 8): divide crash\n\nStatic "
            "analysis: pylint reported 3 issue(s) across 1 file(s).\n");
  EXPECT_EQ(report.style_analysis,
            "- **minor** (small.py, line 7): missing docstring\n");
}

TEST(AssembleReport, EmptyFindingsUsePlaceholdersAndLintFallback) {
  ReportInputs inputs;
  inputs.target_descriptor = "small.py";
  inputs.scores = sample_scores();
  Report report = assemble_report(inputs);
  EXPECT_EQ(report.correctness_analysis,
            "No correctness issues identified.\n\nStatic analysis: not "
            "available.\n");
  EXPECT_EQ(report.style_analysis, "No style issues identified.\n");
}

TEST(RenderMarkdown, GoldenSingleFileReport) {
  Report report;
  report.target_descriptor = "small.py";
  report.unit_count = 1;
  report.executive_summary = "All good.";
  report.scores = sample_scores();
  report.correctness_analysis =
      "- **major** (small.py, lines 7, 8): divide crash\n\nStatic analysis: "
      "disabled for this run.\n";
  report.style_analysis = "No style issues identified.\n";
  report.recommendations = {sample_rec()};
  report.conclusion = "Fix it.";

  const std::string expected =
      "# Code Quality Assessment\n"
      "\n"
      "Target: `small.py` (1 file)\n"
      "\n"
      "## Executive Summary\n"
      "\n"
      "All good.\n"
      "\n"
      "## Scores Table\n"
      "\n"
      "| Dimension | Score (0-10) | Rationale |\n"
      "| --- | --- | --- |\n"
      "| Correctness | 6.0 | model-assessed |\n"
      "| Security | 7.0 | 1 heuristic indicator(s): x (critical) |\n"
      "| Style | 7.0 | model-assessed |\n"
      "| Maintainability | 6.0 | model-assessed |\n"
      "\n"
      "## Correctness Analysis\n"
      "\n"
      "- **major** (small.py, lines 7, 8): divide crash\n"
      "\n"
      "Static analysis: disabled for this run.\n"
      "\n"
      "## Style Analysis\n"
      "\n"
      "No style issues identified.\n"
      "\n"
      "## Improvement Recommendations\n"
      "\n"
      "1. Validate the divisor *(severity: major; impact: high; dimension: "
      "correctness)*\n"
      "\n"
      "## Conclusion\n"
      "\n"
      "Fix it.\n";
  EXPECT_EQ(render_markdown(report), expected);
}

TEST(RenderMarkdown, ExactlySixSectionHeadersInOrder) {
  Report report;
  report.target_descriptor = "x.py";
  report.unit_count = 3;
  report.executive_summary = "Summary prose.";
  report.scores = sample_scores();
  report.correctness_analysis = "None.\n";
  report.style_analysis = "None.\n";
  report.conclusion = "Done.";
  std::string markdown = render_markdown(report);

  std::vector<std::string> headers;
  for (const auto& line : lines_of(markdown))
    if (line.rfind("## ", 0) == 0) headers.push_back(line.substr(3));
  ASSERT_EQ(headers.size(), 6u);
  const auto& names = report_section_names();
  for (size_t i = 0; i < names.size(); ++i) EXPECT_EQ(headers[i], names[i]);
  EXPECT_NE(markdown.find("Target: `x.py` (3 files)"), std::string::npos);
}

TEST(RenderMarkdown, ProseCannotMintExtraSections) {
  Report report;
  report.target_descriptor = "x.py";
  report.scores = sample_scores();
  report.executive_summary =
      "Tricky prose.\n## Fake Section\n# Fake Title\n  ### Indented";
  report.correctness_analysis = "ok\n";
  report.style_analysis = "ok\n";
  report.conclusion = "## Another Fake";
  std::string markdown = render_markdown(report);

  int h2 = 0;
  for (const auto& line : lines_of(markdown))
    if (line.rfind("## ", 0) == 0) ++h2;
  EXPECT_EQ(h2, 6);
  EXPECT_NE(markdown.find("\\## Fake Section"), std::string::npos);
  EXPECT_NE(markdown.find("\\# Fake Title"), std::string::npos);
  EXPECT_NE(markdown.find("  \\### Indented"), std::string::npos);
  EXPECT_NE(markdown.find("\\## Another Fake"), std::string::npos);
}

TEST(RenderMarkdown, EmptyRecommendationsGetPlaceholder) {
  Report report;
  report.target_descriptor = "x.py";
  report.scores = sample_scores();
  report.executive_summary = "s";
  report.correctness_analysis = "c";
  report.style_analysis = "s";
  report.conclusion = "c";
  std::string markdown = render_markdown(report);
  EXPECT_NE(markdown.find("No recommendations; no issues identified.\n"),
            std::string::npos);
}

TEST(RenderMarkdown, TableCellsEscapePipesAndNewlines) {
  EXPECT_EQ(internal_report::table_cell("a | b"), "a \\| b");
  EXPECT_EQ(internal_report::table_cell("line1\nline2"), "line1 line2");

  Report report;
  report.target_descriptor = "x.py";
  report.scores = sample_scores();
  report.scores[0].rationale = "weighted | mean";
  report.executive_summary = "s";
  report.correctness_analysis = "c";
  report.style_analysis = "s";
  report.conclusion = "c";
  std::string markdown = render_markdown(report);
  EXPECT_NE(markdown.find("| Correctness | 6.0 | weighted \\| mean |"),
            std::string::npos);
}

TEST(RenderHtml, StructureIsBalancedAndComplete) {
  Report report;
  report.target_descriptor = "small.py";
  report.unit_count = 1;
  report.executive_summary = "All good.";
  report.scores = sample_scores();
  report.correctness_analysis = "- **major** (small.py): crash\n";
  report.style_analysis = "No style issues identified.\n";
  report.recommendations = {sample_rec()};
  report.conclusion = "Fix it.";
  std::string html = render_html(render_markdown(report));

  std::string error;
  EXPECT_TRUE(testing::html_tags_balanced(html, &error)) << error;
  EXPECT_NE(html.find("<!DOCTYPE html>"), std::string::npos);
  EXPECT_NE(html.find("<h1>Code Quality Assessment</h1>"), std::string::npos);
  size_t h2 = 0, pos = 0;
  while ((pos = html.find("<h2>", pos)) != std::string::npos) {
    ++h2;
    pos += 4;
  }
  EXPECT_EQ(h2, 6u);
  EXPECT_NE(html.find("<code>small.py</code>"), std::string::npos);
  EXPECT_NE(html.find("<table>"), std::string::npos);
  EXPECT_NE(html.find("<th>Dimension</th>"), std::string::npos);
  EXPECT_NE(html.find("<td>Correctness</td>"), std::string::npos);
  EXPECT_NE(html.find("<strong>major</strong>"), std::string::npos);
  EXPECT_NE(html.find("<em>(severity: major; impact: high; dimension: "
                      "correctness)</em>"),
            std::string::npos);
  EXPECT_NE(html.find("<ol>"), std::string::npos);
  EXPECT_EQ(html.find("<script"), std::string::npos);
}

TEST(RenderHtml, EscapesEntitiesInProseAndCells) {
  Report report;
  report.target_descriptor = "a<b>.py";
  report.scores = sample_scores();
  report.scores[0].rationale = "score & <reason>";
  report.executive_summary = "Uses x < 10 && y > \"z\".";
  report.correctness_analysis = "c";
  report.style_analysis = "s";
  report.conclusion = "c";
  std::string html = render_html(render_markdown(report));
  EXPECT_NE(html.find("x &lt; 10 &amp;&amp; y &gt; &quot;z&quot;."),
            std::string::npos);
  EXPECT_NE(html.find("<td>score &amp; &lt;reason&gt;</td>"),
            std::string::npos);
  EXPECT_EQ(html.find("<reason>"), std::string::npos);
}

TEST(RenderHtml, FencedCodeKeepsLanguageClass) {
  std::string html =
      render_html("```python\nx = 1 < 2\n```\n\nplain text\n");
  EXPECT_NE(html.find("<pre><code class=\"language-python\">"),
            std::string::npos);
  EXPECT_NE(html.find("x = 1 &lt; 2"), std::string::npos);
  EXPECT_NE(html.find("<p>plain text</p>"), std::string::npos);
  std::string error;
  EXPECT_TRUE(testing::html_tags_balanced(html, &error)) << error;
}

TEST(RenderHtml, EscapedMarkdownCharactersResolve) {
  std::string html = render_html("prose with \\## not a header\n");
  EXPECT_NE(html.find("<p>prose with ## not a header</p>"),
            std::string::npos);
}

TEST(RenderHtml, SplitTableRowHandlesEscapedPipes) {
  using internal_html::split_table_row;
  auto cells = split_table_row("| a | b \\| c | d |");
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0], "a");
  EXPECT_EQ(cells[1], "b | c");
  EXPECT_EQ(cells[2], "d");
  EXPECT_TRUE(internal_html::is_separator_row("| --- | --- |"));
  EXPECT_FALSE(internal_html::is_separator_row("| a | b |"));
}

TEST(WriteFileAtomic, WritesContentWithoutTempResidue) {
  TempDir dir;
  fs::path target = dir.path() / "out" / "report.md";
  write_file_atomic(target, "hello report\n");
  EXPECT_EQ(testing::read_text(target), "hello report\n");

  // Overwrites cleanly and leaves no sibling temp files behind.
  write_file_atomic(target, "second version\n");
  EXPECT_EQ(testing::read_text(target), "second version\n");
  int entries = 0;
  for (const auto& entry : fs::directory_iterator(target.parent_path())) {
    (void)entry;
    ++entries;
  }
  EXPECT_EQ(entries, 1);
}

TEST(WriteFileAtomic, FailureLeavesNoArtifact) {
  TempDir dir;
  fs::path blocker = dir.path() / "blocker";
  testing::write_text(blocker, "a plain file");
  // The parent "directory" is a regular file, so the write cannot open.
  fs::path target = blocker / "report.md";
  EXPECT_THROW(write_file_atomic(target, "never lands"), Error);
  EXPECT_FALSE(fs::exists(target));
  EXPECT_TRUE(fs::is_regular_file(blocker));
}

}  // namespace
}  // namespace codequal
