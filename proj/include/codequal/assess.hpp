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
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "codequal/agents.hpp"
#include "codequal/findings.hpp"
#include "codequal/ingest.hpp"
#include "codequal/lint.hpp"
#include "codequal/runtime.hpp"

namespace codequal {

inline constexpr const char* kOrchestratorName = "report_generator";
inline constexpr const char* kCorrectnessName = "correctness_assessor";
inline constexpr const char* kStyleName = "style_assessor";
inline constexpr const char* kDescriptionName = "description_generator";
inline constexpr const char* kRecommenderName = "improvement_recommender";
inline constexpr const char* kPipelineToolName = "assessment_pipeline";

struct AgentSettings {
  std::string model_id = "default";
  double temperature = 0.0;
  int max_output_chars = 16000;
};

namespace instructions {

inline constexpr const char* kCorrectness =
    "You review source code for functional correctness. Identify logic "
    "errors, boundary mistakes, error-handling gaps, and security-relevant "
    "hazards such as injection risks or hard-coded secrets. Ground findings "
    "in the static analysis results when they apply: cite line numbers and "
    "linter message codes. Use constructive, professional language. Answer "
    "with exactly two sections: a '## Findings' section holding a bulleted "
    "list where each item states a severity (critical, major, minor, or "
    "info), the affected lines as 'line N' or 'lines N-M', and linter codes "
    "when relevant; and a '## Score' section holding a single overall "
    "correctness rating from 0 to 10.";

inline constexpr const char* kStyle =
    "You review source code for style and structure. Assess naming, "
    "formatting, documentation, idiomatic usage, modularity, and "
    "complexity. Use constructive, professional language. Answer with "
    "exactly two sections: a '## Findings' section holding a bulleted list "
    "where each item states a severity (critical, major, minor, or info) "
    "and the affected lines; and a '## Score' section holding two labeled "
    "lines, 'style: <0-10>' and 'maintainability: <0-10>'.";

inline constexpr const char* kDescription =
    "You summarize codebases for reviewers. Describe the purpose, "
    "structure, and notable components of the code, in plain prose. Answer "
    "with a single '## Summary' section holding one concise paragraph.";

inline constexpr const char* kRecommender =
    "You turn code assessment results into an improvement plan. "
    "De-duplicate overlapping findings, rank by severity and impact, and "
    "produce at most ten concrete action items. Use constructive, "
    "professional language. Answer with a single '## Recommendations' "
    "section holding a numbered list; format each item as 'action text "
    "(severity: <critical|major|minor|info>; impact: <high|medium|low>; "
    "dimension: <correctness|security|style|maintainability>)'.";

inline constexpr const char* kOrchestrator =
    "You compose the closing prose of a code assessment report from "
    "prepared results. Use constructive, professional language. Answer "
    "with exactly two sections: '## Executive Summary' holding one "
    "paragraph that summarizes the outcome, the dimension scores, and the "
    "most important issue; and '## Conclusion' holding a short paragraph "
    "with the overall outlook and the top follow-up priority.";

}  // namespace instructions

/// The full execution shape: a root prose agent that invokes the
/// assessment pipeline as a registered tool. Five named agents total.
struct AgentTree {
  CompositionNode root;
  std::map<std::string, CompositionNode> tools;
};

inline AgentTree build_agent_tree(const AgentSettings& settings = {}) {
  if (settings.model_id.empty())
    throw permanent_error("provider.model_id must not be empty");
  if (settings.max_output_chars <= 0)
    throw permanent_error("provider.max_output_chars must be positive");

  auto spec = [&](const char* name, const char* role,
                  const char* instruction,
                  std::vector<std::string> sections) {
    AgentSpec s;
    s.name = name;
    s.role = role;
    s.model_id = settings.model_id;
    s.instruction = instruction;
    s.output_sections = std::move(sections);
    return s;
  };

  CompositionNode parallel = make_parallel(
      "assessors",
      {make_leaf(spec(kCorrectnessName, "correctness",
                      instructions::kCorrectness, {"Findings", "Score"})),
       make_leaf(spec(kStyleName, "style", instructions::kStyle,
                      {"Findings", "Score"})),
       make_leaf(spec(kDescriptionName, "description",
                      instructions::kDescription, {"Summary"}))});

  CompositionNode pipeline = make_sequential(
      "pipeline",
      {std::move(parallel),
       make_leaf(spec(kRecommenderName, "recommend",
                      instructions::kRecommender, {"Recommendations"}))});

  AgentSpec root_spec =
      spec(kOrchestratorName, "orchestrate", instructions::kOrchestrator,
           {"Executive Summary", "Conclusion"});
  root_spec.tools = {kPipelineToolName};

  AgentTree tree;
  tree.root = make_leaf(std::move(root_spec));
  tree.tools.emplace(kPipelineToolName, std::move(pipeline));
  return tree;
}

inline TreeStats tree_stats(const AgentTree& tree) {
  TreeStats stats;
  accumulate_stats(tree.root, stats, 1);
  for (const auto& [name, node] : tree.tools)
    accumulate_stats(node, stats, 2);
  return stats;
}

inline std::vector<std::string> tree_agent_names(const AgentTree& tree) {
  std::vector<std::string> names;
  collect_agent_names(tree.root, names);
  for (const auto& [tool_name, node] : tree.tools)
    collect_agent_names(node, names);
  return names;
}

inline void register_tree_tools(Runner& runner, const AgentTree& tree) {
  for (const auto& [name, node] : tree.tools)
    runner.register_tool(name, node);
}

/// Chunk-joined code payload with file and line markers, fenced per chunk.
inline std::string format_code_payload(const RunContext& ctx) {
  if (ctx.unit == nullptr) return "";
  std::ostringstream out;
  const std::string& lang = ctx.unit->language_tag;
  if (ctx.chunks != nullptr && ctx.chunks->size() > 1) {
    for (const auto& chunk : *ctx.chunks) {
      out << "File: " << chunk.unit_path << " (lines " << chunk.start_line
          << "-" << chunk.end_line << " of " << ctx.unit->line_count
          << ")\n```" << lang << "\n"
          << chunk.content;
      if (!chunk.content.empty() && chunk.content.back() != '\n') out << "\n";
      out << "```\n\n";
    }
  } else {
    out << "File: " << ctx.unit->rel_path << " (" << ctx.unit->line_count
        << " lines)\n```" << lang << "\n"
        << ctx.unit->content;
    if (!ctx.unit->content.empty() && ctx.unit->content.back() != '\n')
      out << "\n";
    out << "```\n\n";
  }
  return out.str();
}

inline std::string format_findings_block(const std::vector<Finding>& fs) {
  if (fs.empty()) return "(none)\n";
  std::ostringstream out;
  for (const auto& f : fs) {
    out << "- [" << severity_name(f.severity) << "] " << f.unit_path << ": "
        << f.description;
    if (!f.lint_codes.empty()) {
      bool all_present = true;
      for (const auto& code : f.lint_codes)
        if (f.description.find(code) == std::string::npos)
          all_present = false;
      if (!all_present) {
        out << " [";
        for (size_t i = 0; i < f.lint_codes.size(); ++i) {
          if (i) out << ", ";
          out << f.lint_codes[i];
        }
        out << "]";
      }
    }
    out << "\n";
  }
  return out.str();
}

inline std::string format_scores_block(
    const std::array<DimensionScore, 4>& scores) {
  std::ostringstream out;
  for (const auto& s : scores)
    out << dimension_name(s.dimension) << ": " << format1(s.value) << " ("
        << s.rationale << ")\n";
  return out.str();
}

inline std::string format_recommendations_block(
    const std::vector<Recommendation>& recs) {
  if (recs.empty()) return "(none)\n";
  std::ostringstream out;
  for (const auto& r : recs)
    out << r.rank << ". " << r.action << " (severity: "
        << severity_name(r.severity) << "; impact: " << impact_name(r.impact)
        << "; dimension: " << dimension_name(r.dimension) << ")\n";
  return out.str();
}

/// Everything extracted from one unit's three assessor outputs.
struct UnitParse {
  std::vector<Finding> findings;  // deduplicated, security-tagged
  ParsedScore correctness_score;
  ParsedScore style_score;
  ParsedScore maintainability_score;
  DimensionScore security;
  std::string summary_text;
  std::string correctness_free_text;
  std::string style_free_text;
  std::vector<std::string> parse_warnings;

  std::array<double, 4> score_values() const {
    return {correctness_score.value, security.value, style_score.value,
            maintainability_score.value};
  }
};

inline const AgentOutput* find_output(const RunResult& outputs,
                                      const std::string& name) {
  auto it = outputs.find(name);
  return it == outputs.end() ? nullptr : &it->second;
}

/// Pure extraction from the three parallel outputs of one unit. Tolerant
/// by construction: a response missing its contract headers degrades to
/// free text plus a parse warning, never an error.
inline UnitParse parse_unit_outputs(const std::string& unit_path,
                                    const RunResult& outputs,
                                    const SecurityRules& rules = {}) {
  UnitParse parse;
  std::vector<Finding> raw;

  const AgentOutput* correctness = find_output(outputs, kCorrectnessName);
  const AgentOutput* style = find_output(outputs, kStyleName);
  const AgentOutput* description = find_output(outputs, kDescriptionName);

  if (correctness != nullptr) {
    const std::string* findings_body =
        correctness->sections.find("Findings");
    const std::string* score_body = correctness->sections.find("Score");
    if (findings_body == nullptr && score_body == nullptr) {
      parse.parse_warnings.push_back(
          unit_path + ": " + std::string(kCorrectnessName) +
          " output had no recognized sections; kept as free text");
      parse.correctness_free_text = correctness->raw_text;
      parse.correctness_score = ParsedScore{
          5.0, false, true, "no numeric score found; defaulted to 5.0"};
    } else {
      if (findings_body != nullptr) {
        auto fs = parse_findings(*findings_body, unit_path,
                                 Dimension::correctness, kCorrectnessName);
        raw.insert(raw.end(), fs.begin(), fs.end());
      }
      parse.correctness_score =
          score_body != nullptr
              ? parse_score(*score_body)
              : ParsedScore{5.0, false, true,
                            "no numeric score found; defaulted to 5.0"};
    }
  } else {
    parse.parse_warnings.push_back(unit_path + ": no correctness output");
    parse.correctness_score = ParsedScore{
        5.0, false, true, "no numeric score found; defaulted to 5.0"};
  }

  if (style != nullptr) {
    const std::string* findings_body = style->sections.find("Findings");
    const std::string* score_body = style->sections.find("Score");
    if (findings_body == nullptr && score_body == nullptr) {
      parse.parse_warnings.push_back(
          unit_path + ": " + std::string(kStyleName) +
          " output had no recognized sections; kept as free text");
      parse.style_free_text = style->raw_text;
    } else if (findings_body != nullptr) {
      auto fs = parse_findings(*findings_body, unit_path, Dimension::style,
                               kStyleName);
      raw.insert(raw.end(), fs.begin(), fs.end());
    }
    auto [style_score, maint_score] =
        parse_style_scores(score_body != nullptr ? *score_body : "");
    parse.style_score = style_score;
    parse.maintainability_score = maint_score;
  } else {
    parse.parse_warnings.push_back(unit_path + ": no style output");
    parse.style_score = ParsedScore{
        5.0, false, true, "no numeric score found; defaulted to 5.0"};
    parse.maintainability_score = parse.style_score;
  }

  if (description != nullptr) {
    const std::string* summary = description->sections.find("Summary");
    parse.summary_text =
        trim(summary != nullptr ? *summary : description->raw_text);
  } else {
    parse.parse_warnings.push_back(unit_path + ": no description output");
  }

  apply_security_tagging(raw, rules);
  parse.findings = deduplicate_findings(raw);
  parse.security = derive_security_score(parse.findings);
  return parse;
}

/// Prompt construction for every role. Synthesized material arrives via
/// ctx.extras when the staged flow has already computed it; otherwise it
/// is derived here from upstream outputs, so the tool-invoked path works
/// from raw context alone.
class PromptFactory {
 public:
  PromptFactory(AgentSettings settings, SecurityRules rules)
      : settings_(std::move(settings)), rules_(std::move(rules)) {}

  PromptRequest operator()(const AgentSpec& spec,
                           const RunContext& ctx) const {
    PromptRequest req;
    req.agent_name = spec.name;
    req.system_prompt = spec.instruction;
    req.model_id = spec.model_id;
    req.temperature = settings_.temperature;
    req.max_output_chars = settings_.max_output_chars;

    if (spec.role == "correctness") {
      req.user_content = assessor_content(ctx, /*with_lint=*/true);
    } else if (spec.role == "style") {
      req.user_content = assessor_content(ctx, /*with_lint=*/false);
    } else if (spec.role == "description") {
      req.user_content = description_content(ctx);
    } else if (spec.role == "recommend") {
      req.user_content = recommender_content(ctx);
    } else if (spec.role == "orchestrate") {
      req.user_content = orchestrator_content(ctx);
    } else {
      throw Error(ErrorKind::permanent, "unknown agent role: " + spec.role,
                  std::nullopt, ErrorDomain::internal);
    }
    return req;
  }

 private:
  std::string target_line(const RunContext& ctx) const {
    return "Target: " + ctx.target_descriptor + "\n\n";
  }

  std::string assessor_content(const RunContext& ctx, bool with_lint) const {
    if (ctx.unit == nullptr)
      throw permanent_error("assessor prompt requires a code unit");
    std::ostringstream out;
    out << target_line(ctx) << format_code_payload(ctx);
    if (with_lint) {
      out << "Static analysis results:\n"
          << (ctx.lint != nullptr ? format_lint_block(*ctx.lint)
                                  : std::string(
                                        "(linter unavailable: no static "
                                        "analysis results)\n"))
          << "Cite the line numbers and message codes above where they "
             "support a finding.\n";
    }
    return out.str();
  }

  std::string description_content(const RunContext& ctx) const {
    auto it = ctx.extras.find("summaries_block");
    if (it != ctx.extras.end()) {
      // Repo-level pass over already-produced per-file summaries.
      return target_line(ctx) + "Per-file summaries:\n" + it->second;
    }
    if (ctx.unit == nullptr)
      throw permanent_error("description prompt requires a code unit");
    return target_line(ctx) + format_code_payload(ctx);
  }

  std::string recommender_content(const RunContext& ctx) const {
    std::ostringstream out;
    out << target_line(ctx);
    auto findings_it = ctx.extras.find("findings_block");
    if (findings_it != ctx.extras.end()) {
      out << "Deduplicated findings:\n" << findings_it->second;
    } else {
      std::string path = ctx.unit != nullptr ? ctx.unit->rel_path : "input";
      UnitParse parse = parse_unit_outputs(path, ctx.upstream, rules_);
      out << "Deduplicated findings:\n"
          << format_findings_block(parse.findings);
    }
    auto reports_it = ctx.extras.find("reports_block");
    if (reports_it != ctx.extras.end()) {
      out << "\nAssessor reports:\n" << reports_it->second;
    } else {
      out << "\nAssessor reports:\n";
      for (const char* name :
           {kCorrectnessName, kStyleName, kDescriptionName}) {
        const AgentOutput* output = find_output(ctx.upstream, name);
        if (output == nullptr) continue;
        out << "### " << name << "\n" << output->raw_text;
        if (!output->raw_text.empty() && output->raw_text.back() != '\n')
          out << "\n";
        out << "\n";
      }
    }
    return out.str();
  }

  std::string orchestrator_content(const RunContext& ctx) const {
    std::ostringstream out;
    out << target_line(ctx);

    auto scores_it = ctx.extras.find("scores_block");
    auto desc_it = ctx.extras.find("description_text");
    auto recs_it = ctx.extras.find("recommendations_block");
    auto findings_it = ctx.extras.find("findings_block");

    if (scores_it != ctx.extras.end()) {
      out << "Dimension scores:\n" << scores_it->second;
      if (desc_it != ctx.extras.end())
        out << "\nCode description:\n" << desc_it->second << "\n";
      if (findings_it != ctx.extras.end())
        out << "\nDeduplicated findings:\n" << findings_it->second;
      if (recs_it != ctx.extras.end())
        out << "\nRanked recommendations:\n" << recs_it->second;
      return out.str();
    }

    // Tool-invoked path: derive everything from upstream outputs.
    std::string path = ctx.unit != nullptr ? ctx.unit->rel_path : "input";
    UnitParse parse = parse_unit_outputs(path, ctx.upstream, rules_);
    UnitScoreRow row;
    row.path = path;
    row.line_count = ctx.unit != nullptr ? ctx.unit->line_count : 0;
    row.values = parse.score_values();
    auto scores = aggregate_file_scores({row});
    out << "Dimension scores:\n" << format_scores_block(scores);
    if (!parse.summary_text.empty())
      out << "\nCode description:\n" << parse.summary_text << "\n";
    out << "\nDeduplicated findings:\n"
        << format_findings_block(parse.findings);
    const AgentOutput* recommender = find_output(ctx.upstream,
                                                 kRecommenderName);
    if (recommender != nullptr) {
      const std::string* body = recommender->sections.find("Recommendations");
      auto recs = rank_recommendations(
          parse_recommendations(body != nullptr ? *body
                                                : recommender->raw_text));
      out << "\nRanked recommendations:\n"
          << format_recommendations_block(recs);
    }
    return out.str();
  }

  AgentSettings settings_;
  SecurityRules rules_;
};

}  // namespace codequal
