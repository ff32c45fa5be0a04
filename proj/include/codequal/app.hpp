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
#include <chrono>
#include <exception>
#include <filesystem>
#include <future>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "codequal/assess.hpp"
#include "codequal/config.hpp"
#include "codequal/error.hpp"
#include "codequal/findings.hpp"
#include "codequal/github.hpp"
#include "codequal/ingest.hpp"
#include "codequal/lint.hpp"
#include "codequal/memory.hpp"
#include "codequal/report.hpp"
#include "codequal/runtime.hpp"

namespace codequal {

/// Process exit codes by failure origin.
inline int exit_code_for(ErrorDomain domain) {
  switch (domain) {
    case ErrorDomain::usage:
      return 1;
    case ErrorDomain::ingestion:
      return 2;
    case ErrorDomain::provider:
      return 3;
    case ErrorDomain::general:
    case ErrorDomain::internal:
      return 4;
  }
  return 4;
}

inline int exit_code_for(const Error& e) { return exit_code_for(e.domain()); }

/// What one completed assessment produced, for the CLI to report.
struct RunSummary {
  std::string target_descriptor;
  Modality modality = Modality::file;
  size_t unit_count = 0;
  size_t finding_count = 0;
  std::array<DimensionScore, 4> scores{};
  size_t recommendation_count = 0;
  std::vector<std::string> degraded_flags;
  std::vector<std::string> warnings;
  std::vector<std::string> output_paths;
  std::string report_markdown;
  std::string session_id;  // set when the run was remembered
  double duration_seconds = 0.0;
};

/// Injectable seams: event stream, sleep (so tests never wait), and
/// environment lookup (GITHUB_TOKEN, provider API keys).
struct AssessmentHooks {
  EventSink events;
  SleepFn sleep = real_sleep;
  EnvReader env = system_env;
};

namespace internal_app {

struct UnitWork {
  const CodeUnit* unit = nullptr;
  std::vector<Chunk> chunks;
  LintReport lint;
};

inline std::string lint_summary_text(const std::vector<UnitWork>& works,
                                     const LintOptions& options,
                                     bool enabled) {
  if (!enabled) return "disabled for this run.";
  size_t diags = 0;
  size_t unavailable = 0;
  size_t raw_only = 0;
  for (const auto& w : works) {
    if (!w.lint.linter_available) {
      ++unavailable;
    } else if (!w.lint.parse_ok) {
      ++raw_only;
    } else {
      diags += w.lint.diagnostics.size();
    }
  }
  if (unavailable == works.size()) return "";
  std::ostringstream out;
  out << options.command << " reported " << diags << " issue"
      << (diags == 1 ? "" : "s") << " across " << works.size() << " file"
      << (works.size() == 1 ? "" : "s") << ".";
  if (raw_only > 0)
    out << " Output for " << raw_only << " file"
        << (raw_only == 1 ? "" : "s") << " was not machine-readable.";
  if (unavailable > 0)
    out << " The linter was unavailable for " << unavailable << " file"
        << (unavailable == 1 ? "" : "s") << ".";
  return out.str();
}

inline std::string score_note(const ParsedScore& score) {
  if (score.defaulted) return score.note;
  if (score.clamped && !score.note.empty())
    return "model-assessed; " + score.note;
  return "model-assessed";
}

/// Per-dimension scores for a single-file run. Security keeps its
/// heuristic rationale; the model-backed dimensions note parse anomalies.
inline std::array<DimensionScore, 4> single_unit_scores(
    const UnitParse& parse) {
  return {DimensionScore{Dimension::correctness,
                         parse.correctness_score.value,
                         score_note(parse.correctness_score)},
          parse.security,
          DimensionScore{Dimension::style, parse.style_score.value,
                         score_note(parse.style_score)},
          DimensionScore{Dimension::maintainability,
                         parse.maintainability_score.value,
                         score_note(parse.maintainability_score)}};
}

inline std::string recommender_body(const AgentOutput& output) {
  const std::string* body = output.sections.find("Recommendations");
  return body != nullptr ? *body : output.raw_text;
}

}  // namespace internal_app

/// Runs the full assessment for `target` under `cfg`: ingest, lint,
/// agent execution, synthesis, rendering, artifact writes, and the
/// optional memory save. Throws Error (mapped to an exit code by the
/// caller) only when no report can be produced; synthesis-stage agent
/// failures degrade to deterministic fallbacks instead.
inline RunSummary run_assessment(const std::string& target,
                                 const Config& cfg, ModelProvider& provider,
                                 MemoryStore* memory = nullptr,
                                 const AssessmentHooks& hooks = {}) {
  namespace fs = std::filesystem;
  using internal_app::UnitWork;
  const auto t0 = std::chrono::steady_clock::now();

  cfg.validate();
  RunSummary summary;

  // Ingestion: turn the raw target into assessable code units.
  SourceSpec spec = resolve_input(target);
  summary.modality = spec.modality;
  std::vector<CodeUnit> units;
  std::string descriptor;
  switch (spec.modality) {
    case Modality::file: {
      units.push_back(read_file_unit(spec.locator));
      descriptor = spec.locator;
      break;
    }
    case Modality::directory: {
      DirectoryScan scan = enumerate_directory(spec.locator, cfg.ingest);
      units = std::move(scan.units);
      for (const auto& skipped : scan.skipped)
        summary.warnings.push_back("skipped " + skipped.path + ": " +
                                   skipped.reason);
      descriptor = spec.locator;
      break;
    }
    case Modality::repo_url: {
      RepoFetchOptions options;
      options.api_base = cfg.github_api_base;
      const char* token = hooks.env("GITHUB_TOKEN");
      if (token != nullptr) options.token = token;
      options.ingest = cfg.ingest;
      options.retry = cfg.retry;
      options.retry_seed = cfg.retry_seed;
      options.sleep = hooks.sleep;
      RepoFetch fetch = fetch_repo(spec, options);
      units = std::move(fetch.units);
      for (const auto& skipped : fetch.skipped)
        summary.warnings.push_back("skipped " + skipped.path + ": " +
                                   skipped.reason);
      descriptor = spec.owner + "/" + spec.repo + "@" + fetch.resolved_ref;
      break;
    }
  }
  if (units.empty())
    throw ingestion_error(ErrorKind::permanent,
                          "no assessable files in target: " + target);
  summary.target_descriptor = descriptor;
  summary.unit_count = units.size();

  // Chunking and static analysis, per unit.
  std::vector<UnitWork> works(units.size());
  bool lint_degraded = false;
  for (size_t i = 0; i < units.size(); ++i) {
    works[i].unit = &units[i];
    works[i].chunks =
        chunk_unit(units[i], cfg.chunk_max_chars,
                   cfg.chunk_overlap_lines);
    if (!cfg.lint_enabled) {
      works[i].lint.note = "static analysis disabled";
      continue;
    }
    try {
      works[i].lint = run_linter(units[i], cfg.lint);
    } catch (const Error& e) {
      if (cfg.lint.required) throw;
      works[i].lint = LintReport{};
      works[i].lint.note = e.what();
      summary.warnings.push_back("linter failed on " + units[i].rel_path +
                                 ": " + e.what());
    }
    if (!works[i].lint.linter_available && !lint_degraded) {
      lint_degraded = true;
      summary.degraded_flags.push_back(
          "static analysis unavailable: " +
          (works[i].lint.note.empty() ? std::string("linter not run")
                                      : works[i].lint.note));
    }
  }

  // Agent execution.
  AgentSettings settings{cfg.model_id, cfg.temperature,
                         cfg.max_output_chars};
  AgentTree tree = build_agent_tree(settings);
  PromptFactory factory(settings, cfg.security);

  RunnerOptions run_options;
  run_options.retry = cfg.retry;
  run_options.retry_seed = cfg.retry_seed;
  run_options.sleep = hooks.sleep;
  run_options.events = hooks.events;
  Runner runner(provider, factory, run_options);
  register_tree_tools(runner, tree);

  std::array<DimensionScore, 4> scores{};
  std::vector<Finding> findings;
  std::vector<Recommendation> recommendations;
  std::string description_text;
  std::string executive_summary;
  std::string conclusion;

  if (units.size() == 1) {
    // Single unit: the root agent drives the whole pipeline as its tool.
    RunContext ctx;
    ctx.target_descriptor = descriptor;
    ctx.unit = works[0].unit;
    ctx.chunks = &works[0].chunks;
    ctx.lint = &works[0].lint;

    RunResult outputs;
    bool recommender_ok = true;
    try {
      outputs = runner.run(tree.root, ctx);
    } catch (const NodeError& e) {
      // Salvageable only when every failed agent is a synthesis stage;
      // a failed assessor leaves nothing to report on.
      for (const auto& name : e.failed_agents())
        if (name != kRecommenderName && name != kOrchestratorName) throw;
      outputs = e.partial_outputs();
      for (const auto& name : e.failed_agents()) {
        if (name == kRecommenderName) recommender_ok = false;
        summary.degraded_flags.push_back(
            "agent " + name + " failed after retries; deterministic "
            "fallback used");
      }
    }

    UnitParse parse =
        parse_unit_outputs(units[0].rel_path, outputs, cfg.security);
    for (const auto& w : parse.parse_warnings) summary.warnings.push_back(w);

    scores = internal_app::single_unit_scores(parse);
    findings = parse.findings;
    description_text = parse.summary_text;

    const AgentOutput* recommender = find_output(outputs, kRecommenderName);
    if (recommender_ok && recommender != nullptr) {
      recommendations = rank_recommendations(parse_recommendations(
          internal_app::recommender_body(*recommender)));
    } else {
      recommendations = heuristic_recommendations(findings);
    }

    const AgentOutput* orchestrator =
        find_output(outputs, kOrchestratorName);
    if (orchestrator != nullptr) {
      const std::string* es =
          orchestrator->sections.find("Executive Summary");
      const std::string* concl = orchestrator->sections.find("Conclusion");
      if (es != nullptr) executive_summary = trim(*es);
      if (concl != nullptr) conclusion = trim(*concl);
      if (es == nullptr && concl == nullptr)
        summary.warnings.push_back(
            "report_generator output had no recognized sections; "
            "composed prose deterministically");
    }
  } else {
    // Multiple units: stage the pipeline explicitly so assessors fan out
    // per file and synthesis happens once over the merged results.
    const CompositionNode& pipeline = tree.tools.at(kPipelineToolName);
    const CompositionNode& assessors = pipeline.children.at(0);
    const CompositionNode& recommender_leaf = pipeline.children.at(1);
    const CompositionNode& description_leaf = assessors.children.at(2);

    std::vector<UnitParse> parses(units.size());
    const size_t workers =
        std::max<size_t>(1, static_cast<size_t>(cfg.unit_workers));
    for (size_t base = 0; base < units.size(); base += workers) {
      size_t end = std::min(units.size(), base + workers);
      std::vector<std::future<UnitParse>> futures;
      futures.reserve(end - base);
      for (size_t i = base; i < end; ++i) {
        futures.push_back(std::async(std::launch::async, [&, i] {
          RunContext ctx;
          ctx.target_descriptor = descriptor;
          ctx.unit = works[i].unit;
          ctx.chunks = &works[i].chunks;
          ctx.lint = &works[i].lint;
          RunResult outputs = runner.run(assessors, ctx);
          return parse_unit_outputs(units[i].rel_path, outputs,
                                    cfg.security);
        }));
      }
      std::exception_ptr first_failure;
      for (size_t j = 0; j < futures.size(); ++j) {
        try {
          parses[base + j] = futures[j].get();
        } catch (...) {
          if (!first_failure) first_failure = std::current_exception();
        }
      }
      if (first_failure) std::rethrow_exception(first_failure);
    }

    std::vector<UnitScoreRow> rows;
    std::vector<Finding> merged;
    std::ostringstream summaries;
    std::ostringstream reports;
    for (size_t i = 0; i < units.size(); ++i) {
      for (const auto& w : parses[i].parse_warnings)
        summary.warnings.push_back(w);
      UnitScoreRow row;
      row.path = units[i].rel_path;
      row.line_count = units[i].line_count;
      row.values = parses[i].score_values();
      rows.push_back(row);
      merged.insert(merged.end(), parses[i].findings.begin(),
                    parses[i].findings.end());
      summaries << "File " << units[i].rel_path << ":\n"
                << (parses[i].summary_text.empty() ? "(no summary)"
                                                   : parses[i].summary_text)
                << "\n\n";
      reports << "### " << units[i].rel_path << "\ncorrectness "
              << format1(row.values[0]) << ", security "
              << format1(row.values[1]) << ", style "
              << format1(row.values[2]) << ", maintainability "
              << format1(row.values[3]) << "\n";
    }
    scores = aggregate_file_scores(rows);
    findings = deduplicate_findings(merged);

    // One extra description pass over the per-file summaries.
    {
      RunContext ctx;
      ctx.target_descriptor = descriptor;
      ctx.extras["summaries_block"] = summaries.str();
      try {
        RunResult outputs = runner.run(description_leaf, ctx);
        const AgentOutput* output = find_output(outputs, kDescriptionName);
        if (output != nullptr) {
          const std::string* body = output->sections.find("Summary");
          description_text =
              trim(body != nullptr ? *body : output->raw_text);
        }
      } catch (const Error& e) {
        summary.degraded_flags.push_back(
            "repository description failed; using per-file summaries");
        description_text = trim(summaries.str());
      }
    }

    {
      RunContext ctx;
      ctx.target_descriptor = descriptor;
      ctx.extras["findings_block"] = format_findings_block(findings);
      ctx.extras["reports_block"] =
          reports.str() + "\nCode description:\n" + description_text + "\n";
      try {
        RunResult outputs = runner.run(recommender_leaf, ctx);
        const AgentOutput* output = find_output(outputs, kRecommenderName);
        if (output == nullptr) throw permanent_error("no recommender output");
        recommendations = rank_recommendations(
            parse_recommendations(internal_app::recommender_body(*output)));
      } catch (const Error& e) {
        summary.degraded_flags.push_back(
            "agent " + std::string(kRecommenderName) +
            " failed after retries; deterministic fallback used");
        recommendations = heuristic_recommendations(findings);
      }
    }

    {
      RunnerOptions no_tool_options = run_options;
      no_tool_options.invoke_tools = false;
      Runner prose_runner(provider, factory, no_tool_options);
      RunContext ctx;
      ctx.target_descriptor = descriptor;
      ctx.extras["scores_block"] = format_scores_block(scores);
      ctx.extras["description_text"] = description_text;
      ctx.extras["recommendations_block"] =
          format_recommendations_block(recommendations);
      ctx.extras["findings_block"] = format_findings_block(findings);
      try {
        RunResult outputs = prose_runner.run(tree.root, ctx);
        const AgentOutput* output = find_output(outputs, kOrchestratorName);
        if (output != nullptr) {
          const std::string* es = output->sections.find("Executive Summary");
          const std::string* concl = output->sections.find("Conclusion");
          if (es != nullptr) executive_summary = trim(*es);
          if (concl != nullptr) conclusion = trim(*concl);
        }
      } catch (const Error& e) {
        summary.degraded_flags.push_back(
            "agent " + std::string(kOrchestratorName) +
            " failed after retries; deterministic fallback used");
      }
    }
  }

  // Assembly and rendering.
  ReportInputs inputs;
  inputs.target_descriptor = descriptor;
  inputs.unit_count = static_cast<int>(units.size());
  inputs.description_text = description_text;
  inputs.findings = findings;
  inputs.scores = scores;
  inputs.recommendations = recommendations;
  inputs.lint_summary =
      internal_app::lint_summary_text(works, cfg.lint, cfg.lint_enabled);
  inputs.executive_summary = executive_summary;
  inputs.conclusion = conclusion;
  inputs.degraded_flags = summary.degraded_flags;

  Report report = assemble_report(inputs);
  std::string markdown = render_markdown(report);

  fs::path out_dir(cfg.out_dir);
  if (cfg.formats.markdown) {
    fs::path path = out_dir / "report.md";
    write_file_atomic(path, markdown);
    summary.output_paths.push_back(path.string());
  }
  if (cfg.formats.html) {
    fs::path path = out_dir / "report.html";
    write_file_atomic(path, render_html(markdown));
    summary.output_paths.push_back(path.string());
  }

  if (cfg.remember && memory != nullptr) {
    std::string session_id =
        "session-" + std::to_string(memory->size() + 1) + "-" +
        fnv1a64_hex(descriptor + markdown);
    memory->add_session_to_memory(session_id, descriptor, markdown);
    summary.session_id = session_id;
  }

  summary.finding_count = findings.size();
  summary.scores = scores;
  summary.recommendation_count = recommendations.size();
  summary.report_markdown = std::move(markdown);
  summary.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return summary;
}

}  // namespace codequal
