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

#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "codequal/app.hpp"
#include "codequal/http_provider.hpp"
#include "codequal/version.hpp"

namespace {

std::unique_ptr<codequal::ModelProvider> make_provider(
    const codequal::Config& cfg) {
  using namespace codequal;
  if (cfg.provider_mode == "scripted") {
    if (cfg.fixtures_path.empty())
      throw usage_error(
          "scripted provider requires a fixture file: pass --fixtures or "
          "set provider.fixtures");
    return std::make_unique<ScriptedProvider>(
        ScriptedProvider::from_file(cfg.fixtures_path));
  }
  if (cfg.endpoint.empty())
    throw usage_error("live provider requires provider.endpoint");
  HttpProviderConfig hc;
  hc.endpoint = cfg.endpoint;
  hc.path = cfg.endpoint_path;
  hc.api_key_env = cfg.api_key_env;
  hc.timeout_seconds = cfg.provider_timeout_seconds;
  return std::make_unique<HttpProvider>(hc);
}

void print_summary(const codequal::RunSummary& summary) {
  using namespace codequal;
  std::cout << "Assessed " << summary.unit_count << " file"
            << (summary.unit_count == 1 ? "" : "s") << " from "
            << summary.target_descriptor << "\n";
  for (const auto& s : summary.scores)
    std::cout << "  " << dimension_name(s.dimension) << ": "
              << format1(s.value) << "\n";
  std::cout << "  findings: " << summary.finding_count
            << ", recommendations: " << summary.recommendation_count
            << "\n";
  for (const auto& path : summary.output_paths)
    std::cout << "Wrote " << path << "\n";
  if (!summary.session_id.empty())
    std::cout << "Remembered as " << summary.session_id
              << " (in-process only; memory does not persist)\n";
  if (!summary.degraded_flags.empty()) {
    std::cout << "Degraded:\n";
    for (const auto& flag : summary.degraded_flags)
      std::cout << "  - " << flag << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace codequal;

  CLI::App app{"Multi-agent code quality assessment"};
  app.set_version_flag("--version", std::string(kProjectName) + " " +
                                        kVersion);
  app.require_subcommand(1);

  std::string target;
  std::string out_dir;
  std::string format;
  std::string config_path;
  std::string provider_mode;
  std::string fixtures;
  bool no_lint = false;
  bool remember = false;

  CLI::App* assess = app.add_subcommand(
      "assess", "Assess a file, directory, or repository URL");
  assess->add_option("target", target,
                     "Path to a file or directory, or a repository URL")
      ->required();
  assess->add_option("--out", out_dir, "Output directory for reports");
  assess->add_option("--format", format, "Report formats to write")
      ->check(CLI::IsMember({"md", "html", "both"}));
  assess->add_option("--config", config_path, "Config file path");
  assess->add_option("--provider", provider_mode, "Model provider mode")
      ->check(CLI::IsMember({"live", "scripted"}));
  assess->add_option("--fixtures", fixtures,
                     "Scripted-provider fixture file (JSONL)");
  assess->add_flag("--no-lint", no_lint, "Skip static analysis");
  assess->add_flag("--remember", remember,
                   "Store the finished report in session memory");

  std::string query;
  int top_k = 5;
  CLI::App* memory_cmd =
      app.add_subcommand("memory", "Session memory operations");
  CLI::App* search = memory_cmd->add_subcommand(
      "search", "Search stored session reports");
  search->add_option("query", query, "Free-text query")->required();
  search->add_option("--top", top_k, "Maximum results to return");
  memory_cmd->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "Run with --help for usage.\n";
    return 1;
  }

  try {
    if (*assess) {
      Config cfg;
      if (!config_path.empty()) cfg = load_config_file(config_path);
      apply_env_overrides(cfg);
      if (assess->count("--out") > 0) cfg.out_dir = out_dir;
      if (assess->count("--format") > 0)
        cfg.formats = internal_config::parse_formats("--format", format);
      if (assess->count("--provider") > 0) cfg.provider_mode = provider_mode;
      if (assess->count("--fixtures") > 0) cfg.fixtures_path = fixtures;
      if (no_lint) cfg.lint_enabled = false;
      if (remember) cfg.remember = true;
      cfg.validate();

      std::unique_ptr<ModelProvider> provider = make_provider(cfg);
      MemoryStore store;
      AssessmentHooks hooks;
      hooks.events = [](const RunEvent& ev) {
        std::cerr << "[" << event_kind_name(ev.kind) << "] "
                  << ev.agent_name;
        if (!ev.detail.empty()) std::cerr << " " << ev.detail;
        std::cerr << "\n";
      };

      RunSummary summary =
          run_assessment(target, cfg, *provider, &store, hooks);
      for (const auto& w : summary.warnings)
        std::cerr << "warning: " << w << "\n";
      print_summary(summary);
      return 0;
    }

    if (*search) {
      // Memory is volatile and per-process; a fresh CLI invocation always
      // starts empty. The subcommand exists for embedding and scripting.
      MemoryStore store;
      auto hits = store.search_memory(query, top_k);
      if (hits.empty()) {
        std::cout << "No stored sessions match. Session memory is "
                     "in-process only and starts empty.\n";
        return 0;
      }
      for (const auto& hit : hits) {
        std::ostringstream rel;
        rel.setf(std::ios::fixed);
        rel.precision(2);
        rel << hit.relevance;
        std::cout << hit.session_id << "  relevance " << rel.str() << "  "
                  << hit.snippet << "\n";
      }
      return 0;
    }

    std::cerr << "error: no command given; run with --help\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
