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

#include <future>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "codequal/agents.hpp"
#include "codequal/error.hpp"
#include "codequal/ingest.hpp"
#include "codequal/lint.hpp"
#include "codequal/provider.hpp"
#include "codequal/retry.hpp"

namespace codequal {

/// Read-only material an agent prompt can draw on. Composite execution
/// copies it per stage; parallel children share one frozen snapshot, so
/// siblings never observe each other.
struct RunContext {
  std::string target_descriptor;
  const CodeUnit* unit = nullptr;
  const std::vector<Chunk>* chunks = nullptr;
  const LintReport* lint = nullptr;
  std::map<std::string, AgentOutput> upstream;
  std::map<std::string, std::string> extras;
  std::vector<std::string> memory_notes;
};

using RunResult = std::map<std::string, AgentOutput>;

using PromptBuilder =
    std::function<PromptRequest(const AgentSpec&, const RunContext&)>;

/// Failure of part of a composition. Carries which agents failed and every
/// output that completed before or beside the failure, so callers can
/// salvage partial work.
class NodeError : public Error {
 public:
  NodeError(const std::string& message, std::vector<std::string> failed,
            RunResult partial, ErrorDomain domain = ErrorDomain::provider)
      : Error(ErrorKind::permanent, message, std::nullopt, domain),
        failed_agents_(std::move(failed)),
        partial_outputs_(std::move(partial)) {}

  const std::vector<std::string>& failed_agents() const {
    return failed_agents_;
  }
  const RunResult& partial_outputs() const { return partial_outputs_; }

 private:
  std::vector<std::string> failed_agents_;
  RunResult partial_outputs_;
};

struct RunnerOptions {
  RetryPolicy retry;
  uint64_t retry_seed = 0;
  SleepFn sleep = real_sleep;
  EventSink events;
  bool invoke_tools = true;
};

/// Executes composition nodes against a model provider. Stateless across
/// runs; a single Runner may execute disjoint contexts concurrently.
class Runner {
 public:
  Runner(ModelProvider& provider, PromptBuilder build_prompt,
         RunnerOptions options = {})
      : provider_(provider),
        build_prompt_(std::move(build_prompt)),
        options_(std::move(options)) {
    options_.retry.validate();
    if (!build_prompt_) throw permanent_error("prompt builder is required");
  }

  /// Registers a composition a leaf can name in AgentSpec::tools. The
  /// tool runs before the leaf's own prompt is built and its outputs are
  /// folded into the leaf's visible upstream.
  void register_tool(const std::string& name, CompositionNode node) {
    tools_.insert_or_assign(name, std::move(node));
  }

  const std::map<std::string, CompositionNode>& tools() const {
    return tools_;
  }

  RunResult run(const CompositionNode& node, const RunContext& ctx) const {
    return run_node(node, ctx);
  }

 private:
  void emit(EventKind kind, const std::string& agent,
            const std::string& detail = "") const {
    if (options_.events) options_.events(RunEvent{kind, agent, detail});
  }

  RunResult run_leaf(const AgentSpec& spec, const RunContext& ctx) const {
    emit(EventKind::started, spec.name);

    RunContext local;
    RunResult tool_outputs_all;
    const RunContext* effective = &ctx;
    if (options_.invoke_tools && !spec.tools.empty()) {
      local = ctx;
      for (const auto& tool_name : spec.tools) {
        auto it = tools_.find(tool_name);
        if (it == tools_.end()) {
          emit(EventKind::failed, spec.name,
               "unknown tool: " + tool_name);
          throw Error(ErrorKind::permanent,
                      "agent " + spec.name + " names unknown tool " +
                          tool_name,
                      std::nullopt, ErrorDomain::internal);
        }
        emit(EventKind::tool_invoked, spec.name, tool_name);
        RunResult tool_outputs;
        try {
          tool_outputs = run_node(it->second, local);
        } catch (const Error& e) {
          emit(EventKind::failed, spec.name,
               "tool " + tool_name + " failed: " + e.what());
          throw;
        }
        for (auto& [name, output] : tool_outputs) {
          tool_outputs_all.insert_or_assign(name, output);
          local.upstream.insert_or_assign(name, std::move(output));
        }
      }
      effective = &local;
    }

    PromptRequest request = build_prompt_(spec, *effective);
    request.agent_name = spec.name;
    request.validate();

    int attempts = 1;
    ModelResponse response;
    try {
      response = with_retry(
          [&] { return provider_.generate(request); }, options_.retry,
          options_.retry_seed ^ fnv1a64(spec.name), options_.sleep,
          [&](int attempt, const Error& err) {
            attempts = attempt + 1;
            emit(EventKind::retried, spec.name,
                 "attempt " + std::to_string(attempt) + " failed: " +
                     err.what());
          });
    } catch (const Error& e) {
      emit(EventKind::failed, spec.name, e.what());
      // Keep already-computed tool results reachable by the caller.
      if (!tool_outputs_all.empty())
        throw NodeError(std::string("agent ") + spec.name +
                            " failed: " + e.what(),
                        {spec.name}, std::move(tool_outputs_all), e.domain());
      throw;
    }

    AgentOutput output;
    output.agent_name = spec.name;
    output.raw_text = response.text;
    output.sections = extract_sections(response.text);
    output.finish_reason = response.finish_reason;
    output.attempts = attempts;
    for (const auto& header : spec.output_sections)
      if (!output.sections.contains(header))
        output.missing_sections.push_back(header);
    emit(EventKind::completed, spec.name);

    // Tool outputs stay visible to the caller alongside the leaf's own.
    RunResult result = std::move(tool_outputs_all);
    result.insert_or_assign(spec.name, std::move(output));
    return result;
  }

  RunResult run_sequential(const CompositionNode& node,
                           const RunContext& ctx) const {
    RunContext local = ctx;
    RunResult collected;
    for (const auto& child : node.children) {
      RunResult child_outputs;
      try {
        child_outputs = run_node(child, local);
      } catch (const NodeError& e) {
        RunResult partial = collected;
        for (const auto& [name, output] : e.partial_outputs())
          partial.insert_or_assign(name, output);
        throw NodeError(e.what(), e.failed_agents(), std::move(partial),
                        e.domain());
      } catch (const Error& e) {
        std::vector<std::string> names;
        collect_agent_names(child, names);
        // Message built before the move: argument evaluation order is
        // unspecified, so join_names must not race the move of names.
        std::string message =
            "stage " + join_names(names) + " failed: " + e.what();
        throw NodeError(message, std::move(names), collected, e.domain());
      }
      for (auto& [name, output] : child_outputs) {
        collected.insert_or_assign(name, output);
        local.upstream.insert_or_assign(name, std::move(output));
      }
    }
    return collected;
  }

  RunResult run_parallel(const CompositionNode& node,
                         const RunContext& ctx) const {
    // ctx is shared by const reference: children only read it, and the
    // merge below happens strictly after every future resolves.
    std::vector<std::future<RunResult>> futures;
    futures.reserve(node.children.size());
    for (const auto& child : node.children) {
      futures.push_back(std::async(std::launch::async, [this, &child, &ctx] {
        return run_node(child, ctx);
      }));
    }
    RunResult collected;
    std::vector<std::string> failed;
    std::string first_message;
    ErrorDomain domain = ErrorDomain::provider;
    for (size_t i = 0; i < futures.size(); ++i) {
      try {
        RunResult child_outputs = futures[i].get();
        for (auto& [name, output] : child_outputs)
          collected.insert_or_assign(name, std::move(output));
      } catch (const NodeError& e) {
        for (const auto& [name, output] : e.partial_outputs())
          collected.insert_or_assign(name, output);
        failed.insert(failed.end(), e.failed_agents().begin(),
                      e.failed_agents().end());
        if (first_message.empty()) {
          first_message = e.what();
          domain = e.domain();
        }
      } catch (const Error& e) {
        std::vector<std::string> names;
        collect_agent_names(node.children[i], names);
        failed.insert(failed.end(), names.begin(), names.end());
        if (first_message.empty()) {
          first_message = e.what();
          domain = e.domain();
        }
      }
    }
    if (!failed.empty()) {
      // Message built before the move: argument evaluation order is
      // unspecified, so join_names must not race the move of failed.
      std::string message =
          "agent " + join_names(failed) + " failed: " + first_message;
      throw NodeError(message, std::move(failed), std::move(collected),
                      domain);
    }
    return collected;
  }

  RunResult run_node(const CompositionNode& node,
                     const RunContext& ctx) const {
    switch (node.kind) {
      case NodeKind::leaf:
        return run_leaf(node.spec, ctx);
      case NodeKind::sequential:
        return run_sequential(node, ctx);
      case NodeKind::parallel:
        return run_parallel(node, ctx);
    }
    throw Error(ErrorKind::permanent, "unreachable node kind", std::nullopt,
                ErrorDomain::internal);
  }

  static std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (size_t i = 0; i < names.size(); ++i) {
      if (i) out += ", ";
      out += names[i];
    }
    return out;
  }

  ModelProvider& provider_;
  PromptBuilder build_prompt_;
  RunnerOptions options_;
  std::map<std::string, CompositionNode> tools_;
};

}  // namespace codequal
