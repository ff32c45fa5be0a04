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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "codequal/error.hpp"
#include "codequal/provider.hpp"
#include "codequal/util.hpp"

namespace codequal {

/// Static description of one agent: who it is, what it must produce, and
/// which registered tools run for it before its own prompt is built.
struct AgentSpec {
  std::string name;
  std::string role;
  std::string model_id = "default";
  std::string instruction;
  std::vector<std::string> output_sections;  // required "## ..." headers
  std::vector<std::string> tools;

  void validate() const {
    if (name.empty()) throw permanent_error("agent name must not be empty");
    if (instruction.empty())
      throw permanent_error("agent " + name + " has an empty instruction");
  }
};

/// Ordered header -> body pairs split out of a response.
struct SectionMap {
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& header) const {
    for (const auto& [h, body] : entries)
      if (h == header) return &body;
    return nullptr;
  }

  bool contains(const std::string& header) const {
    return find(header) != nullptr;
  }
};

/// Splits raw model output on level-2 headers. Text before the first
/// header is kept under the empty key so nothing is dropped.
inline SectionMap extract_sections(const std::string& raw) {
  SectionMap map;
  std::string current_header;
  std::string current_body;
  bool any = false;
  size_t pos = 0;
  while (pos <= raw.size()) {
    size_t eol = raw.find('\n', pos);
    std::string line = raw.substr(
        pos, eol == std::string::npos ? std::string::npos : eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool is_header =
        line.rfind("## ", 0) == 0 && line.rfind("###", 0) != 0;
    if (is_header) {
      if (any || !trim(current_body).empty())
        map.entries.emplace_back(current_header, current_body);
      current_header = trim(line.substr(3));
      current_body.clear();
      any = true;
    } else {
      current_body += line;
      current_body += '\n';
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  if (any || !trim(current_body).empty())
    map.entries.emplace_back(current_header, current_body);
  return map;
}

/// What one agent produced, with its response already sectioned.
struct AgentOutput {
  std::string agent_name;
  std::string raw_text;
  SectionMap sections;
  FinishReason finish_reason = FinishReason::complete;
  std::vector<std::string> missing_sections;
  int attempts = 1;
};

enum class EventKind { started, completed, failed, retried, tool_invoked };

inline const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::started: return "started";
    case EventKind::completed: return "completed";
    case EventKind::failed: return "failed";
    case EventKind::retried: return "retried";
    case EventKind::tool_invoked: return "tool_invoked";
  }
  return "unknown";
}

struct RunEvent {
  EventKind kind = EventKind::started;
  std::string agent_name;
  std::string detail;
};

using EventSink = std::function<void(const RunEvent&)>;

enum class NodeKind { leaf, sequential, parallel };

/// One level of the execution shape: a single agent, a pipeline of stages,
/// or a simultaneous fan-out whose children must not read each other.
struct CompositionNode {
  NodeKind kind = NodeKind::leaf;
  AgentSpec spec;                        // leaf only
  std::string label;                     // composite only
  std::vector<CompositionNode> children; // composite only
};

inline CompositionNode make_leaf(AgentSpec spec) {
  spec.validate();
  CompositionNode n;
  n.kind = NodeKind::leaf;
  n.spec = std::move(spec);
  return n;
}

inline CompositionNode make_composite(NodeKind kind, std::string label,
                                      std::vector<CompositionNode> children) {
  if (children.empty())
    throw permanent_error("composite node " + label +
                          " needs at least one child");
  CompositionNode n;
  n.kind = kind;
  n.label = std::move(label);
  n.children = std::move(children);
  return n;
}

inline CompositionNode make_sequential(std::string label,
                                       std::vector<CompositionNode> children) {
  return make_composite(NodeKind::sequential, std::move(label),
                        std::move(children));
}

inline CompositionNode make_parallel(std::string label,
                                     std::vector<CompositionNode> children) {
  return make_composite(NodeKind::parallel, std::move(label),
                        std::move(children));
}

struct TreeStats {
  int leaf_count = 0;
  int sequential_count = 0;
  int parallel_count = 0;
  int max_parallel_width = 0;
  int depth = 0;
};

inline void accumulate_stats(const CompositionNode& node, TreeStats& stats,
                             int depth) {
  stats.depth = std::max(stats.depth, depth);
  switch (node.kind) {
    case NodeKind::leaf:
      ++stats.leaf_count;
      return;
    case NodeKind::sequential:
      ++stats.sequential_count;
      break;
    case NodeKind::parallel:
      ++stats.parallel_count;
      stats.max_parallel_width = std::max(
          stats.max_parallel_width, static_cast<int>(node.children.size()));
      break;
  }
  for (const auto& child : node.children)
    accumulate_stats(child, stats, depth + 1);
}

inline void collect_agent_names(const CompositionNode& node,
                                std::vector<std::string>& out) {
  if (node.kind == NodeKind::leaf) {
    out.push_back(node.spec.name);
    return;
  }
  for (const auto& child : node.children) collect_agent_names(child, out);
}

}  // namespace codequal
