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

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "codequal/error.hpp"
#include "codequal/util.hpp"

namespace codequal {

struct PromptRequest {
  std::string agent_name;  // caller identity, keys scripted fixtures
  std::string system_prompt;
  std::string user_content;
  std::string model_id;
  int max_output_chars = 16000;
  double temperature = 0.0;

  void validate() const {
    if (system_prompt.empty())
      throw permanent_error("prompt request: system_prompt empty",
                            std::nullopt, ErrorDomain::provider);
    if (user_content.empty())
      throw permanent_error("prompt request: user_content empty", std::nullopt,
                            ErrorDomain::provider);
    if (max_output_chars <= 0)
      throw permanent_error("prompt request: max_output_chars must be > 0",
                            std::nullopt, ErrorDomain::provider);
  }
};

enum class FinishReason { complete, truncated, refused };

inline FinishReason finish_reason_from_string(const std::string& s) {
  if (s == "truncated") return FinishReason::truncated;
  if (s == "refused") return FinishReason::refused;
  return FinishReason::complete;
}

struct TokenUsage {
  int input_tokens = 0;
  int output_tokens = 0;
};

struct ModelResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::complete;
  TokenUsage usage;
};

/// Rough char-based token estimate; providers that report real counts
/// override it.
inline TokenUsage approximate_usage(const PromptRequest& req,
                                    const std::string& output) {
  TokenUsage u;
  u.input_tokens = static_cast<int>(
      (req.system_prompt.size() + req.user_content.size()) / 4);
  u.output_tokens = static_cast<int>(output.size() / 4);
  return u;
}

/// Pure classification of an HTTP status into a retry class: rate limits
/// and server-side failures are transient, everything else permanent.
inline ErrorKind classify_http_status(int status) {
  if (status == 429) return ErrorKind::transient;
  if (status >= 500 && status <= 599) return ErrorKind::transient;
  return ErrorKind::permanent;
}

/// Uniform boundary to a text-generation backend. Implementations perform
/// exactly one backend interaction per generate() call; retries belong to
/// the caller's runtime.
class ModelProvider {
 public:
  virtual ~ModelProvider() = default;
  virtual ModelResponse generate(const PromptRequest& req) = 0;
};

/// Deterministic provider replaying canned responses from a fixture.
///
/// Fixture format: one JSON object per line, fields
///   agent   (required) agent name the response belongs to
///   digest  (optional) fnv1a-64 hex of the request user_content; when
///           present the entry only matches requests with that digest
///   text    (required) the response body
///   finish_reason (optional) complete|truncated|refused
/// Blank lines and lines starting with '#' are skipped.
class ScriptedProvider : public ModelProvider {
 public:
  struct Entry {
    std::string agent;
    std::optional<std::string> digest;
    std::string text;
    FinishReason finish_reason = FinishReason::complete;
  };

  static ScriptedProvider from_jsonl(const std::string& jsonl) {
    ScriptedProvider p;
    int line_no = 0;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      nlohmann::json j = nlohmann::json::parse(t, nullptr, false);
      if (j.is_discarded() || !j.is_object())
        throw usage_error("fixture line " + std::to_string(line_no) +
                          ": not a JSON object");
      Entry e;
      if (!j.contains("agent") || !j["agent"].is_string())
        throw usage_error("fixture line " + std::to_string(line_no) +
                          ": missing string field 'agent'");
      e.agent = j["agent"].get<std::string>();
      if (!j.contains("text") || !j["text"].is_string())
        throw usage_error("fixture line " + std::to_string(line_no) +
                          ": missing string field 'text'");
      e.text = j["text"].get<std::string>();
      if (j.contains("digest") && j["digest"].is_string())
        e.digest = j["digest"].get<std::string>();
      if (j.contains("finish_reason") && j["finish_reason"].is_string())
        e.finish_reason =
            finish_reason_from_string(j["finish_reason"].get<std::string>());
      p.entries_.push_back(std::move(e));
    }
    return p;
  }

  static ScriptedProvider from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw usage_error("cannot open fixture file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_jsonl(buf.str());
  }

  /// Exact match on agent name; an entry carrying a digest wins over the
  /// agent's digest-less default when the digest matches.
  const Entry& scripted_lookup(const std::string& agent_name,
                               const std::string& content_digest) const {
    const Entry* fallback = nullptr;
    for (const auto& e : entries_) {
      if (e.agent != agent_name) continue;
      if (e.digest.has_value()) {
        if (*e.digest == content_digest) return e;
      } else if (fallback == nullptr) {
        fallback = &e;
      }
    }
    if (fallback) return *fallback;
    throw permanent_error("no scripted response for agent '" + agent_name +
                              "' (digest " + content_digest + ")",
                          std::nullopt, ErrorDomain::provider);
  }

  ModelResponse generate(const PromptRequest& req) override {
    req.validate();
    const Entry& e =
        scripted_lookup(req.agent_name, fnv1a64_hex(req.user_content));
    ModelResponse resp;
    resp.text = e.text;
    resp.finish_reason = e.finish_reason;
    resp.usage = approximate_usage(req, resp.text);
    return resp;
  }

  size_t entry_count() const { return entries_.size(); }

 private:
  std::vector<Entry> entries_;  // read-only after load
};

}  // namespace codequal
