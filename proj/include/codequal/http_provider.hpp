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

#include <cstdlib>
#include <memory>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "codequal/error.hpp"
#include "codequal/provider.hpp"

namespace codequal {

struct HttpProviderConfig {
  std::string endpoint;               // scheme://host[:port]
  std::string path = "/v1/generate";
  std::string api_key_env = "MODEL_API_KEY";
  double timeout_seconds = 60.0;

  void validate() const {
    if (endpoint.empty())
      throw permanent_error("provider.endpoint must be set for live mode");
    if (path.empty() || path.front() != '/')
      throw permanent_error("provider.path must start with '/'");
  }
};

/// Live text-generation backend speaking a small JSON protocol: one POST
/// per generate call, no internal retries or sleeps (the runtime owns
/// those). Request: {model, system, input, max_output_chars, temperature}.
/// Response: {text, finish_reason?}.
class HttpProvider : public ModelProvider {
 public:
  explicit HttpProvider(HttpProviderConfig config)
      : config_(std::move(config)) {
    config_.validate();
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key != nullptr) api_key_ = key;
  }

  ModelResponse generate(const PromptRequest& request) override {
    request.validate();

    nlohmann::json body{{"model", request.model_id},
                        {"system", request.system_prompt},
                        {"input", request.user_content},
                        {"max_output_chars", request.max_output_chars},
                        {"temperature", request.temperature}};

    httplib::Client client(config_.endpoint);
    auto seconds = static_cast<time_t>(config_.timeout_seconds);
    client.set_connection_timeout(seconds, 0);
    client.set_read_timeout(seconds, 0);
    client.set_write_timeout(seconds, 0);
    httplib::Headers headers;
    if (!api_key_.empty())
      headers.emplace("Authorization", "Bearer " + api_key_);

    auto result = client.Post(config_.path, headers, body.dump(),
                              "application/json");
    if (!result)
      throw transient_error(
          "generation request failed: " + httplib::to_string(result.error()),
          std::nullopt, ErrorDomain::provider);
    if (result->status != 200)
      throw Error(classify_http_status(result->status),
                  "generation endpoint returned status " +
                      std::to_string(result->status) + ": " +
                      result->body.substr(0, 200),
                  result->status, ErrorDomain::provider);

    nlohmann::json doc =
        nlohmann::json::parse(result->body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") ||
        !doc["text"].is_string())
      throw Error(ErrorKind::permanent,
                  "generation endpoint returned malformed JSON",
                  result->status, ErrorDomain::provider);

    ModelResponse response;
    response.text = doc["text"].get<std::string>();
    std::string reason = doc.value("finish_reason", "complete");
    if (reason == "truncated")
      response.finish_reason = FinishReason::truncated;
    else if (reason == "refused")
      response.finish_reason = FinishReason::refused;
    else
      response.finish_reason = FinishReason::complete;
    if (response.text.empty() &&
        response.finish_reason == FinishReason::complete)
      throw Error(ErrorKind::permanent,
                  "generation endpoint returned empty text",
                  result->status, ErrorDomain::provider);
    response.usage = approximate_usage(request, response.text);
    return response;
  }

 private:
  HttpProviderConfig config_;
  std::string api_key_;
};

}  // namespace codequal
