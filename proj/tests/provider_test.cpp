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

#include "codequal/provider.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include "httplib.h"

#include "codequal/http_provider.hpp"
#include "testutil.hpp"

namespace codequal {
namespace {

PromptRequest sample_request(const std::string& agent = "a1",
                             const std::string& content = "hello") {
  PromptRequest req;
  req.agent_name = agent;
  req.system_prompt = "sys";
  req.user_content = content;
  req.model_id = "default";
  return req;
}

TEST(PromptRequest, ValidateRejectsEmptyFields) {
  PromptRequest req = sample_request();
  EXPECT_NO_THROW(req.validate());
  req.system_prompt.clear();
  EXPECT_THROW(req.validate(), Error);
  req = sample_request();
  req.user_content.clear();
  EXPECT_THROW(req.validate(), Error);
  req = sample_request();
  req.max_output_chars = 0;
  EXPECT_THROW(req.validate(), Error);
}

TEST(ClassifyHttpStatus, RateLimitAndServerErrorsAreTransient) {
  EXPECT_EQ(classify_http_status(429), ErrorKind::transient);
  EXPECT_EQ(classify_http_status(500), ErrorKind::transient);
  EXPECT_EQ(classify_http_status(502), ErrorKind::transient);
  EXPECT_EQ(classify_http_status(503), ErrorKind::transient);
  EXPECT_EQ(classify_http_status(599), ErrorKind::transient);
  EXPECT_EQ(classify_http_status(400), ErrorKind::permanent);
  EXPECT_EQ(classify_http_status(401), ErrorKind::permanent);
  EXPECT_EQ(classify_http_status(403), ErrorKind::permanent);
  EXPECT_EQ(classify_http_status(404), ErrorKind::permanent);
  EXPECT_EQ(classify_http_status(418), ErrorKind::permanent);
}

TEST(FinishReason, FromString) {
  EXPECT_EQ(finish_reason_from_string("complete"), FinishReason::complete);
  EXPECT_EQ(finish_reason_from_string("truncated"), FinishReason::truncated);
  EXPECT_EQ(finish_reason_from_string("refused"), FinishReason::refused);
  EXPECT_EQ(finish_reason_from_string("???"), FinishReason::complete);
}

TEST(ApproximateUsage, CharQuarter) {
  PromptRequest req = sample_request();
  req.system_prompt = std::string(40, 's');
  req.user_content = std::string(40, 'u');
  TokenUsage u = approximate_usage(req, std::string(100, 'o'));
  EXPECT_EQ(u.input_tokens, 20);
  EXPECT_EQ(u.output_tokens, 25);
}

TEST(ScriptedProvider, ParsesEntriesSkippingCommentsAndBlanks) {
  std::string jsonl =
      "# comment\n"
      "\n"
      R"({"agent": "a1", "text": "T1"})" "\n"
      R"({"agent": "a2", "text": "T2", "finish_reason": "truncated"})" "\n";
  auto p = ScriptedProvider::from_jsonl(jsonl);
  EXPECT_EQ(p.entry_count(), 2u);
  auto resp = p.generate(sample_request("a1"));
  EXPECT_EQ(resp.text, "T1");
  EXPECT_EQ(resp.finish_reason, FinishReason::complete);
  resp = p.generate(sample_request("a2"));
  EXPECT_EQ(resp.text, "T2");
  EXPECT_EQ(resp.finish_reason, FinishReason::truncated);
}

TEST(ScriptedProvider, RejectsMalformedLinesWithLineNumbers) {
  try {
    ScriptedProvider::from_jsonl("{\"agent\": \"a\", \"text\": \"t\"}\nnot json\n");
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.domain(), ErrorDomain::usage);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(ScriptedProvider::from_jsonl(R"({"text": "no agent"})"),
               Error);
  EXPECT_THROW(ScriptedProvider::from_jsonl(R"({"agent": "a"})"), Error);
  EXPECT_THROW(ScriptedProvider::from_jsonl("[1,2]\n"), Error);
}

TEST(ScriptedProvider, DigestMatchBeatsFallback) {
  std::string digest = fnv1a64_hex("special content");
  std::string jsonl =
      R"({"agent": "a1", "text": "generic"})" "\n" +
      std::string(R"({"agent": "a1", "digest": ")") + digest +
      R"(", "text": "specific"})" "\n";
  auto p = ScriptedProvider::from_jsonl(jsonl);
  EXPECT_EQ(p.generate(sample_request("a1", "special content")).text,
            "specific");
  EXPECT_EQ(p.generate(sample_request("a1", "other content")).text,
            "generic");
}

TEST(ScriptedProvider, DigestOnlyEntryDoesNotLeakToOtherContent) {
  std::string digest = fnv1a64_hex("only this");
  std::string jsonl = std::string(R"({"agent": "a1", "digest": ")") +
                      digest + R"(", "text": "pinned"})" "\n";
  auto p = ScriptedProvider::from_jsonl(jsonl);
  EXPECT_EQ(p.generate(sample_request("a1", "only this")).text, "pinned");
  try {
    p.generate(sample_request("a1", "something else"));
    FAIL() << "expected miss";
  } catch (const Error& e) {
    EXPECT_FALSE(e.transient());
    EXPECT_EQ(e.domain(), ErrorDomain::provider);
    EXPECT_NE(std::string(e.what()).find("a1"), std::string::npos);
  }
}

TEST(ScriptedProvider, MissIsPermanentProviderError) {
  auto p = ScriptedProvider::from_jsonl(R"({"agent": "a1", "text": "t"})");
  try {
    p.generate(sample_request("nobody"));
    FAIL() << "expected miss";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::permanent);
    EXPECT_EQ(e.domain(), ErrorDomain::provider);
  }
}

TEST(ScriptedProvider, FromFileLoadsFixture) {
  auto p = ScriptedProvider::from_file(
      testing::fixture_path("scripted_basic.jsonl").string());
  EXPECT_EQ(p.entry_count(), 5u);
  auto resp = p.generate(sample_request("description_generator", "x"));
  EXPECT_NE(resp.text.find("## Summary"), std::string::npos);
}

TEST(ScriptedProvider, FromFileMissingPathIsUsageError) {
  try {
    ScriptedProvider::from_file("/nonexistent/fixture.jsonl");
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.domain(), ErrorDomain::usage);
  }
}

class StubServer {
 public:
  StubServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string endpoint() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(HttpProvider, RoundTripsRequestAndResponse) {
  StubServer stub;
  std::string seen_body;
  std::string seen_auth;
  stub.server().Post("/v1/generate", [&](const httplib::Request& req,
                                         httplib::Response& res) {
    seen_body = req.body;
    seen_auth = req.get_header_value("Authorization");
    res.set_content(R"({"text": "## Summary\nok", "finish_reason": "complete"})",
                    "application/json");
  });

  ::setenv("CODEQUAL_TEST_KEY", "sekrit", 1);
  HttpProviderConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.api_key_env = "CODEQUAL_TEST_KEY";
  HttpProvider provider(cfg);

  auto resp = provider.generate(sample_request("a1", "the content"));
  EXPECT_EQ(resp.text, "## Summary\nok");
  EXPECT_EQ(resp.finish_reason, FinishReason::complete);
  EXPECT_EQ(seen_auth, "Bearer sekrit");

  auto body = nlohmann::json::parse(seen_body);
  EXPECT_EQ(body["model"], "default");
  EXPECT_EQ(body["system"], "sys");
  EXPECT_EQ(body["input"], "the content");
  EXPECT_EQ(body["temperature"], 0.0);
  ::unsetenv("CODEQUAL_TEST_KEY");
}

TEST(HttpProvider, NoAuthHeaderWithoutKey) {
  StubServer stub;
  bool had_auth = true;
  stub.server().Post("/v1/generate", [&](const httplib::Request& req,
                                         httplib::Response& res) {
    had_auth = req.has_header("Authorization");
    res.set_content(R"({"text": "ok"})", "application/json");
  });
  HttpProviderConfig cfg;
  cfg.endpoint = stub.endpoint();
  cfg.api_key_env = "CODEQUAL_UNSET_KEY_VAR";
  HttpProvider provider(cfg);
  provider.generate(sample_request());
  EXPECT_FALSE(had_auth);
}

TEST(HttpProvider, StatusClassification) {
  StubServer stub;
  std::atomic<int> status{429};
  stub.server().Post("/v1/generate", [&](const httplib::Request&,
                                         httplib::Response& res) {
    res.status = status.load();
    res.set_content("slow down", "text/plain");
  });
  HttpProviderConfig cfg;
  cfg.endpoint = stub.endpoint();
  HttpProvider provider(cfg);

  try {
    provider.generate(sample_request());
    FAIL() << "expected 429 throw";
  } catch (const Error& e) {
    EXPECT_TRUE(e.transient());
    EXPECT_EQ(e.http_status(), std::optional<int>(429));
    EXPECT_EQ(e.domain(), ErrorDomain::provider);
  }

  status = 500;
  try {
    provider.generate(sample_request());
    FAIL() << "expected 500 throw";
  } catch (const Error& e) {
    EXPECT_TRUE(e.transient());
  }

  status = 400;
  try {
    provider.generate(sample_request());
    FAIL() << "expected 400 throw";
  } catch (const Error& e) {
    EXPECT_FALSE(e.transient());
    EXPECT_EQ(e.http_status(), std::optional<int>(400));
  }
}

TEST(HttpProvider, MalformedAndEmptyBodiesArePermanent) {
  StubServer stub;
  std::atomic<int> mode{0};
  stub.server().Post("/v1/generate", [&](const httplib::Request&,
                                         httplib::Response& res) {
    switch (mode.load()) {
      case 0: res.set_content("not json", "text/plain"); break;
      case 1: res.set_content(R"({"no_text": 1})", "application/json"); break;
      default:
        res.set_content(R"({"text": ""})", "application/json");
    }
  });
  HttpProviderConfig cfg;
  cfg.endpoint = stub.endpoint();
  HttpProvider provider(cfg);

  for (int m = 0; m < 3; ++m) {
    mode = m;
    try {
      provider.generate(sample_request());
      FAIL() << "expected throw for mode " << m;
    } catch (const Error& e) {
      EXPECT_FALSE(e.transient()) << "mode " << m;
      EXPECT_EQ(e.domain(), ErrorDomain::provider);
    }
  }
}

TEST(HttpProvider, ConnectionFailureIsTransient) {
  HttpProviderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1";  // nothing listens here
  cfg.timeout_seconds = 1.0;
  HttpProvider provider(cfg);
  try {
    provider.generate(sample_request());
    FAIL() << "expected connection failure";
  } catch (const Error& e) {
    EXPECT_TRUE(e.transient());
    EXPECT_EQ(e.domain(), ErrorDomain::provider);
  }
}

TEST(HttpProvider, ConfigValidation) {
  HttpProviderConfig cfg;
  EXPECT_THROW(HttpProvider{cfg}, Error);  // endpoint empty
  cfg.endpoint = "http://x";
  cfg.path = "no-slash";
  EXPECT_THROW(HttpProvider{cfg}, Error);
}

}  // namespace
}  // namespace codequal
