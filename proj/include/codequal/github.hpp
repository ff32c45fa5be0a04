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
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "codequal/error.hpp"
#include "codequal/ingest.hpp"
#include "codequal/provider.hpp"
#include "codequal/retry.hpp"
#include "codequal/util.hpp"

namespace codequal {

struct RepoFetchOptions {
  std::string api_base = "https://api.github.com";
  std::string token;  // usually from GITHUB_TOKEN
  IngestOptions ingest;
  RetryPolicy retry;
  uint64_t retry_seed = 0;
  SleepFn sleep = real_sleep;
  double timeout_seconds = 30.0;
};

struct RepoFetch {
  std::vector<CodeUnit> units;  // sorted by rel_path
  std::vector<SkippedFile> skipped;
  std::string resolved_ref;
};

namespace internal_github {

inline bool rate_limited(const httplib::Response& res) {
  if (res.status != 403 && res.status != 429) return false;
  auto remaining = res.get_header_value("X-RateLimit-Remaining");
  return remaining == "0";
}

/// Directory components that exclude a tree entry from assessment; the
/// final segment is the filename and does not count.
inline bool path_ignored(const std::string& path, const IngestOptions& opts) {
  auto segs = split(path, '/');
  for (size_t i = 0; i + 1 < segs.size(); ++i)
    if (!segs[i].empty() && directory_ignored(segs[i], opts)) return true;
  return false;
}

}  // namespace internal_github

/// Read-only client for a hosted-repository REST API. Every call is a
/// single request; callers hold the retry policy. Errors carry the
/// ingestion domain so exit mapping stays uniform.
class RepoApiClient {
 public:
  explicit RepoApiClient(const RepoFetchOptions& options)
      : options_(options) {}

  nlohmann::json get_json(const std::string& path) const {
    httplib::Client client(options_.api_base);
    auto seconds = static_cast<time_t>(options_.timeout_seconds);
    client.set_connection_timeout(seconds, 0);
    client.set_read_timeout(seconds, 0);
    client.set_follow_location(true);
    httplib::Headers headers{{"Accept", "application/vnd.github+json"},
                             {"User-Agent", "codequal"}};
    if (!options_.token.empty())
      headers.emplace("Authorization", "Bearer " + options_.token);

    auto result = client.Get(path, headers);
    if (!result)
      throw ingestion_error(ErrorKind::transient,
                            "repository API request failed: " +
                                httplib::to_string(result.error()));
    if (internal_github::rate_limited(*result)) {
      std::string reset = result->get_header_value("X-RateLimit-Reset");
      throw ingestion_error(
          ErrorKind::transient,
          "repository API rate limit exhausted" +
              (reset.empty() ? std::string()
                             : " (resets at epoch " + reset + ")"),
          result->status);
    }
    if (result->status != 200)
      throw ingestion_error(classify_http_status(result->status),
                            "repository API returned status " +
                                std::to_string(result->status) + " for " +
                                path,
                            result->status);
    nlohmann::json doc = nlohmann::json::parse(result->body, nullptr, false);
    if (doc.is_discarded())
      throw ingestion_error(ErrorKind::permanent,
                            "repository API returned invalid JSON for " +
                                path);
    return doc;
  }

 private:
  const RepoFetchOptions& options_;
};

/// Fetches assessable source files from a remote repository: metadata for
/// the default branch, the recursive tree, then each matching blob.
/// Individual requests are retried under the configured policy; rate-limit
/// responses classify as transient so the retry schedule absorbs them.
inline RepoFetch fetch_repo(const SourceSpec& spec,
                            const RepoFetchOptions& options = {}) {
  if (spec.modality != Modality::repo_url)
    throw ingestion_error(ErrorKind::permanent,
                          "fetch_repo requires a repository URL source");
  RepoApiClient client(options);
  auto get_with_retry = [&](const std::string& path) {
    return with_retry([&] { return client.get_json(path); }, options.retry,
                      options.retry_seed ^ fnv1a64(path), options.sleep);
  };

  const std::string repo_root = "/repos/" + spec.owner + "/" + spec.repo;

  std::string ref;
  if (spec.ref.has_value()) {
    ref = *spec.ref;
  } else {
    nlohmann::json meta = get_with_retry(repo_root);
    ref = meta.value("default_branch", "");
    if (ref.empty())
      throw ingestion_error(ErrorKind::permanent,
                            "repository metadata lacks a default branch");
  }

  nlohmann::json tree =
      get_with_retry(repo_root + "/git/trees/" + ref + "?recursive=1");
  if (!tree.contains("tree") || !tree["tree"].is_array())
    throw ingestion_error(ErrorKind::permanent,
                          "repository tree response lacks a 'tree' array");

  RepoFetch fetch;
  fetch.resolved_ref = ref;
  if (tree.value("truncated", false))
    fetch.skipped.push_back(
        {"(tree)", "listing truncated by the API; some files not seen"});

  for (const auto& entry : tree["tree"]) {
    if (!entry.is_object()) continue;
    if (entry.value("type", "") != "blob") continue;
    std::string path = entry.value("path", "");
    if (path.empty()) continue;
    auto dot = path.rfind('.');
    std::string ext =
        dot == std::string::npos ? "" : to_lower(path.substr(dot));
    if (options.ingest.extensions.find(ext) ==
        options.ingest.extensions.end())
      continue;
    if (internal_github::path_ignored(path, options.ingest)) continue;
    uint64_t size = entry.value("size", uint64_t{0});
    if (size > options.ingest.max_file_bytes) {
      fetch.skipped.push_back({path, "exceeds size cap"});
      continue;
    }
    std::string sha = entry.value("sha", "");
    if (sha.empty()) {
      fetch.skipped.push_back({path, "tree entry lacks a blob id"});
      continue;
    }

    nlohmann::json blob = get_with_retry(repo_root + "/git/blobs/" + sha);
    std::string encoding = blob.value("encoding", "");
    std::string raw = blob.value("content", "");
    std::string content;
    if (encoding == "base64") {
      if (!base64_decode(raw, content)) {
        fetch.skipped.push_back({path, "blob content is not valid base64"});
        continue;
      }
    } else if (encoding == "utf-8" || encoding == "none") {
      content = raw;
    } else {
      fetch.skipped.push_back({path, "unsupported blob encoding: " +
                                         encoding});
      continue;
    }
    if (content.find('\0') != std::string::npos || !is_valid_utf8(content)) {
      fetch.skipped.push_back({path, "not valid UTF-8 text"});
      continue;
    }
    fetch.units.push_back(make_unit(path, std::move(content)));
  }

  std::sort(fetch.units.begin(), fetch.units.end(),
            [](const CodeUnit& a, const CodeUnit& b) {
              return a.rel_path < b.rel_path;
            });
  std::sort(fetch.skipped.begin(), fetch.skipped.end(),
            [](const SkippedFile& a, const SkippedFile& b) {
              return a.path < b.path;
            });
  return fetch;
}

}  // namespace codequal
