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
#include <chrono>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "codequal/error.hpp"
#include "codequal/util.hpp"

namespace codequal {

/// One stored assessment session. The token index is always rebuilt from
/// the report text by the store's fixed normalizer.
struct SessionRecord {
  std::string session_id;
  std::string source_descriptor;
  std::string report_markdown;
  int64_t created_at = 0;  // seconds since the epoch
  std::multiset<std::string> token_index;
};

struct MemoryHit {
  std::string session_id;
  double relevance = 0.0;  // in [0,1]
  std::string snippet;
};

/// Volatile per-process session memory with keyword retrieval. Contents do
/// not survive process exit by design. Reads may run concurrently; writes
/// are serialized. The relevance scorer is deliberately lexical: the share
/// of distinct normalized query tokens present in the record.
class MemoryStore {
 public:
  void add_session_to_memory(const std::string& session_id,
                             const std::string& source_descriptor,
                             const std::string& report_markdown,
                             std::optional<int64_t> created_at = {}) {
    std::unique_lock lock(mutex_);
    for (const auto& rec : records_)
      if (rec.session_id == session_id)
        throw permanent_error("session id already stored: " + session_id);
    SessionRecord rec;
    rec.session_id = session_id;
    rec.source_descriptor = source_descriptor;
    rec.report_markdown = report_markdown;
    rec.created_at = created_at.value_or(now_seconds());
    auto tokens = normalize_tokens(report_markdown);
    rec.token_index =
        std::multiset<std::string>(tokens.begin(), tokens.end());
    records_.push_back(std::move(rec));
  }

  std::optional<SessionRecord> get(const std::string& session_id) const {
    std::shared_lock lock(mutex_);
    for (const auto& rec : records_)
      if (rec.session_id == session_id) return rec;
    return std::nullopt;
  }

  size_t size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
  }

  std::vector<MemoryHit> search_memory(const std::string& query,
                                       size_t k = 5) const {
    if (k < 1) throw usage_error("result count must be at least 1");
    std::set<std::string> query_tokens = token_set(query);
    if (query_tokens.empty())
      throw usage_error("query has no searchable tokens");

    std::shared_lock lock(mutex_);
    struct Scored {
      double relevance;
      int64_t created_at;
      size_t position;  // insertion order breaks created_at ties, newer wins
    };
    std::vector<Scored> scored;
    for (size_t i = 0; i < records_.size(); ++i) {
      const SessionRecord& rec = records_[i];
      size_t matched = 0;
      for (const auto& tok : query_tokens)
        if (rec.token_index.count(tok)) ++matched;
      if (matched == 0) continue;
      double relevance =
          static_cast<double>(matched) / query_tokens.size();
      scored.push_back({relevance, rec.created_at, i});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a,
                                               const Scored& b) {
      if (a.relevance != b.relevance) return a.relevance > b.relevance;
      if (a.created_at != b.created_at) return a.created_at > b.created_at;
      return a.position > b.position;
    });
    if (scored.size() > k) scored.resize(k);

    std::vector<MemoryHit> hits;
    hits.reserve(scored.size());
    for (const auto& s : scored) {
      const SessionRecord& rec = records_[s.position];
      hits.push_back(
          {rec.session_id, s.relevance, make_snippet(rec, query_tokens)});
    }
    return hits;
  }

 private:
  static int64_t now_seconds() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

  /// 160 characters of the report centered on the first query token that
  /// occurs verbatim; the report head when no token is textually findable.
  static std::string make_snippet(const SessionRecord& rec,
                                  const std::set<std::string>& query_tokens) {
    constexpr size_t kWidth = 160;
    const std::string lower = to_lower(rec.report_markdown);
    size_t anchor = std::string::npos;
    for (const auto& tok : query_tokens) {
      if (!rec.token_index.count(tok)) continue;
      size_t pos = lower.find(tok);
      if (pos != std::string::npos &&
          (anchor == std::string::npos || pos < anchor))
        anchor = pos;
    }
    if (anchor == std::string::npos) anchor = 0;
    size_t start = anchor > kWidth / 2 ? anchor - kWidth / 2 : 0;
    while (start > 0 &&
           (static_cast<unsigned char>(rec.report_markdown[start]) & 0xC0) ==
               0x80)
      --start;
    std::string snippet =
        clip_utf8(std::string_view(rec.report_markdown).substr(start),
                  kWidth);
    for (auto& c : snippet)
      if (c == '\n' || c == '\r') c = ' ';
    return snippet;
  }

  mutable std::shared_mutex mutex_;
  std::vector<SessionRecord> records_;
};

}  // namespace codequal
