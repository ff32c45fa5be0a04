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
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "codequal/error.hpp"
#include "codequal/util.hpp"

namespace codequal {

enum class Modality { file, directory, repo_url };

struct SourceSpec {
  Modality modality = Modality::file;
  std::string locator;  // path as given, or the original URL
  std::string owner;    // repo_url only
  std::string repo;     // repo_url only
  std::optional<std::string> ref;
};

/// One source file: the unit of per-file assessment.
struct CodeUnit {
  std::string rel_path;
  std::string content;
  int line_count = 0;
  size_t byte_size = 0;
  std::string language_tag;
};

/// Line-aligned slice of a unit sized to a prompt budget. Consecutive
/// chunks share exactly `overlap_lines` lines so continuity survives the
/// cut; stripping that prefix from every chunk after the first and
/// concatenating reproduces the unit byte-for-byte.
struct Chunk {
  std::string unit_path;
  int index = 0;       // 0-based
  int start_line = 1;  // 1-based inclusive
  int end_line = 1;
  std::string content;
};

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct IngestOptions {
  std::set<std::string> extensions{".py"};
  std::vector<std::string> ignore_dirs{".git",        "__pycache__",
                                       ".venv",       "venv",
                                       "node_modules", ".tox",
                                       ".mypy_cache", "build",
                                       "dist",        ".eggs"};
  size_t max_file_bytes = 1 << 20;
};

inline std::string language_tag_for(const std::string& rel_path) {
  auto pos = rel_path.rfind('.');
  if (pos == std::string::npos) return "text";
  std::string ext = to_lower(rel_path.substr(pos));
  if (ext == ".py" || ext == ".pyi") return "python";
  if (ext == ".js") return "javascript";
  if (ext == ".ts") return "typescript";
  if (ext == ".sh") return "shell";
  return ext.substr(1);
}

inline CodeUnit make_unit(std::string rel_path, std::string content) {
  CodeUnit u;
  u.rel_path = std::move(rel_path);
  u.line_count = count_lines(content);
  u.byte_size = content.size();
  u.language_tag = language_tag_for(u.rel_path);
  u.content = std::move(content);
  return u;
}

/// Classifies raw user input: a URL with a recognized repository-host shape
/// becomes repo_url, an existing directory or file its own modality.
inline SourceSpec resolve_input(const std::string& raw) {
  std::string t = trim(raw);
  if (t.empty()) throw ingestion_error(ErrorKind::permanent, "empty target");

  bool is_url = t.rfind("http://", 0) == 0 || t.rfind("https://", 0) == 0;
  if (is_url) {
    size_t scheme_end = t.find("://") + 3;
    size_t host_end = t.find('/', scheme_end);
    std::string host = to_lower(
        t.substr(scheme_end, host_end == std::string::npos
                                 ? std::string::npos
                                 : host_end - scheme_end));
    if (host != "github.com" && host != "www.github.com")
      throw ingestion_error(ErrorKind::permanent,
                            "unsupported repository host: " + host);
    if (host_end == std::string::npos)
      throw ingestion_error(ErrorKind::permanent,
                            "repository URL missing owner/name: " + t);
    std::vector<std::string> segs;
    for (auto& s : split(t.substr(host_end + 1), '/'))
      if (!s.empty()) segs.push_back(s);
    if (segs.size() < 2)
      throw ingestion_error(ErrorKind::permanent,
                            "repository URL missing owner/name: " + t);
    SourceSpec spec;
    spec.modality = Modality::repo_url;
    spec.locator = t;
    spec.owner = segs[0];
    spec.repo = segs[1];
    if (spec.repo.size() > 4 &&
        spec.repo.substr(spec.repo.size() - 4) == ".git")
      spec.repo.resize(spec.repo.size() - 4);
    if (segs.size() >= 4 && segs[2] == "tree") spec.ref = segs[3];
    return spec;
  }

  std::filesystem::path p(t);
  std::error_code ec;
  if (std::filesystem::is_directory(p, ec)) {
    return SourceSpec{Modality::directory, t, "", "", std::nullopt};
  }
  if (std::filesystem::is_regular_file(p, ec)) {
    return SourceSpec{Modality::file, t, "", "", std::nullopt};
  }
  throw ingestion_error(ErrorKind::permanent,
                        "target does not exist and is not a URL: " + t);
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw ingestion_error(ErrorKind::permanent,
                          "cannot read file: " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Single-file modality: the unit's rel_path is the bare filename.
inline CodeUnit read_file_unit(const std::filesystem::path& p) {
  std::string content = read_text_file(p);
  if (!is_valid_utf8(content))
    throw ingestion_error(ErrorKind::permanent,
                          "file is not valid UTF-8 text: " + p.string());
  return make_unit(p.filename().string(), std::move(content));
}

struct DirectoryScan {
  std::vector<CodeUnit> units;     // sorted by rel_path
  std::vector<SkippedFile> skipped;
};

inline bool directory_ignored(const std::string& name,
                              const IngestOptions& opts) {
  if (!name.empty() && name[0] == '.') return true;
  return std::find(opts.ignore_dirs.begin(), opts.ignore_dirs.end(), name) !=
         opts.ignore_dirs.end();
}

/// Recursive enumeration with a total, stable order (sorted rel_path).
/// Per-file problems land in `skipped`, never abort the scan.
inline DirectoryScan enumerate_directory(const std::filesystem::path& root,
                                         const IngestOptions& opts = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec))
    throw ingestion_error(ErrorKind::permanent,
                          "not a readable directory: " + root.string());

  DirectoryScan scan;
  fs::recursive_directory_iterator it(
      root, fs::directory_options::skip_permission_denied, ec);
  if (ec)
    throw ingestion_error(ErrorKind::permanent,
                          "cannot open directory: " + root.string());
  fs::recursive_directory_iterator end;
  for (; it != end; it.increment(ec)) {
    if (ec) break;
    const fs::directory_entry& entry = *it;
    std::string name = entry.path().filename().string();
    if (entry.is_directory(ec)) {
      if (directory_ignored(name, opts)) it.disable_recursion_pending();
      continue;
    }
    if (!entry.is_regular_file(ec)) continue;
    std::string ext = to_lower(entry.path().extension().string());
    if (opts.extensions.find(ext) == opts.extensions.end()) continue;
    std::string rel =
        fs::relative(entry.path(), root, ec).generic_string();
    if (ec) rel = entry.path().generic_string();
    uintmax_t size = entry.file_size(ec);
    if (!ec && size > opts.max_file_bytes) {
      scan.skipped.push_back({rel, "exceeds size cap"});
      continue;
    }
    std::string content;
    try {
      content = read_text_file(entry.path());
    } catch (const Error& e) {
      scan.skipped.push_back({rel, e.what()});
      continue;
    }
    if (content.find('\0') != std::string::npos ||
        !is_valid_utf8(content)) {
      scan.skipped.push_back({rel, "not valid UTF-8 text"});
      continue;
    }
    scan.units.push_back(make_unit(rel, std::move(content)));
  }
  std::sort(scan.units.begin(), scan.units.end(),
            [](const CodeUnit& a, const CodeUnit& b) {
              return a.rel_path < b.rel_path;
            });
  std::sort(scan.skipped.begin(), scan.skipped.end(),
            [](const SkippedFile& a, const SkippedFile& b) {
              return a.path < b.path;
            });
  return scan;
}

/// Greedy line packing: every chunk is the maximal prefix of remaining
/// lines whose total size fits max_chars; the next chunk starts
/// overlap_lines before the previous end. Never splits inside a line.
inline std::vector<Chunk> chunk_unit(const CodeUnit& unit, size_t max_chars,
                                     int overlap_lines) {
  if (overlap_lines < 0)
    throw permanent_error("overlap_lines must be >= 0");
  std::vector<std::string> lines = split_lines_keep_ends(unit.content);

  if (unit.content.size() <= max_chars) {
    Chunk c;
    c.unit_path = unit.rel_path;
    c.index = 0;
    c.start_line = 1;
    c.end_line = std::max<int>(1, static_cast<int>(lines.size()));
    c.content = unit.content;
    return {c};
  }

  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].size() > max_chars)
      throw permanent_error("line " + std::to_string(i + 1) + " of " +
                            unit.rel_path + " exceeds the chunk budget (" +
                            std::to_string(lines[i].size()) + " > " +
                            std::to_string(max_chars) + " chars)");
  }

  std::vector<Chunk> chunks;
  size_t n = lines.size();
  size_t start = 0;  // 0-based line index
  while (start < n) {
    size_t total = 0;
    size_t end = start;
    while (end < n && total + lines[end].size() <= max_chars) {
      total += lines[end].size();
      ++end;
    }
    Chunk c;
    c.unit_path = unit.rel_path;
    c.index = static_cast<int>(chunks.size());
    c.start_line = static_cast<int>(start + 1);
    c.end_line = static_cast<int>(end);
    for (size_t i = start; i < end; ++i) c.content += lines[i];
    chunks.push_back(std::move(c));
    if (end >= n) break;
    size_t next = end - static_cast<size_t>(std::min<size_t>(
                            static_cast<size_t>(overlap_lines), end));
    if (next <= start)
      throw permanent_error(
          "chunk overlap of " + std::to_string(overlap_lines) +
          " lines cannot make progress at line " + std::to_string(end + 1) +
          " of " + unit.rel_path + "; raise max_chars or lower the overlap");
    start = next;
  }
  return chunks;
}

}  // namespace codequal
