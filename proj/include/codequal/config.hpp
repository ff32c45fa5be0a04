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
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "codequal/error.hpp"
#include "codequal/findings.hpp"
#include "codequal/ingest.hpp"
#include "codequal/lint.hpp"
#include "codequal/retry.hpp"
#include "codequal/util.hpp"

namespace codequal {

struct OutputFormats {
  bool markdown = true;
  bool html = true;
};

/// Full runtime configuration. Precedence, lowest to highest: built-in
/// defaults, config file, CODEQUAL_<SECTION>_<KEY> environment variables,
/// command-line flags.
struct Config {
  // [provider]
  std::string provider_mode = "scripted";  // scripted | live
  std::string model_id = "default";
  std::string endpoint;
  std::string endpoint_path = "/v1/generate";
  std::string api_key_env = "MODEL_API_KEY";
  double temperature = 0.0;
  int max_output_chars = 16000;
  double provider_timeout_seconds = 60.0;
  std::string fixtures_path;

  // [linter]
  bool lint_enabled = true;
  LintOptions lint;

  // [chunking]
  size_t chunk_max_chars = 24000;
  int chunk_overlap_lines = 10;

  // [ingestion]
  IngestOptions ingest;

  // [concurrency]
  int unit_workers = 2;
  int download_workers = 2;

  // [retry]
  RetryPolicy retry;
  uint64_t retry_seed = 0;

  // [github]
  std::string github_api_base = "https://api.github.com";

  // [output]
  std::string out_dir = ".";
  OutputFormats formats;

  // [memory]
  bool remember = false;

  // [security]
  SecurityRules security;

  void validate() const {
    if (provider_mode != "scripted" && provider_mode != "live")
      throw usage_error("provider.mode must be 'scripted' or 'live', got '" +
                        provider_mode + "'");
    if (model_id.empty()) throw usage_error("provider.model_id must be set");
    if (temperature < 0.0 || temperature > 2.0)
      throw usage_error("provider.temperature must be in [0,2]");
    if (max_output_chars <= 0)
      throw usage_error("provider.max_output_chars must be positive");
    if (provider_timeout_seconds <= 0.0)
      throw usage_error("provider.timeout_seconds must be positive");
    if (lint.timeout_seconds <= 0.0)
      throw usage_error("linter.timeout_seconds must be positive");
    if (lint.command.empty()) throw usage_error("linter.command must be set");
    if (chunk_max_chars == 0)
      throw usage_error("chunking.max_chars must be positive");
    if (chunk_overlap_lines < 0)
      throw usage_error("chunking.overlap_lines must be >= 0");
    if (ingest.extensions.empty())
      throw usage_error("ingestion.extensions must not be empty");
    if (ingest.max_file_bytes == 0)
      throw usage_error("ingestion.max_file_bytes must be positive");
    if (unit_workers < 1)
      throw usage_error("concurrency.unit_workers must be >= 1");
    if (download_workers < 1)
      throw usage_error("concurrency.download_workers must be >= 1");
    try {
      retry.validate();
    } catch (const Error& e) {
      throw usage_error(std::string("retry config invalid: ") + e.what());
    }
    if (!formats.markdown && !formats.html)
      throw usage_error("output.formats must include at least one format");
    if (out_dir.empty()) throw usage_error("output.dir must be set");
  }
};

namespace internal_config {

inline bool parse_bool(const std::string& section_key,
                       const std::string& value) {
  std::string v = to_lower(trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw usage_error(section_key + ": expected a boolean, got '" + value +
                    "'");
}

inline double parse_double(const std::string& section_key,
                           const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(trim(value), &used);
    if (used != trim(value).size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw usage_error(section_key + ": expected a number, got '" + value +
                      "'");
  }
}

inline long long parse_int(const std::string& section_key,
                           const std::string& value) {
  try {
    size_t used = 0;
    long long v = std::stoll(trim(value), &used);
    if (used != trim(value).size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw usage_error(section_key + ": expected an integer, got '" + value +
                      "'");
  }
}

/// Splits on commas and whitespace, dropping empties.
inline std::vector<std::string> parse_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : value) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline OutputFormats parse_formats(const std::string& section_key,
                                   const std::string& value) {
  std::string v = to_lower(trim(value));
  if (v == "md" || v == "markdown") return {true, false};
  if (v == "html") return {false, true};
  if (v == "both") return {true, true};
  throw usage_error(section_key + ": expected md, html, or both, got '" +
                    value + "'");
}

}  // namespace internal_config

/// Applies one (section, key) = value assignment. Shared by the file
/// loader and the environment override pass so precedence is purely a
/// matter of application order. Unknown keys are usage errors.
inline void apply_config_value(Config& cfg, const std::string& section,
                               const std::string& key,
                               const std::string& value) {
  using namespace internal_config;
  const std::string sk = section + "." + key;

  if (section == "provider") {
    if (key == "mode") cfg.provider_mode = to_lower(trim(value));
    else if (key == "model_id") cfg.model_id = trim(value);
    else if (key == "endpoint") cfg.endpoint = trim(value);
    else if (key == "path") cfg.endpoint_path = trim(value);
    else if (key == "api_key_env") cfg.api_key_env = trim(value);
    else if (key == "temperature") cfg.temperature = parse_double(sk, value);
    else if (key == "max_output_chars")
      cfg.max_output_chars = static_cast<int>(parse_int(sk, value));
    else if (key == "timeout_seconds")
      cfg.provider_timeout_seconds = parse_double(sk, value);
    else if (key == "fixtures") cfg.fixtures_path = trim(value);
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "linter") {
    if (key == "command") cfg.lint.command = trim(value);
    else if (key == "args") cfg.lint.extra_args = parse_list(value);
    else if (key == "timeout_seconds")
      cfg.lint.timeout_seconds = parse_double(sk, value);
    else if (key == "required") cfg.lint.required = parse_bool(sk, value);
    else if (key == "enabled") cfg.lint_enabled = parse_bool(sk, value);
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "chunking") {
    if (key == "max_chars")
      cfg.chunk_max_chars = static_cast<size_t>(parse_int(sk, value));
    else if (key == "overlap_lines")
      cfg.chunk_overlap_lines = static_cast<int>(parse_int(sk, value));
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "ingestion") {
    if (key == "extensions") {
      cfg.ingest.extensions.clear();
      for (auto ext : parse_list(value)) {
        if (!ext.empty() && ext.front() != '.') ext = "." + ext;
        cfg.ingest.extensions.insert(to_lower(ext));
      }
    } else if (key == "ignore_dirs") {
      cfg.ingest.ignore_dirs = parse_list(value);
    } else if (key == "max_file_bytes") {
      cfg.ingest.max_file_bytes =
          static_cast<size_t>(parse_int(sk, value));
    } else {
      throw usage_error("unknown config key: " + sk);
    }
  } else if (section == "concurrency") {
    if (key == "unit_workers")
      cfg.unit_workers = static_cast<int>(parse_int(sk, value));
    else if (key == "download_workers")
      cfg.download_workers = static_cast<int>(parse_int(sk, value));
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "retry") {
    if (key == "max_attempts")
      cfg.retry.max_attempts = static_cast<int>(parse_int(sk, value));
    else if (key == "base_delay")
      cfg.retry.base_delay = parse_double(sk, value);
    else if (key == "multiplier")
      cfg.retry.multiplier = parse_double(sk, value);
    else if (key == "jitter") cfg.retry.jitter = parse_double(sk, value);
    else if (key == "seed")
      cfg.retry_seed = static_cast<uint64_t>(parse_int(sk, value));
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "github") {
    if (key == "api_base") cfg.github_api_base = trim(value);
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "output") {
    if (key == "dir") cfg.out_dir = trim(value);
    else if (key == "formats") cfg.formats = parse_formats(sk, value);
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "memory") {
    if (key == "remember") cfg.remember = parse_bool(sk, value);
    else throw usage_error("unknown config key: " + sk);
  } else if (section == "security") {
    if (key == "keywords") {
      cfg.security.keywords.clear();
      for (const auto& kw : internal_config::parse_list(value))
        cfg.security.keywords.push_back(to_lower(kw));
    } else if (key == "codes") {
      cfg.security.codes.clear();
      for (const auto& code : internal_config::parse_list(value))
        cfg.security.codes.insert(code);
    } else {
      throw usage_error("unknown config key: " + sk);
    }
  } else {
    throw usage_error("unknown config section: [" + section + "]");
  }
}

/// Loads "[section]\nkey = value" assignments over `base`. '#' and ';'
/// start comments; blank lines are skipped.
inline Config load_config_text(const std::string& text,
                               const Config& base = {}) {
  Config cfg = base;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw usage_error("config line " + std::to_string(line_no) +
                          ": malformed section header");
      section = to_lower(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw usage_error("config line " + std::to_string(line_no) +
                        ": expected key = value");
    std::string key = to_lower(trim(t.substr(0, eq)));
    std::string value = trim(t.substr(eq + 1));
    if (section.empty())
      throw usage_error("config line " + std::to_string(line_no) +
                        ": key outside any [section]");
    apply_config_value(cfg, section, key, value);
  }
  return cfg;
}

inline Config load_config_file(const std::string& path,
                               const Config& base = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config_text(buf.str(), base);
}

using EnvReader = std::function<const char*(const char*)>;

inline const char* system_env(const char* name) { return std::getenv(name); }

/// Applies CODEQUAL_<SECTION>_<KEY> overrides for every known key. The
/// section is the first underscore-delimited component; the rest is the
/// key (keys themselves may contain underscores).
inline void apply_env_overrides(Config& cfg,
                                const EnvReader& env = system_env) {
  static const std::vector<std::pair<const char*, const char*>> kKeys = {
      {"provider", "mode"},          {"provider", "model_id"},
      {"provider", "endpoint"},      {"provider", "path"},
      {"provider", "api_key_env"},   {"provider", "temperature"},
      {"provider", "max_output_chars"},
      {"provider", "timeout_seconds"},
      {"provider", "fixtures"},      {"linter", "command"},
      {"linter", "args"},            {"linter", "timeout_seconds"},
      {"linter", "required"},        {"linter", "enabled"},
      {"chunking", "max_chars"},     {"chunking", "overlap_lines"},
      {"ingestion", "extensions"},   {"ingestion", "ignore_dirs"},
      {"ingestion", "max_file_bytes"},
      {"concurrency", "unit_workers"},
      {"concurrency", "download_workers"},
      {"retry", "max_attempts"},     {"retry", "base_delay"},
      {"retry", "multiplier"},       {"retry", "jitter"},
      {"retry", "seed"},             {"github", "api_base"},
      {"output", "dir"},             {"output", "formats"},
      {"memory", "remember"},        {"security", "keywords"},
      {"security", "codes"},
  };
  for (const auto& [section, key] : kKeys) {
    std::string name = "CODEQUAL_";
    for (const char* p = section; *p; ++p)
      name += static_cast<char>(std::toupper(*p));
    name += "_";
    for (const char* p = key; *p; ++p)
      name += static_cast<char>(std::toupper(*p));
    const char* value = env(name.c_str());
    if (value != nullptr) apply_config_value(cfg, section, key, value);
  }
}

}  // namespace codequal
