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

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "json.hpp"

#include "codequal/error.hpp"
#include "codequal/ingest.hpp"
#include "codequal/subprocess.hpp"

namespace codequal {

/// One linter message, field names following pylint's JSON output.
struct LintDiagnostic {
  std::string type;        // convention | refactor | warning | error | fatal
  std::string module;
  std::string obj;
  int line = 0;
  int column = 0;
  std::string path;
  std::string symbol;      // e.g. unused-variable
  std::string message;
  std::string message_id;  // e.g. W0612
};

struct LintReport {
  bool linter_available = false;
  bool parse_ok = false;
  int exit_code = 0;
  std::vector<LintDiagnostic> diagnostics;
  std::string raw_fallback;  // raw stdout when JSON decoding failed
  std::string note;          // human-readable availability/failure note
};

struct LintOptions {
  std::string command = "pylint";
  std::vector<std::string> extra_args;
  double timeout_seconds = 60.0;
  bool required = false;
};

/// Scratch file that lives exactly as long as one linter invocation.
class TempSourceFile {
 public:
  TempSourceFile(const std::string& content, const std::string& extension) {
    static std::atomic<uint64_t> counter{0};
    std::random_device rd;
    std::ostringstream name;
    name << "codequal-" << ::getpid() << "-" << counter.fetch_add(1) << "-"
         << std::hex << rd() << extension;
    path_ = std::filesystem::temp_directory_path() / name.str();
    std::ofstream out(path_, std::ios::binary);
    if (!out)
      throw permanent_error("cannot create scratch file: " + path_.string());
    out << content;
    out.close();
    if (!out)
      throw permanent_error("cannot write scratch file: " + path_.string());
  }

  TempSourceFile(const TempSourceFile&) = delete;
  TempSourceFile& operator=(const TempSourceFile&) = delete;

  ~TempSourceFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string extension_of(const std::string& rel_path) {
  auto pos = rel_path.rfind('.');
  return pos == std::string::npos ? std::string(".txt")
                                  : rel_path.substr(pos);
}

/// Parses linter stdout. Anything that does not decode as a JSON array of
/// objects is preserved verbatim in raw_fallback rather than dropped; the
/// assessors still see it as context.
inline void parse_lint_json(const std::string& stdout_text,
                            const std::string& unit_rel_path,
                            LintReport& report) {
  nlohmann::json doc =
      nlohmann::json::parse(stdout_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_array()) {
    report.parse_ok = false;
    report.raw_fallback = stdout_text;
    return;
  }
  report.parse_ok = true;
  for (const auto& item : doc) {
    if (!item.is_object()) continue;
    LintDiagnostic d;
    d.type = item.value("type", "");
    d.module = item.value("module", "");
    d.obj = item.value("obj", "");
    d.line = item.value("line", 0);
    d.column = item.value("column", 0);
    d.symbol = item.value("symbol", "");
    d.message = item.value("message", "");
    d.message_id = item.value("message-id", "");
    // The linter saw a scratch copy; report against the real unit.
    d.path = unit_rel_path;
    report.diagnostics.push_back(std::move(d));
  }
}

/// Runs the configured linter over one unit via a scratch copy on disk.
///
/// Exit statuses below 32 mean the run completed (the linter encodes found
/// message categories in low bits); 32 and above mean the invocation itself
/// was wrong. A missing linter binary degrades to linter_available=false
/// unless options.required is set. Timeouts surface as transient errors so
/// the caller's retry wrapper can try again.
inline LintReport run_linter(const CodeUnit& unit,
                             const LintOptions& options = {}) {
  TempSourceFile scratch(unit.content, extension_of(unit.rel_path));

  std::vector<std::string> argv{options.command, scratch.path().string(),
                                "--output-format=json"};
  argv.insert(argv.end(), options.extra_args.begin(),
              options.extra_args.end());

  ProcessResult proc;
  try {
    proc = run_process(argv, options.timeout_seconds);
  } catch (const Error& e) {
    std::string what = e.what();
    if (!options.required && what.rfind("command not found", 0) == 0) {
      LintReport report;
      report.linter_available = false;
      report.note = "linter unavailable: " + what;
      return report;
    }
    throw;
  }

  if (proc.timed_out)
    throw transient_error("linter timed out after " +
                          std::to_string(options.timeout_seconds) +
                          " seconds on " + unit.rel_path);
  if (proc.exit_code < 0)
    throw transient_error("linter terminated by signal on " + unit.rel_path);
  if (proc.exit_code >= 32)
    throw permanent_error("linter rejected its invocation (exit " +
                          std::to_string(proc.exit_code) +
                          "): " + trim(proc.stderr_text));

  LintReport report;
  report.linter_available = true;
  report.exit_code = proc.exit_code;
  parse_lint_json(proc.stdout_text, unit.rel_path, report);
  if (!report.parse_ok)
    report.note = "linter output was not valid JSON; kept verbatim";
  return report;
}

/// Renders a report as the grounding block assessor prompts embed.
inline std::string format_lint_block(const LintReport& report) {
  std::ostringstream out;
  if (!report.linter_available) {
    out << "(linter unavailable: no static analysis results)\n";
    return out.str();
  }
  if (!report.parse_ok) {
    out << "(linter output, raw)\n" << report.raw_fallback;
    if (!report.raw_fallback.empty() && report.raw_fallback.back() != '\n')
      out << '\n';
    return out.str();
  }
  if (report.diagnostics.empty()) {
    out << "(linter reported no issues)\n";
    return out.str();
  }
  for (const auto& d : report.diagnostics) {
    out << d.path << ":" << d.line << ":" << d.column << ": " << d.message_id;
    if (!d.symbol.empty()) out << " (" << d.symbol << ")";
    out << " " << d.message << "\n";
  }
  return out.str();
}

}  // namespace codequal
