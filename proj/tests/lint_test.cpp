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

#include "codequal/lint.hpp"

#include <gtest/gtest.h>

#include "codequal/subprocess.hpp"
#include "testutil.hpp"

namespace codequal {
namespace {

using testing::TempDir;
using testing::count_temp_residue;
using testing::fixture_path;
using testing::read_text;
using testing::write_script;

CodeUnit small_unit() {
  return make_unit("small.py", read_text(fixture_path("small.py")));
}

TEST(RunProcess, CapturesStdoutStderrAndExit) {
  TempDir dir;
  auto script = write_script(dir.path() / "echoer",
                             "echo out-line\necho err-line >&2\nexit 3\n");
  ProcessResult proc = run_process({script.string()}, 10.0);
  EXPECT_EQ(proc.exit_code, 3);
  EXPECT_FALSE(proc.timed_out);
  EXPECT_EQ(proc.stdout_text, "out-line\n");
  EXPECT_EQ(proc.stderr_text, "err-line\n");
}

TEST(RunProcess, MissingCommandThrows) {
  try {
    run_process({"/nonexistent/command-xyz"}, 5.0);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("command not found", 0), 0u);
  }
}

TEST(RunProcess, TimeoutKillsProcess) {
  TempDir dir;
  auto script = write_script(dir.path() / "sleeper", "sleep 30\n");
  ProcessResult proc = run_process({script.string()}, 0.3);
  EXPECT_TRUE(proc.timed_out);
}

TEST(RunLinter, ReplaysFrozenFixtureFieldForField) {
  TempDir dir;
  auto script = write_script(
      dir.path() / "fakelint",
      "cat " + fixture_path("pylint_small.json").string() + "\nexit 20\n");
  LintOptions options;
  options.command = script.string();

  LintReport report = run_linter(small_unit(), options);
  EXPECT_TRUE(report.linter_available);
  EXPECT_TRUE(report.parse_ok);
  EXPECT_EQ(report.exit_code, 20);
  ASSERT_EQ(report.diagnostics.size(), 3u);

  const LintDiagnostic& d0 = report.diagnostics[0];
  EXPECT_EQ(d0.type, "convention");
  EXPECT_EQ(d0.module, "small");
  EXPECT_EQ(d0.obj, "divide");
  EXPECT_EQ(d0.line, 7);
  EXPECT_EQ(d0.column, 0);
  EXPECT_EQ(d0.path, "small.py");
  EXPECT_EQ(d0.symbol, "missing-function-docstring");
  EXPECT_EQ(d0.message, "Missing function or method docstring");
  EXPECT_EQ(d0.message_id, "C0116");

  const LintDiagnostic& d1 = report.diagnostics[1];
  EXPECT_EQ(d1.obj, "main");
  EXPECT_EQ(d1.line, 11);
  EXPECT_EQ(d1.message_id, "C0116");

  const LintDiagnostic& d2 = report.diagnostics[2];
  EXPECT_EQ(d2.type, "warning");
  EXPECT_EQ(d2.obj, "main");
  EXPECT_EQ(d2.line, 12);
  EXPECT_EQ(d2.column, 4);
  EXPECT_EQ(d2.symbol, "unused-variable");
  EXPECT_EQ(d2.message, "Unused variable 'x'");
  EXPECT_EQ(d2.message_id, "W0612");
}

TEST(RunLinter, ScratchPathPassedAndRewritten) {
  TempDir dir;
  // The stub reports against the scratch path it was handed; the adapter
  // must rewrite it to the unit's rel_path.
  auto script = write_script(
      dir.path() / "fakelint",
      "printf '[{\"type\": \"warning\", \"path\": \"%s\", \"line\": 1, "
      "\"column\": 0, \"message\": \"m\", \"message-id\": \"W0001\", "
      "\"symbol\": \"s\", \"module\": \"x\", \"obj\": \"\"}]' \"$1\"\n");
  LintOptions options;
  options.command = script.string();
  LintReport report = run_linter(small_unit(), options);
  ASSERT_EQ(report.diagnostics.size(), 1u);
  EXPECT_EQ(report.diagnostics[0].path, "small.py");
}

TEST(RunLinter, ExitStatuses0Through31AreSuccess) {
  TempDir dir;
  for (int code : {0, 1, 2, 4, 8, 16, 31}) {
    auto script = write_script(
        dir.path() / ("lint" + std::to_string(code)),
        "echo '[]'\nexit " + std::to_string(code) + "\n");
    LintOptions options;
    options.command = script.string();
    LintReport report = run_linter(small_unit(), options);
    EXPECT_TRUE(report.linter_available) << "exit " << code;
    EXPECT_TRUE(report.parse_ok) << "exit " << code;
    EXPECT_EQ(report.exit_code, code);
    EXPECT_TRUE(report.diagnostics.empty());
  }
}

TEST(RunLinter, Exit32AndAboveIsPermanent) {
  TempDir dir;
  auto script = write_script(dir.path() / "badlint",
                             "echo 'usage: nope' >&2\nexit 32\n");
  LintOptions options;
  options.command = script.string();
  try {
    run_linter(small_unit(), options);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_FALSE(e.transient());
    EXPECT_NE(std::string(e.what()).find("exit 32"), std::string::npos);
  }
}

TEST(RunLinter, NonJsonOutputLandsInRawFallback) {
  TempDir dir;
  auto script = write_script(dir.path() / "textlint",
                             "echo 'small.py:1: something odd'\nexit 0\n");
  LintOptions options;
  options.command = script.string();
  LintReport report = run_linter(small_unit(), options);
  EXPECT_TRUE(report.linter_available);
  EXPECT_FALSE(report.parse_ok);
  EXPECT_EQ(report.raw_fallback, "small.py:1: something odd\n");
  EXPECT_TRUE(report.diagnostics.empty());
  EXPECT_FALSE(report.note.empty());
}

TEST(RunLinter, MissingCommandDegradesUnlessRequired) {
  LintOptions options;
  options.command = "/nonexistent/pylint-substitute";
  LintReport report = run_linter(small_unit(), options);
  EXPECT_FALSE(report.linter_available);
  EXPECT_NE(report.note.find("unavailable"), std::string::npos);

  options.required = true;
  EXPECT_THROW(run_linter(small_unit(), options), Error);
}

TEST(RunLinter, TimeoutIsTransient) {
  TempDir dir;
  auto script = write_script(dir.path() / "slowlint", "sleep 30\n");
  LintOptions options;
  options.command = script.string();
  options.timeout_seconds = 0.3;
  try {
    run_linter(small_unit(), options);
    FAIL() << "expected timeout";
  } catch (const Error& e) {
    EXPECT_TRUE(e.transient());
    EXPECT_NE(std::string(e.what()).find("timed out"), std::string::npos);
  }
}

TEST(RunLinter, NoScratchFilesSurviveAnyOutcome) {
  TempDir dir;
  int before = count_temp_residue();

  auto ok = write_script(dir.path() / "ok", "echo '[]'\nexit 0\n");
  auto bad = write_script(dir.path() / "bad", "exit 32\n");
  auto slow = write_script(dir.path() / "slow", "sleep 30\n");

  LintOptions options;
  options.command = ok.string();
  run_linter(small_unit(), options);

  options.command = bad.string();
  EXPECT_THROW(run_linter(small_unit(), options), Error);

  options.command = slow.string();
  options.timeout_seconds = 0.3;
  EXPECT_THROW(run_linter(small_unit(), options), Error);

  options = LintOptions{};
  options.command = "/nonexistent/linter";
  run_linter(small_unit(), options);

  EXPECT_EQ(count_temp_residue(), before);
}

TEST(FormatLintBlock, AllBranches) {
  LintReport report;
  EXPECT_EQ(format_lint_block(report),
            "(linter unavailable: no static analysis results)\n");

  report.linter_available = true;
  report.parse_ok = false;
  report.raw_fallback = "free text";
  EXPECT_EQ(format_lint_block(report), "(linter output, raw)\nfree text\n");

  report.parse_ok = true;
  report.raw_fallback.clear();
  EXPECT_EQ(format_lint_block(report), "(linter reported no issues)\n");

  LintDiagnostic d;
  d.path = "small.py";
  d.line = 12;
  d.column = 4;
  d.message_id = "W0612";
  d.symbol = "unused-variable";
  d.message = "Unused variable 'x'";
  report.diagnostics.push_back(d);
  EXPECT_EQ(format_lint_block(report),
            "small.py:12:4: W0612 (unused-variable) Unused variable 'x'\n");
}

}  // namespace
}  // namespace codequal
