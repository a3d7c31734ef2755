// Copyright 2026 The ScopeShield Authors.
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


#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "scopeshield/emit.h"
#include "scopeshield/equivharness.h"
#include "scopeshield/parser.h"
#include "scopeshield/pipeline.h"
#include "scopeshield/renamer.h"
#include "test_support.h"

using namespace scopeshield;

namespace {

bool HaveNode() {
  try {
    CheckEngine("node {file}");
    return true;
  } catch (const EngineNotFound&) {
    return false;
  }
}

// Renames with subtree-wide forbidden sets switched off, which lets the
// middle function capture the leaf's reference to the outer binding.
std::string CaptureBug(const std::string& src) {
  ParseResult r = ParseSource(src);
  ScopeTree tree = BuildScopeTree(r.ast);
  RenameConstraints loose;
  loose.subtree_forbidden = false;
  std::vector<Patch> patches = RenamePatches(tree, RenameFile(tree, loose));
  SortPatches(patches);
  return Emit(src, patches);
}

}  // namespace

TEST_SUITE("equivharness") {

TEST_CASE("manifest parsing") {
  auto cases = ParseCases(
      R"({"cases": [{"entry": "a.js", "args": ["1"], "stdin": "in", "mode": "normalized",
           "timeout_s": 3}, {"entry": "b.js"}]})");
  REQUIRE(cases.size() == 2);
  CHECK(cases[0].args == std::vector<std::string>{"1"});
  CHECK(cases[0].stdin_data == "in");
  CHECK(cases[0].mode == CompareMode::kNormalized);
  CHECK(cases[0].timeout_s == 3);
  CHECK(cases[1].mode == CompareMode::kExact);
  CHECK(ParseCases(R"([{"entry": "c.js"}])").size() == 1);
  CHECK_THROWS_AS(ParseCases(R"([{"args": []}])"), CaseManifestError);
  CHECK_THROWS_AS(ParseCases("not json"), CaseManifestError);
}

TEST_CASE("engine template expansion") {
  auto argv = ExpandEngine("node --stack-size=2000 '{file}'", "/tmp/x y.js", {"a"});
  CHECK(argv == std::vector<std::string>{"node", "--stack-size=2000", "/tmp/x y.js", "a"});
}

TEST_CASE("missing engine") {
  CHECK_THROWS_AS(CheckEngine("definitely-not-an-engine-xyz {file}"), EngineNotFound);
  testing::TempDir dir;
  CHECK_THROWS_AS(RunDifferential(dir.path(), dir.path(), {TestCase{"a.js"}},
                                  "definitely-not-an-engine-xyz {file}"),
                  EngineNotFound);
}

TEST_CASE("output comparison") {
  Verdict v;
  CHECK(SameOutput("a\nb\n", "a\nb\n", CompareMode::kExact, &v));
  CHECK_FALSE(SameOutput("a\nb\n", "a\nc\n", CompareMode::kExact, &v));
  CHECK(v.line == 2);
  CHECK(v.original_line == "b");
  CHECK(v.obfuscated_line == "c");
  CHECK_FALSE(SameOutput("a \n", "a\n", CompareMode::kExact));
  CHECK(SameOutput("a  \nb\n\n", "a\nb", CompareMode::kNormalized));
}

TEST_CASE("determinism lint") {
  CHECK(LintDeterminism("console.log(1 + 1);").empty());
  CHECK(LintDeterminism("console.log(Math.random());").size() == 1);
  CHECK(LintDeterminism("var t = Date.now();").size() == 1);
  CHECK(LintDeterminism("var d = new Date();").size() == 1);
  CHECK(LintDeterminism("var d = new Date(0);").empty());
  CHECK(LintDeterminism("Math.random = function () { return 0.5; }; Math.random();").empty());
}

TEST_CASE("rename-only arithmetic program is equivalent") {
  if (!HaveNode()) {
    MESSAGE("node not found; skipped");
    return;
  }
  testing::TempDir dir;
  testing::WriteFile(dir / "orig/p.js",
                     "function print(v) { console.log(v); }\nprint(1+1);\n");
  ObfuscationConfig c;
  c.input_root = dir / "orig";
  c.output_root = dir / "obf";
  c.strings = false;
  c.property_access = false;
  REQUIRE(ObfuscateProject(c).ExitCode() == 0);
  auto verdicts = RunDifferential(dir / "orig", dir / "obf", {TestCase{"p.js"}}, "node {file}");
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].kind == VerdictKind::kEquivalent);
  CHECK(EquivalenceRate(verdicts) == 1.0);
}

TEST_CASE("injected capture bug is caught as a divergence") {
  if (!HaveNode()) {
    MESSAGE("node not found; skipped");
    return;
  }
  const std::string src =
      "var outerValue = 1;\n"
      "function middle() {\n"
      "  var middleLocal = 2;\n"
      "  function leaf() { return outerValue; }\n"
      "  return leaf() + middleLocal;\n"
      "}\n"
      "console.log(middle());\n";
  testing::TempDir dir;
  testing::WriteFile(dir / "orig/cap.js", src);
  testing::WriteFile(dir / "obf/cap.js", CaptureBug(src));
  testing::WriteFile(dir / "renames.txt", "dump");
  auto verdicts = RunDifferential(dir / "orig", dir / "obf", {TestCase{"cap.js"}},
                                  "node {file}", 1, dir / "renames.txt");
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].kind == VerdictKind::kDivergent);
  CHECK(verdicts[0].line == 1);
  CHECK(verdicts[0].original_line == "3");
  CHECK(verdicts[0].obfuscated_line == "4");
  CHECK(verdicts[0].rename_dump == dir / "renames.txt");
  CHECK(EquivalenceRate(verdicts) == 0.0);
  auto line = nlohmann::json::parse(verdicts[0].ToJsonLine());
  CHECK(line["verdict"] == "divergent");
}

TEST_CASE("errors and timeouts") {
  if (!HaveNode()) {
    MESSAGE("node not found; skipped");
    return;
  }
  testing::TempDir dir;
  testing::WriteFile(dir / "orig/loop.js", "while (true) {}\n");
  testing::WriteFile(dir / "obf/loop.js", "while (true) {}\n");
  testing::WriteFile(dir / "orig/exit.js", "console.log(1);\n");
  testing::WriteFile(dir / "obf/exit.js", "console.log(1); process.exit(1);\n");
  TestCase loop{"loop.js"};
  loop.timeout_s = 0.5;
  auto verdicts = RunDifferential(dir / "orig", dir / "obf",
                                  {loop, TestCase{"exit.js"}, TestCase{"missing.js"}},
                                  "node {file}", 2);
  REQUIRE(verdicts.size() == 3);
  CHECK(verdicts[0].kind == VerdictKind::kTimeout);
  CHECK(verdicts[1].kind == VerdictKind::kError);
  CHECK(verdicts[2].kind == VerdictKind::kError);
}

TEST_CASE("process runner feeds stdin") {
  ProcessResult r = RunProcess({"cat"}, "piped text", 5);
  CHECK(r.exit_code == 0);
  CHECK(r.out == "piped text");
  CHECK(RunProcess({"no-such-binary-xyz"}, "", 5).spawn_failed);
}

}  // TEST_SUITE
