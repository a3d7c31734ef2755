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


#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "scopeshield/corpus.h"
#include "scopeshield/equivharness.h"
#include "scopeshield/pipeline.h"
#include "test_support.h"

namespace fs = std::filesystem;
using namespace scopeshield;
using Json = nlohmann::json;

namespace {

ObfuscationConfig RenameOnly() {
  ObfuscationConfig c;
  c.strings = false;
  c.property_access = false;
  return c;
}

std::vector<SourceFile> MixedProgram() {
  return {
      {"app/main.mjs",
       "import { total, Counter } from './lib/util.mjs';\n"
       "const counter = new Counter(3);\n"
       "console.log(total([1, 2, 3]), counter.next(), sharedConfig.mode);\n"},
      {"app/lib/util.mjs",
       "export function total(values) { let sum = 0; for (const v of values) sum += v; return sum; }\n"
       "export class Counter { constructor(start) { this.value = start; } next() { return ++this.value; } }\n"},
      {"app/config.js", "var sharedConfig = { mode: 'fast' };\nvar privateHelper = 1;\n"},
      {"app/other.js", "function useConfig() { return sharedConfig.mode + privateLocal; }\nvar privateLocal = 2;\n"},
      {"app/standalone.js", "(function () { var hidden = 'h'; console.log(hidden); })();\n"},
  };
}

uint64_t PeakForCorpus(uint64_t bytes) {
  testing::TempDir dir;
  WriteScalingCorpus(dir / "in", bytes, 64 * 1024, 8);
  ProcessResult r = RunProcess({testing::CliPath(), "obfuscate", "--in", dir / "in", "--out",
                                dir / "out", "--threads", "2", "--report", dir / "r.json"},
                               "", 300);
  REQUIRE(r.exit_code == 0);
  return Json::parse(testing::ReadFile(dir / "r.json"))["peak_memory_bytes"].get<uint64_t>();
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("trivial rename-only project") {
  std::vector<SourceFile> files = {{"x.js", "var x=1;"}};
  ProgramResult r = ObfuscateSources(files, RenameOnly());
  REQUIRE(r.outputs.size() == 1);
  CHECK(r.outputs[0] == "var a=1;");
  CHECK(r.report.ExitCode() == 0);
  CHECK(r.report.files_transformed == 1);
}

TEST_CASE("outputs are identical for every worker count") {
  std::vector<SourceFile> files = MixedProgram();
  for (uint32_t i = 0; i < 12; ++i)
    files.push_back({"gen/g" + std::to_string(i) + ".js", GenerateProgram(i, 3000 + 500 * i)});
  ObfuscationConfig c;
  c.workers = 1;
  const ProgramResult base = ObfuscateSources(files, c);
  for (uint32_t w : {2u, 3u, 4u, 8u}) {
    c.workers = w;
    ProgramResult r = ObfuscateSources(files, c);
    CHECK(r.outputs == base.outputs);
    CHECK(r.report.rename_cost == base.report.rename_cost);
  }
}

TEST_CASE("shared script globals keep their names") {
  ProgramResult r = ObfuscateSources(MixedProgram(), RenameOnly());
  REQUIRE(r.report.ExitCode() == 0);
  CHECK(r.outputs[2].find("var sharedConfig=") != std::string::npos);
  CHECK(r.outputs[2].find("privateHelper") == std::string::npos);
  CHECK(r.outputs[3].find("sharedConfig.mode") != std::string::npos);
  CHECK(r.outputs[1].find("export function total(") != std::string::npos);
}

TEST_CASE("unparseable files are copied and reported") {
  std::vector<SourceFile> files = {{"good.js", "var good = 1;"}, {"bad.js", "var = ;;("}};
  ProgramResult r = ObfuscateSources(files, ObfuscationConfig{});
  CHECK(r.outputs[1] == "var = ;;(");
  CHECK(r.report.ExitCode() == 2);
  REQUIRE(r.report.issues.size() == 1);
  CHECK(r.report.issues[0].kind == "ParseError");
  CHECK(r.report.files_copied == 1);
  // A failed parse freezes script globals everywhere.
  CHECK(r.outputs[0] == "var good=1;");
}

TEST_CASE("empty file is copied through") {
  std::vector<SourceFile> files = {{"empty.js", ""}};
  ProgramResult r = ObfuscateSources(files, ObfuscationConfig{});
  CHECK(r.outputs[0].empty());
  CHECK(r.report.ExitCode() == 0);
}

TEST_CASE("config overlay") {
  ObfuscationConfig base;
  base.workers = 6;
  ObfuscationConfig c = ParseConfigJson(
      R"({"threads": 3, "strings": false, "engine": "node --no-warnings {file}", "seed": 9})", base);
  CHECK(c.workers == 3);
  CHECK_FALSE(c.strings);
  CHECK(c.rename);
  CHECK(c.seed == 9);
  CHECK(ParseConfigJson("{}", base).workers == 6);
  CHECK_THROWS_AS(ParseConfigJson(R"({"thread": 3})"), FatalConfigError);
  CHECK_THROWS_AS(ParseConfigJson(R"({"threads": "3"})"), FatalConfigError);
  CHECK_THROWS_AS(ParseConfigJson(R"({"threads": 0})"), FatalConfigError);
  CHECK_THROWS_AS(ParseConfigJson("[1]"), FatalConfigError);
  ObfuscationConfig bad;
  bad.engine = "node";
  CHECK_THROWS_AS(bad.Validate(), FatalConfigError);
  ObfuscationConfig round = ParseConfigJson(ConfigToJson(c));
  CHECK(round.workers == c.workers);
  CHECK(round.engine == c.engine);
}

TEST_CASE("project run mirrors the tree and writes a report") {
  testing::TempDir dir;
  for (const SourceFile& f : MixedProgram()) testing::WriteFile(dir / ("in/" + f.path), f.text);
  testing::WriteFile(dir / "in/assets/readme.txt", "not javascript");
  ObfuscationConfig c;
  c.input_root = dir / "in";
  c.output_root = dir / "out";
  c.workers = 2;
  RunReport report = ObfuscateProject(c);
  CHECK(report.ExitCode() == 0);
  CHECK(report.files_total == 6);
  CHECK(report.files_transformed == 5);
  CHECK(fs::exists(dir / "out/app/lib/util.mjs"));
  CHECK(testing::ReadFile(dir / "out/assets/readme.txt") == "not javascript");
  Json j = Json::parse(report.ToJson(&c));
  for (const char* key : {"files_total", "files_transformed", "files_copied", "cut_weight",
                          "phase_times_ms", "peak_memory_bytes", "output_bytes", "input_bytes"})
    CHECK_MESSAGE(j.contains(key), key);
  for (const char* phase : {"parse", "pasa", "rename", "transform", "emit"})
    CHECK_MESSAGE(j["phase_times_ms"].contains(phase), phase);
  CHECK(j["input_bytes"].get<uint64_t>() > 0);
}

TEST_CASE("missing input root is fatal") {
  testing::TempDir dir;
  ObfuscationConfig c;
  c.input_root = dir / "nope";
  c.output_root = dir / "out";
  RunReport report = ObfuscateProject(c);
  CHECK(report.fatal);
  CHECK(report.ExitCode() == 3);
}

TEST_CASE("obfuscated programs still run") {
  if (RunProcess({"node", "--version"}, "", 10).exit_code != 0) {
    MESSAGE("node not found; skipped");
    return;
  }
  testing::TempDir dir;
  for (const SourceFile& f : MixedProgram()) testing::WriteFile(dir / ("in/" + f.path), f.text);
  testing::WriteFile(dir / "in/app/entry.mjs",
                     "import './config.js';\nimport './main.mjs';\n");
  ObfuscationConfig c;
  c.input_root = dir / "in";
  c.output_root = dir / "out";
  // main.mjs reads sharedConfig, a script global; give it one in both trees.
  testing::WriteFile(dir / "in/app/main.mjs",
                     "import { total, Counter } from './lib/util.mjs';\n"
                     "globalThis.sharedConfig = { mode: 'fast' };\n"
                     "const counter = new Counter(3);\n"
                     "console.log(total([1, 2, 3]), counter.next(), sharedConfig.mode, 'text');\n");
  REQUIRE(ObfuscateProject(c).ExitCode() == 0);
  ProcessResult a = RunProcess({"node", dir / "in/app/main.mjs"}, "", 20);
  ProcessResult b = RunProcess({"node", dir / "out/app/main.mjs"}, "", 20);
  CHECK(a.exit_code == 0);
  CHECK(a.out == "6 4 fast text\n");
  CHECK(b.out == a.out);
}

TEST_CASE("peak memory grows sub-linearly with independent files") {
  const uint64_t one = PeakForCorpus(6 << 20);
  const uint64_t two = PeakForCorpus(12 << 20);
  MESSAGE("peak(N)=" << one << " peak(2N)=" << two);
  CHECK(static_cast<double>(two) < 1.8 * static_cast<double>(one));
}

}  // TEST_SUITE
