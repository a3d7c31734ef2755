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


#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "scopeshield/corpus.h"
#include "scopeshield/emit.h"
#include "scopeshield/equivharness.h"
#include "scopeshield/parser.h"
#include "scopeshield/renamer.h"
#include "scopeshield/transforms.h"
#include "test_support.h"

using namespace scopeshield;

namespace {

struct Transformed {
  std::string text;
  TransformStats stats;
  size_t patches = 0;
};

Transformed Run(const std::string& src, TransformOptions opt,
                size_t unit_bytes = kDefaultUnitBytes) {
  ParseResult r = ParseSource(src);
  ScopeTree tree = BuildScopeTree(r.ast);
  std::vector<Unit> units = PlanUnits(r.ast, tree, src.size(), unit_bytes);
  HelperNamer namer;
  TransformContext ctx{opt, "t.js", 0, &namer};
  Transformed out;
  std::vector<Patch> patches = TransformFile(r.ast, tree, units, src, ctx, &out.stats);
  out.patches = patches.size();
  SortPatches(patches);
  out.text = Emit(src, patches);
  return out;
}

// Decoding as the injected JavaScript decoder performs it.
std::u16string OracleDecode(const std::u16string& s, uint32_t key, uint32_t n) {
  std::u16string r;
  for (uint32_t j = 0; j < s.size(); ++j) {
    const uint32_t k = key + n * 31 + j * 7;
    const uint32_t c = s[j];
    if (c > 31 && c < 127)
      r.push_back(static_cast<char16_t>((c - 32 - k % 95 + 95) % 95 + 32));
    else if (c > 127)
      r.push_back(static_cast<char16_t>(((c - 128) ^ (k & 127)) + 128));
    else
      r.push_back(static_cast<char16_t>(c));
  }
  return r;
}

std::string GenerateProgramForTest() { return GenerateProgram(5, 6000); }

bool HaveNode() {
  try {
    CheckEngine("node {file}");
    return true;
  } catch (const EngineNotFound&) {
    return false;
  }
}

std::string RunNode(const std::string& program) {
  testing::TempDir dir;
  testing::WriteFile(dir / "p.js", program);
  ProcessResult r = RunProcess({"node", dir / "p.js"}, "", 20);
  REQUIRE(r.exit_code == 0);
  return r.out;
}

TransformOptions StringsOnly() {
  TransformOptions o;
  o.property_access = false;
  return o;
}

TransformOptions PropsOnly() {
  TransformOptions o;
  o.strings = false;
  return o;
}

}  // namespace

TEST_SUITE("transforms") {

TEST_CASE("empty file has no units") {
  ParseResult r = ParseSource("");
  ScopeTree tree = BuildScopeTree(r.ast);
  CHECK(PlanUnits(r.ast, tree, 0).empty());
  ParseResult c = ParseSource("// only a comment\n");
  ScopeTree ct = BuildScopeTree(c.ast);
  CHECK(PlanUnits(c.ast, ct, 18).empty());
}

TEST_CASE("unit dependencies name only the imported marker") {
  const std::string src =
      "import { helper } from './lib.mjs';\n"
      "function first(a) { return a + 1; }\n"
      "function second(b) { return first(b) * helper(b); }\n";
  ParseResult r = ParseSource(src);
  ScopeTree tree = BuildScopeTree(r.ast);
  HostNames hosts = HostNames::Default();
  std::vector<Unit> units = PlanUnits(r.ast, tree, src.size(), kDefaultUnitBytes, &hosts);
  REQUIRE(units.size() == 1);
  CHECK(units[0].span == Span{0, static_cast<uint32_t>(src.size())});
  CHECK(units[0].external_deps == std::vector<std::string>{"helper"});
}

TEST_CASE("self-contained file is one unit without dependencies") {
  const std::string src = "function f(a) { return a * 2; }\nconsole.log(f(21));\n";
  ParseResult r = ParseSource(src);
  ScopeTree tree = BuildScopeTree(r.ast);
  HostNames hosts = HostNames::Default();
  std::vector<Unit> units = PlanUnits(r.ast, tree, src.size(), kDefaultUnitBytes, &hosts);
  REQUIRE(units.size() == 1);
  CHECK(units[0].span.size() == src.size());
  CHECK(units[0].external_deps.empty());
}

TEST_CASE("unit dependencies match a re-resolution oracle") {
  const std::string src =
      "import { ext } from './e.mjs';\n"
      "var shared = ext(1);\n"
      "function useShared(v) { return shared + v + freeThing; }\n"
      "let later = useShared(2);\n"
      "console.log(later, ext(shared));\n";
  ParseResult r = ParseSource(src);
  ScopeTree tree = BuildScopeTree(r.ast);
  HostNames hosts = HostNames::Default();
  std::vector<Unit> units = PlanUnits(r.ast, tree, src.size(), 1, &hosts);
  REQUIRE(units.size() == 5);
  for (const Unit& u : units) {
    std::set<std::string> want;
    for (const Occurrence& o : tree.occurrences()) {
      if (!u.span.Contains(o.span)) continue;
      const std::string& name = tree.name(o.name_id);
      if (o.decl_scope == kGlobalBinding) {
        if (!hosts.Contains(name)) want.insert(name);
        continue;
      }
      const Declaration& d = tree.declaration(o.decl_scope, o.decl_index);
      if (d.imported || !u.span.Contains(d.site)) want.insert(name);
    }
    CHECK(std::vector<std::string>(want.begin(), want.end()) == u.external_deps);
  }
}

TEST_CASE("units cover the file in order") {
  const std::string src = GenerateProgramForTest();
  ParseResult r = ParseSource(src);
  ScopeTree tree = BuildScopeTree(r.ast);
  for (size_t min_bytes : {1ul, 64ul, 512ul, 100000ul}) {
    std::vector<Unit> units = PlanUnits(r.ast, tree, src.size(), min_bytes);
    REQUIRE_FALSE(units.empty());
    CHECK(units.front().span.start == 0);
    CHECK(units.back().span.end == src.size());
    for (size_t i = 1; i < units.size(); ++i) {
      CHECK(units[i].span.start == units[i - 1].span.end);
      CHECK(units[i].index == i);
    }
  }
}

TEST_CASE("no strings, no decoder") {
  Transformed t = Run("var x = 1 + 2;", StringsOnly());
  CHECK(t.text == "var x = 1 + 2;");
  CHECK(t.patches == 0);
}

TEST_CASE("single string literal") {
  Transformed t = Run("log(\"hi\");", StringsOnly());
  CHECK(t.stats.strings_encoded == 1);
  CHECK(t.text.find("log($a0d(0))") != std::string::npos);
  CHECK(t.text.find("\"hi\"") == std::string::npos);
  CHECK(t.text.starts_with("function $a0d(i){"));
}

TEST_CASE("repeated literals share one table entry") {
  Transformed t = Run("f('same'); g('same'); h('other'); k('same');", StringsOnly());
  CHECK(t.stats.strings_encoded == 4);
  CHECK(t.text.find("$a0d(2)") == std::string::npos);
  CHECK(t.text.find("g($a0d(0))") != std::string::npos);
  CHECK(t.text.find("h($a0d(1))") != std::string::npos);
}

TEST_CASE("skipped literals") {
  const std::string src =
      "\"use strict\";\nimport x from './m.mjs';\nconst r = require('fs');\n"
      "var s = 'a';\n";
  Transformed t = Run(src, StringsOnly());
  CHECK(t.stats.strings_encoded == 0);
  CHECK(t.text.find("\"use strict\"") == 0);
}

TEST_CASE("property access rewrite") {
  Transformed t = Run("player.score += 1;", PropsOnly());
  CHECK(t.stats.properties_rewritten == 1);
  CHECK(t.text.find("player[$a0d(0)] += 1;") != std::string::npos);
}

TEST_CASE("no member accesses, no patches") {
  Transformed t = Run("var a = b + c;", PropsOnly());
  CHECK(t.patches == 0);
}

TEST_CASE("repeated properties share a slot") {
  Transformed t = Run(
      "p.score = 1; p.score++; q.score += p.level; p.level = p.score;", PropsOnly());
  CHECK(t.stats.properties_rewritten == 6);
  CHECK(t.stats.property_slots == 2);
}

TEST_CASE("optional chains, private names and delete operands stay") {
  Transformed t = Run(
      "class A { #p = 1; get() { return this.#p; } }\n"
      "var o = {}; o?.deep; delete o.gone;", PropsOnly());
  CHECK(t.text.find("this.#p") != std::string::npos);
  CHECK(t.text.find("o?.deep") != std::string::npos);
  CHECK(t.text.find("delete o.gone") != std::string::npos);
}

TEST_CASE("string literal decoding") {
  CHECK(DecodeStringLiteral("'a\\nb'") == std::u16string(u"a\nb"));
  CHECK(DecodeStringLiteral("\"\\x41\\u0042\\u{43}\"") == std::u16string(u"ABC"));
  CHECK(DecodeStringLiteral("'\\101'") == std::u16string(u"A"));
  CHECK(DecodeStringLiteral("'\\u{1F600}'") == std::u16string(u"\U0001F600"));
  CHECK(DecodeStringLiteral("'line\\\ncont'") == std::u16string(u"linecont"));
  CHECK_FALSE(DecodeStringLiteral("'\\u12'").has_value());
}

TEST_CASE("encoding round trip (random strings)") {
  std::mt19937_64 rng(41);
  for (int iter = 0; iter < 2000; ++iter) {
    std::u16string s;
    const size_t len = rng() % 40;
    for (size_t i = 0; i < len; ++i) {
      switch (rng() % 4) {
        case 0: s.push_back(static_cast<char16_t>(rng() % 128)); break;
        case 1: s.push_back(static_cast<char16_t>(32 + rng() % 95)); break;
        case 2: s.push_back(static_cast<char16_t>(128 + rng() % 0xFF80)); break;
        default: s.push_back(static_cast<char16_t>(0xD800 + rng() % 0x800)); break;
      }
    }
    const uint32_t key = static_cast<uint32_t>(rng() & 0xFFFF);
    const uint32_t n = static_cast<uint32_t>(rng() % 500);
    const std::string literal = EncodeTableEntry(s, key, n);
    auto payload = DecodeStringLiteral(literal);
    REQUIRE(payload.has_value());
    CHECK(DecodeTableEntry(*payload, key, n) == s);
    CHECK(OracleDecode(*payload, key, n) == s);
  }
}

TEST_CASE("quoting round trip") {
  const std::u16string s = u"q\"uote\\ \n\r\t  \0 end";
  auto back = DecodeStringLiteral(QuoteUtf16(s));
  REQUIRE(back.has_value());
  CHECK(*back == s);
}

TEST_CASE("unit keys depend on path and unit") {
  CHECK(UnitKey("a.js", 0, 0) == UnitKey("a.js", 0, 0));
  std::set<uint32_t> keys;
  for (uint32_t u = 0; u < 50; ++u) keys.insert(UnitKey("a.js", u, 0));
  CHECK(keys.size() > 45);
  CHECK(UnitKey("a.js", 0, 0) <= 0xFFFF);
}

TEST_CASE("helper names avoid program dollar names") {
  HelperNamer namer({"$a0d", "$a0d$"});
  CHECK(namer.Name(0, 0, 'd') == "$a0d$$");
  CHECK(namer.Name(1, 3, 't') == "$b3t");
}

TEST_CASE("decoder runs once across a 1000-iteration loop") {
  if (!HaveNode()) {
    MESSAGE("node not found; skipped");
    return;
  }
  const std::string src =
      "function greet(n) { return \"hello \" + n; }\n"
      "var last = \"\";\n"
      "for (var i = 0; i < 1000; i++) last = greet(i) + \"/\" + \"done\";\n"
      "console.log(last);\n"
      "console.log(globalThis.__ssDecodeCount);\n";
  TransformOptions o;
  o.count_decodes = true;
  Transformed t = Run(src, o);
  CHECK(RunNode(t.text) == "hello 999/done\n1\n");
}

TEST_CASE("transformed snippets behave like the originals") {
  if (!HaveNode()) {
    MESSAGE("node not found; skipped");
    return;
  }
  const std::string src =
      "\"use strict\";\n"
      "const player = { score: 0, name: \"p\\u00e9 \\ud83d\\ude00\", tags: [\"x\", \"yz\"] };\n"
      "for (let i = 0; i < 3; i++) player.score += i;\n"
      "console.log(player.name, player.score, player.tags.join(\"--\"));\n"
      "console.log(JSON.stringify({ key: \"value\\n\\t\" }), \"\\x00\\x7f\\x80\".length);\n";
  for (size_t unit_bytes : {1ul, 4096ul}) {
    Transformed t = Run(src, TransformOptions{}, unit_bytes);
    CHECK(RunNode(t.text) == RunNode(src));
  }
}

}  // TEST_SUITE
