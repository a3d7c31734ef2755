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


#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "scopeshield/emit.h"
#include "scopeshield/lexer.h"
#include "scopeshield/parser.h"
#include "scopeshield/scope_tree.h"

using namespace scopeshield;

namespace {

std::vector<std::pair<TokenKind, std::string>> Kinds(std::string_view src) {
  std::vector<std::pair<TokenKind, std::string>> out;
  for (const Token& t : Tokenize(src)) out.emplace_back(t.kind, std::string(t.text));
  return out;
}

// Declared names of one scope, in declaration order.
std::vector<std::string> DeclNames(const ScopeTree& tree, ScopeId s) {
  std::vector<std::string> out;
  for (const Declaration& d : tree.node(s).declarations)
    out.push_back(tree.name(d.name_id));
  return out;
}

ScopeTree TreeOf(std::string_view src) {
  ParseResult r = ParseSource(src);
  return BuildScopeTree(r.ast);
}

}  // namespace

TEST_SUITE("jsparse") {

TEST_CASE("tokenize var declaration") {
  using K = TokenKind;
  auto got = Kinds("var a=1;");
  std::vector<std::pair<TokenKind, std::string>> want = {
      {K::kKeyword, "var"},       {K::kWhitespace, " "}, {K::kIdentifier, "a"},
      {K::kPunctuator, "="},      {K::kNumericLiteral, "1"},
      {K::kPunctuator, ";"}};
  CHECK(got == want);
}

TEST_CASE("tokenize empty input") { CHECK(Tokenize("").empty()); }

TEST_CASE("tokens concatenate back to the source") {
  const std::string src =
      "#!/usr/bin/env node\n// c\nlet re = /a\\/b[/]/g, d = x / 2 / y;\n"
      "const t = `a${b + `n${c}`}z`; /* block */ a?.b ?? c;\n"
      "if (x) /re/.test(s); x = y\n++z\n";
  std::string joined;
  for (const Token& t : Tokenize(src)) joined += t.text;
  CHECK(joined == src);
}

TEST_CASE("regex and division are told apart") {
  auto toks = Kinds("a = b / c / d; e = /x/g.test(f); g = (h) / 2;");
  auto regexes = std::count_if(toks.begin(), toks.end(), [](const auto& t) {
    return t.first == TokenKind::kRegexLiteral;
  });
  CHECK(regexes == 1);
}

TEST_CASE("lexer errors") {
  CHECK_THROWS_AS(Tokenize("var s = \"open"), LexError);
  CHECK_THROWS_AS(Tokenize("/* never closed"), LexError);
  CHECK_THROWS_AS(Tokenize("`tpl"), LexError);
}

TEST_CASE("parse imports and exports") {
  ParseResult r = ParseSource("import {x} from \"./a.js\"; export function f(){}");
  REQUIRE(r.summary.imports.size() == 1);
  CHECK(r.summary.imports[0].source == "./a.js");
  CHECK(r.summary.imports[0].names == std::vector<std::string>{"x"});
  CHECK(r.summary.exports == std::vector<std::string>{"f"});
  CHECK(r.summary.is_module);
}

TEST_CASE("eval call is a dynamic site") {
  const std::string src = "function g(){ eval(s) }";
  ParseResult r = ParseSource(src);
  REQUIRE(r.summary.dynamic_sites.size() == 1);
  const Span site = r.summary.dynamic_sites[0];
  CHECK(src.substr(site.start, site.size()).find("(s)") != std::string::npos);
}

TEST_CASE("declared globals and free names") {
  ParseResult r = ParseSource("var q = 1; console.log(q)");
  CHECK(r.summary.declared_globals == std::vector<std::string>{"q"});
  CHECK(r.summary.free_names == std::vector<std::string>{"console"});
  CHECK_FALSE(r.summary.is_module);
}

TEST_CASE("parse errors carry an offset") {
  try {
    ParseSource("var x = (1 + ;");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() > 0);
    CHECK(e.offset() <= 14);
  }
}

TEST_CASE("emit single substitution") {
  std::vector<Patch> patches = {{Span{4, 9}, "a"}};
  CHECK(Emit("var alpha;", patches) == "var a;");
}

TEST_CASE("emit with no patches is the identity") {
  const std::string src = "let  x = 1 ; // keep\n";
  CHECK(Emit(src, {}) == src);
}

TEST_CASE("emit rejects overlapping patches") {
  std::vector<Patch> patches = {{Span{0, 5}, "a"}, {Span{3, 7}, "b"}};
  CHECK_THROWS_AS(Emit("0123456789", patches), OverlappingPatches);
}

TEST_CASE("emit copies bytes outside patches (property)") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    std::string src(64, ' ');
    for (char& ch : src) ch = static_cast<char>('a' + rng() % 26);
    std::vector<Patch> patches;
    uint32_t pos = 0;
    while (true) {
      pos += static_cast<uint32_t>(rng() % 8);
      const uint32_t len = static_cast<uint32_t>(rng() % 4);
      if (pos + len > src.size()) break;
      patches.push_back({Span{pos, pos + len}, std::string(rng() % 3, 'Z')});
      pos += len;
    }
    // Oracle: apply back to front on a copy.
    std::string want = src;
    for (auto it = patches.rbegin(); it != patches.rend(); ++it)
      want.replace(it->span.start, it->span.size(), it->replacement);
    CHECK(Emit(src, patches) == want);
  }
}

TEST_CASE("minify keeps statements apart") {
  CHECK(Minify("var a = 1;\n// note\nvar b = 2;\n") == "var a=1;var b=2;");
  const std::string asi = "let x = y\n++z\n";
  CHECK(Minify(asi).find('\n') != std::string::npos);
}

TEST_CASE("scope tree nesting") {
  ScopeTree t = TreeOf("function f(){ let x; { let y; } }");
  REQUIRE(t.size() == 4);
  CHECK(t.node(0).kind == ScopeKind::kGlobal);
  CHECK(t.node(1).kind == ScopeKind::kModule);
  CHECK(t.node(2).kind == ScopeKind::kFunction);
  CHECK(t.node(3).kind == ScopeKind::kBlock);
  CHECK(t.node(3).parent == 2);
  CHECK(DeclNames(t, 1) == std::vector<std::string>{"f"});
  CHECK(DeclNames(t, 2) == std::vector<std::string>{"x"});
  CHECK(DeclNames(t, 3) == std::vector<std::string>{"y"});
}

TEST_CASE("file without functions is a single module scope") {
  ScopeTree t = TreeOf("var a = 1, b = a; let c = b;");
  CHECK(t.size() == 2);
  CHECK(DeclNames(t, 1) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("eval marks the scope dynamic") {
  ScopeTree t = TreeOf("function f(){ eval(s) } function g(){}");
  CHECK(t.node(2).is_dynamic);
  CHECK_FALSE(t.node(3).is_dynamic);
}

TEST_CASE("resolve") {
  ScopeTree t = TreeOf(
      "function outer(x) { function mid() { var x; { let z = x; } } }");
  // module(1) > outer(2) > mid(3) > block(4)
  CHECK(Resolve("x", 2, t) == Binding{2, "x"});
  CHECK(Resolve("nowhere", 4, t) == Binding{kGlobalBinding, "nowhere"});
  // Declared in mid and in its grandparent; queried from mid's child.
  CHECK(Resolve("x", 4, t) == Binding{3, "x"});
  CHECK_THROWS_AS(Resolve("x", 99, t), ScopeError);
}

TEST_CASE("usage counts equal resolved occurrences") {
  ScopeTree t = TreeOf(
      "let a = 1; function f(a) { return a + a; } f(a); { let a = 2; a++; }");
  for (const ScopeNode& s : t.nodes()) {
    for (uint32_t i = 0; i < s.declarations.size(); ++i) {
      uint32_t n = 0;
      for (const Occurrence& o : t.occurrences())
        if (o.decl_scope == s.id && o.decl_index == i) ++n;
      CHECK(s.declarations[i].usage == n);
    }
  }
}

TEST_CASE("block function declarations are visible in the block") {
  ScopeTree t = TreeOf("{ function inner() {} inner(); }");
  bool found = false;
  for (const Occurrence& o : t.occurrences())
    if (!o.is_declaration && t.name(o.name_id) == "inner")
      found = o.decl_scope != kGlobalBinding;
  CHECK(found);
}

}  // TEST_SUITE
