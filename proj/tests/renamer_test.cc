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
#include "scopeshield/lexer.h"
#include "scopeshield/name_pool.h"
#include "scopeshield/parser.h"
#include "scopeshield/renamer.h"
#include "test_support.h"

using namespace scopeshield;

namespace {

ScopeTree TreeOf(std::string_view src) {
  ParseResult r = ParseSource(src);
  return BuildScopeTree(r.ast);
}

RenameMap IdentityMap(const ScopeTree& t) {
  RenameMap m;
  for (const ScopeNode& s : t.nodes())
    for (const Declaration& d : s.declarations)
      m.Set(RenameKey{t.file(), s.id, t.name(d.name_id)},
            RenameEntry{t.name(d.name_id), d.usage, false});
  return m;
}

std::string OutName(const RenameMap& m, const ScopeTree& t, ScopeId s,
                    const std::string& name) {
  const RenameEntry* e = m.Find(RenameKey{t.file(), s, name});
  return e == nullptr ? "<none>" : e->name;
}

std::string Apply(std::string_view src, const ScopeTree& t, const RenameMap& m) {
  std::vector<Patch> p = RenamePatches(t, m);
  SortPatches(p);
  return Emit(src, p);
}

}  // namespace

TEST_SUITE("renamer") {

TEST_CASE("pool order") {
  CHECK(RawPoolName(0) == "a");
  CHECK(RawPoolName(25) == "z");
  CHECK(RawPoolName(26) == "aa");
  CHECK(RawPoolName(27) == "ab");
  CHECK(RawPoolName(26 + 26 * 26) == "aaa");
  NamePool pool;
  CHECK(pool.At(0) == "a");
  CHECK(pool.At(26) == "aa");
}

TEST_CASE("pool skips reserved words and keeps lengths non-decreasing") {
  NamePool pool;
  const std::set<std::string> reserved = {"do", "if", "in", "for", "new", "var", "let", "try"};
  size_t prev = 0;
  for (uint64_t i = 0; i < 1000; ++i) {
    const std::string n = pool.At(i);
    CHECK(reserved.count(n) == 0);
    CHECK_FALSE(IsReservedWord(n));
    CHECK(n.size() >= prev);
    prev = n.size();
  }
}

TEST_CASE("pool honours exclusions") {
  NamePool pool([](std::string_view n) { return n == "a" || n == "c"; });
  CHECK(pool.At(0) == "b");
  CHECK(pool.At(1) == "d");
  uint64_t cursor = 0;
  CHECK(pool.Next(&cursor, [](std::string_view n) { return n == "b"; }) == "d");
}

TEST_CASE("forbidden set") {
  ScopeTree t = TreeOf("var x = 1; function f(){ return x; } function g(){ var y; }");
  RenameConstraints c;
  RenameMap state;
  CHECK(ForbiddenSet(t, 0, state, c).empty());
  state.Set(RenameKey{0, 1, "x"}, RenameEntry{"a", 2, false});
  state.Set(RenameKey{0, 1, "f"}, RenameEntry{"b", 1, false});
  state.Set(RenameKey{0, 1, "g"}, RenameEntry{"c", 1, false});
  CHECK(ForbiddenSet(t, 2, state, c).count("a") == 1);
  CHECK(ForbiddenSet(t, 3, state, c).count("a") == 0);
}

TEST_CASE("forbidden set before the outer scope is named") {
  ScopeTree t = TreeOf("var x = 1; function f(){ return x; }");
  RenameMap empty;
  CHECK_THROWS_AS(ForbiddenSet(t, 2, empty, RenameConstraints{}), OrderViolation);
}

TEST_CASE("params then locals") {
  const std::string src = "function f(alpha){var beta=alpha; return beta}";
  ScopeTree t = TreeOf(src);
  RenameMap m = RenameFile(t, RenameConstraints{});
  CHECK(OutName(m, t, 1, "f") == "a");
  CHECK(OutName(m, t, 2, "alpha") == "a");
  CHECK(OutName(m, t, 2, "beta") == "b");
  CHECK(CheckSafety(t, m, RenameConstraints{}).ok());
  CHECK(Apply(src, t, m) == "function a(a){var b=a; return b}");
}

TEST_CASE("sibling scopes reuse names") {
  ScopeTree t = TreeOf("function one(){ var first = 1; return first; }"
                       "function two(){ var second = 2; return second; }");
  RenameMap m = RenameFile(t, RenameConstraints{});
  CHECK(OutName(m, t, 2, "first") == "a");
  CHECK(OutName(m, t, 3, "second") == "a");
}

TEST_CASE("dynamic scope keeps its names") {
  ScopeTree t = TreeOf("function f(p){ var local = 1; return eval('local + p'); }");
  RenameMap m = RenameFile(t, RenameConstraints{});
  CHECK(OutName(m, t, 2, "p") == "p");
  CHECK(OutName(m, t, 2, "local") == "local");
  CHECK(OutName(m, t, 1, "f") == "f");
}

TEST_CASE("identity map is safe") {
  ScopeTree t = TreeOf(testing::CaptureCounterexample());
  CHECK(CheckSafety(t, IdentityMap(t), RenameConstraints{}).ok());
}

TEST_CASE("hand-built capture is flagged") {
  ScopeTree t = TreeOf("var x = 1;\nfunction f() {\n  var a = 2;\n  return x;\n}");
  RenameMap m = IdentityMap(t);
  m.Set(RenameKey{0, 1, "x"}, RenameEntry{"a", 2, false});
  SafetyReport r = CheckSafety(t, m, RenameConstraints{});
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].original == "x");
  CHECK(r.violations[0].renamed == "a");
}

TEST_CASE("untightened forbidden sets capture, tightened ones do not") {
  ScopeTree t = TreeOf(testing::CaptureCounterexample());
  RenameConstraints loose;
  loose.subtree_forbidden = false;
  CHECK_FALSE(CheckSafety(t, RenameFile(t, loose), loose).ok());
  RenameConstraints tight;
  CHECK(CheckSafety(t, RenameFile(t, tight), tight).ok());
}

TEST_CASE("non-injective scope is flagged") {
  ScopeTree t = TreeOf("function f(){ var p = 1, q = 2; return p + q; }");
  RenameMap m = IdentityMap(t);
  m.Set(RenameKey{0, 2, "p"}, RenameEntry{"z", 2, false});
  m.Set(RenameKey{0, 2, "q"}, RenameEntry{"z", 2, false});
  CHECK_FALSE(CheckSafety(t, m, RenameConstraints{}).ok());
}

TEST_CASE("cost") {
  RenameMap one;
  one.Set(RenameKey{0, 1, "x"}, RenameEntry{"a", 3, false});
  CHECK(Cost(one) == 3);
  RenameMap two;
  two.Set(RenameKey{0, 1, "x"}, RenameEntry{"a", 2, false});
  two.Set(RenameKey{0, 1, "y"}, RenameEntry{"aa", 1, false});
  CHECK(Cost(two) == 4);
}

TEST_CASE("merge") {
  RenameMap a, b;
  a.Set(RenameKey{0, 1, "x"}, RenameEntry{"a", 1, false});
  b.Set(RenameKey{1, 1, "y"}, RenameEntry{"a", 1, false});
  std::vector<RenameMap> maps = {a, b};
  RenameMap merged = MergeMaps(maps, {});
  CHECK(merged.size() == 2);

  BoundaryMarker f;
  f.identifier = "f";
  f.owner_file = 0;
  f.binding = Binding{1, "f"};
  f.frozen_name = "f";
  RenameMap p, q;
  p.Set(RenameKey{0, 1, "f"}, RenameEntry{"f", 1, true});
  q.Set(RenameKey{0, 1, "f"}, RenameEntry{"f", 1, true});
  std::vector<RenameMap> agree = {p, q};
  std::vector<BoundaryMarker> markers = {f};
  CHECK(MergeMaps(agree, markers).OutputName(0, Binding{1, "f"}) == "f");

  q.Set(RenameKey{0, 1, "f"}, RenameEntry{"b", 1, false});
  std::vector<RenameMap> corrupt = {p, q};
  CHECK_THROWS_AS(MergeMaps(corrupt, markers), MarkerConflict);
}

TEST_CASE("shorthand properties expand") {
  const std::string src = "function f(width){ return { width }; }";
  ScopeTree t = TreeOf(src);
  RenameMap m = RenameFile(t, RenameConstraints{});
  CHECK(Apply(src, t, m) == "function a(a){ return { width:a }; }");
}

TEST_CASE("rename dump") {
  ScopeTree t = TreeOf("function f(alpha){ return alpha; }");
  RenameMap m = RenameFile(t, RenameConstraints{});
  CHECK(DumpRenames(t, m) == "1\tf\ta\n2\talpha\ta\n");
}

TEST_CASE("renamer output is safe on random trees") {
  std::mt19937_64 rng(23);
  testing::RandomTreeOptions o;
  o.dynamic_probability = 0.05;
  for (int iter = 0; iter < 500; ++iter) {
    ScopeTree t = testing::RandomScopeTree(rng, o);
    RenameMap m = RenameFile(t, RenameConstraints{});
    SafetyReport r = CheckSafety(t, m, RenameConstraints{});
    CHECK(r.ok());
    CHECK(m == RenameFile(t, RenameConstraints{}));
  }
}

TEST_CASE("greedy cost is minimal on small trees") {
  std::mt19937_64 rng(29);
  testing::RandomTreeOptions o;
  o.max_bindings = 4;
  o.max_depth = 3;
  o.references = 8;
  o.vocabulary = {"a", "b", "x", "y", "c"};
  int checked = 0;
  for (int iter = 0; iter < 60; ++iter) {
    ScopeTree t = testing::RandomScopeTree(rng, o);
    RenameMap greedy = RenameFile(t, RenameConstraints{});
    auto best = testing::BruteForceMinCost(t, RenameConstraints{}, 4);
    REQUIRE(best.has_value());
    CHECK(Cost(greedy) == *best);
    ++checked;
  }
  CHECK(checked == 60);
}

}  // TEST_SUITE
