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


#include "test_support.h"

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "scopeshield/corpus.h"
#include "scopeshield/emit.h"
#include "scopeshield/name_pool.h"
#include "scopeshield/pipeline.h"

namespace fs = std::filesystem;

namespace scopeshield::testing {

std::string DataDir() { return SCOPESHIELD_TEST_DATA; }
std::string CliPath() { return SCOPESHIELD_CLI; }

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "scopeshield-XXXXXX").string();
  if (mkdtemp(tmpl.data()) == nullptr)
    throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void WriteFile(const std::string& path, const std::string& text) {
  fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(std::mt19937_64& rng, const RandomTreeOptions& o)
      : rng_(rng), o_(o) {}

  ScopeTree Build() {
    tree_.set_is_module(true);
    Grow(tree_.module_scope(), 1);
    for (uint32_t i = 0; i < o_.references; ++i) {
      const ScopeId s = 1 + Pick(tree_.size() - 1);
      tree_.AddReference(s, Word(), NextSpan());
    }
    tree_.Finalize();
    return std::move(tree_);
  }

 private:
  uint64_t Pick(uint64_t n) { return rng_() % n; }
  const std::string& Word() { return o_.vocabulary[Pick(o_.vocabulary.size())]; }
  Span NextSpan() {
    pos_ += 4;
    return Span{pos_, pos_ + 2};
  }

  void Grow(ScopeId scope, uint32_t depth) {
    const uint32_t decls = static_cast<uint32_t>(Pick(4));
    for (uint32_t i = 0; i < decls && bindings_ < o_.max_bindings; ++i) {
      const std::string& name = Word();
      const auto before = tree_.node(scope).declarations.size();
      tree_.Declare(scope, name, NextSpan(), static_cast<DeclKind>(Pick(4)));
      if (tree_.node(scope).declarations.size() > before) ++bindings_;
    }
    if (o_.dynamic_probability > 0 &&
        static_cast<double>(rng_() % 10000) / 10000.0 < o_.dynamic_probability)
      tree_.MarkDynamic(scope);
    if (depth >= o_.max_depth) return;
    const uint32_t children = static_cast<uint32_t>(Pick(o_.max_children + 1));
    for (uint32_t i = 0; i < children; ++i) {
      const ScopeKind kind = Pick(2) ? ScopeKind::kFunction : ScopeKind::kBlock;
      Grow(tree_.AddScope(kind, scope, NextSpan()), depth + 1);
    }
  }

  std::mt19937_64& rng_;
  const RandomTreeOptions& o_;
  ScopeTree tree_;
  uint32_t bindings_ = 0;
  uint32_t pos_ = 0;
};

}  // namespace

ScopeTree RandomScopeTree(std::mt19937_64& rng, const RandomTreeOptions& o) {
  return TreeBuilder(rng, o).Build();
}

uint32_t BindingCount(const ScopeTree& tree) {
  uint32_t n = 0;
  for (const ScopeNode& s : tree.nodes())
    n += static_cast<uint32_t>(s.declarations.size());
  return n;
}

std::string CaptureCounterexample() {
  return "var outerValue = 1;\n"
         "function middle() {\n"
         "  var middleLocal = 2;\n"
         "  function leaf() { return outerValue; }\n"
         "  return leaf() + middleLocal;\n"
         "}\n"
         "export { middle };\n";
}

std::optional<uint64_t> BruteForceMinCost(const ScopeTree& tree,
                                          const RenameConstraints& c,
                                          uint32_t candidates) {
  // Start from the renamer's key set so frozen entries stay as they are.
  RenameMap base = RenameFile(tree, c);
  std::vector<RenameKey> open;
  std::vector<std::vector<std::string>> choices;
  NamePool pool([&c](std::string_view n) {
    return c.hosts != nullptr && c.hosts->Contains(n);
  });
  for (const auto& [key, entry] : base.entries()) {
    if (entry.frozen) continue;
    std::vector<std::string> names;
    for (uint32_t i = 0; i < candidates; ++i) names.push_back(pool.At(i));
    if (std::find(names.begin(), names.end(), key.name) == names.end())
      names.push_back(key.name);
    open.push_back(key);
    choices.push_back(std::move(names));
  }
  std::optional<uint64_t> best;
  std::vector<size_t> digit(open.size(), 0);
  while (true) {
    RenameMap trial = base;
    for (size_t i = 0; i < open.size(); ++i) {
      RenameEntry e = *base.Find(open[i]);
      e.name = choices[i][digit[i]];
      trial.Set(open[i], e);
    }
    if (CheckSafety(tree, trial, c).ok()) {
      const uint64_t cost = Cost(trial);
      if (!best || cost < *best) best = cost;
    }
    size_t i = 0;
    while (i < open.size() && ++digit[i] == choices[i].size()) digit[i++] = 0;
    if (i == open.size()) break;
  }
  return best;
}

EquivalenceCorpus WriteEquivalenceCorpus(const std::string& dir,
                                         uint32_t generated) {
  EquivalenceCorpus corpus;
  for (uint32_t i = 0; i < generated; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "gen_%03u.js", i);
    // Sizes cycle through 1 KB .. 16 KB so units split differently.
    const uint64_t bytes = 1024ull << (i % 5);
    WriteFile(dir + "/" + name, GenerateProgram(1000 + i, bytes));
    corpus.cases.push_back(TestCase{name});
    ++corpus.programs;
  }
  const fs::path data = fs::path(DataDir()) / "equiv";
  fs::copy(data, dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  for (const auto& entry : fs::directory_iterator(data)) {
    if (entry.path().extension() != ".js") continue;
    corpus.cases.push_back(TestCase{entry.path().filename().string()});
    ++corpus.programs;
  }
  corpus.cases.push_back(TestCase{"multi/main.mjs"});
  ++corpus.programs;
  std::sort(corpus.cases.begin(), corpus.cases.end(),
            [](const TestCase& a, const TestCase& b) { return a.entry < b.entry; });
  nlohmann::json manifest = nlohmann::json::array();
  for (const TestCase& t : corpus.cases) manifest.push_back({{"entry", t.entry}});
  WriteFile(dir + "/../cases.json", manifest.dump(1));
  return corpus;
}

std::vector<std::string> WriteInflationCorpus(const std::string& dir) {
  const uint64_t kSizes[] = {50 << 10, 120 << 10, 500 << 10, 1 << 20,
                             2 << 20,  5 << 20};
  ObfuscationConfig mangle;
  mangle.strings = false;
  mangle.property_access = false;
  std::vector<std::string> paths;
  uint64_t seed = 77;
  bool mangled = false;
  for (uint64_t size : kSizes) {
    // Every other file also has its identifiers shortened, as a mangling
    // minifier would leave it.
    auto make = [&](uint64_t bytes) {
      std::string text = Minify(GenerateProgram(seed, bytes));
      if (!mangled) return text;
      std::vector<SourceFile> one = {{"m.js", std::move(text)}};
      return ObfuscateSources(one, mangle).outputs[0];
    };
    const std::string probe = make(size);
    const double ratio = static_cast<double>(probe.size()) / static_cast<double>(size);
    const std::string text = make(static_cast<uint64_t>(static_cast<double>(size) / ratio));
    const std::string name = std::string(mangled ? "mangled_" : "min_") +
                             std::to_string(size >> 10) + "k.js";
    WriteFile(dir + "/" + name, text);
    paths.push_back(name);
    ++seed;
    mangled = !mangled;
  }
  return paths;
}

}  // namespace scopeshield::testing
