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


#include "scopeshield/corpus.h"

#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

namespace scopeshield {

namespace {

constexpr std::array<const char*, 24> kNouns = {
    "player", "inventory", "score",   "level",  "enemy",  "weapon",
    "quest",  "damage",    "health",  "speed",  "timer",  "bonus",
    "item",   "coin",      "shield",  "portal", "map",    "tile",
    "sprite", "energy",    "ammo",    "badge",  "wave",   "shop"};

constexpr std::array<const char*, 12> kVerbs = {
    "compute", "update", "resolve", "collect", "measure", "render",
    "apply",   "build",  "merge",   "scan",    "spawn",   "reward"};

class Writer {
 public:
  explicit Writer(uint64_t seed) : rng_(seed) {}

  uint64_t Pick(uint64_t n) { return rng_() % n; }
  int Num(int lo, int hi) { return lo + static_cast<int>(Pick(hi - lo + 1)); }
  std::string Noun() { return kNouns[Pick(kNouns.size())]; }
  std::string Verb() { return kVerbs[Pick(kVerbs.size())]; }
  std::string Cap(std::string s) {
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
  }

  void Snippet(std::string& out, uint32_t id);

 private:
  std::mt19937_64 rng_;
};

void Writer::Snippet(std::string& out, uint32_t id) {
  const std::string n = std::to_string(id);
  const std::string noun = Noun();
  const std::string verb = Verb();
  const std::string fn = verb + Cap(noun) + "Total" + n;
  const int a = Num(2, 17), b = Num(3, 29), c = Num(5, 40);
  switch (Pick(14)) {
    case 0:
      out += "  function " + fn + "(itemCount) {\n"
             "    var runningTotal = 0;\n"
             "    for (var index = 0; index < itemCount; index++) {\n"
             "      runningTotal += (index * " + std::to_string(a) + " + " +
             std::to_string(b) + ") % " + std::to_string(c) + ";\n"
             "    }\n"
             "    return runningTotal;\n"
             "  }\n"
             "  record(\"" + noun + "_total_" + n + "\", " + fn + "(" +
             std::to_string(c) + "));\n";
      break;
    case 1: {
      const std::string cls = Cap(noun) + "State" + n;
      out += "  class " + cls + " {\n"
             "    constructor(displayName, startingPoints) {\n"
             "      this.displayName = displayName;\n"
             "      this.healthPoints = startingPoints;\n"
             "      this.history = [];\n"
             "    }\n"
             "    takeDamage(amount) {\n"
             "      this.healthPoints -= amount;\n"
             "      this.history.push(amount);\n"
             "      return this.healthPoints > 0 ? \"alive\" : \"down\";\n"
             "    }\n"
             "    get summary() {\n"
             "      return this.displayName + \"/\" + this.healthPoints + \"/\" + "
             "this.history.length;\n"
             "    }\n"
             "    static create(label) {\n"
             "      return new " + cls + "(label, " + std::to_string(c * 3) +
             ");\n"
             "    }\n"
             "  }\n"
             "  var " + noun + "Instance" + n + " = " + cls + ".create(\"" +
             noun + "-" + n + "\");\n"
             "  record(\"" + cls + "\", " + noun + "Instance" + n +
             ".takeDamage(" + std::to_string(a) + ") + \":\" + " + noun +
             "Instance" + n + ".takeDamage(" + std::to_string(b) +
             ") + \":\" + " + noun + "Instance" + n + ".summary);\n";
      break;
    }
    case 2:
      out += "  const make" + Cap(noun) + "Counter" + n +
             " = (startValue) => {\n"
             "    let count = startValue;\n"
             "    return { next: () => ++count, reset: function () { count = "
             "startValue; return count; } };\n"
             "  };\n"
             "  var counter" + n + " = make" + Cap(noun) + "Counter" + n + "(" +
             std::to_string(a) + ");\n"
             "  counter" + n + ".next(); counter" + n + ".next();\n"
             "  record(\"counter_" + n + "\", counter" + n + ".next() + \",\" + "
             "counter" + n + ".reset());\n";
      break;
    case 3:
      out += "  var " + noun + "Config" + n + " = { speedFactor: " +
             std::to_string(a) + ", label: \"" + noun + "-level-" + n +
             "\", enabled: " + (Pick(2) ? "true" : "false") +
             ", nested: { depth: " + std::to_string(b) + " } };\n"
             "  record(\"config_" + n + "\", " + noun + "Config" + n +
             ".enabled && " + noun + "Config" + n + ".speedFactor > 8 ? " + noun +
             "Config" + n + ".label : \"disabled:\" + " + noun + "Config" + n +
             ".nested.depth);\n";
      break;
    case 4:
      out += "  function fibonacci" + n + "(position) {\n"
             "    if (position < 2) return position;\n"
             "    return fibonacci" + n + "(position - 1) + fibonacci" + n +
             "(position - 2);\n"
             "  }\n"
             "  function greatestDivisor" + n + "(left, right) {\n"
             "    return right === 0 ? left : greatestDivisor" + n +
             "(right, left % right);\n"
             "  }\n"
             "  record(\"recursion_" + n + "\", fibonacci" + n + "(" +
             std::to_string(Num(8, 16)) + ") + \"/\" + greatestDivisor" + n + "(" +
             std::to_string(a * c) + ", " + std::to_string(b * c) + "));\n";
      break;
    case 5:
      out += "  var " + noun + "Words" + n + " = \"" + noun + " " + verb +
             " alpha beta gamma " + n + "\".split(\" \");\n"
             "  var " + noun + "Label" + n + " = " + noun + "Words" + n +
             ".map(function (word) { return word.charAt(0).toUpperCase() + "
             "word.slice(1); }).join(\"-\");\n"
             "  record(\"words_" + n + "\", `${" + noun + "Label" + n +
             "} has ${" + noun + "Words" + n + ".length} parts`);\n";
      break;
    case 6:
      out += "  var " + noun + "Values" + n + " = [";
      for (int i = 0; i < 8; ++i)
        out += (i ? ", " : "") + std::to_string(Num(0, 99));
      out += "];\n"
             "  var " + noun + "Summary" + n + " = " + noun + "Values" + n +
             ".filter((value) => value % 2 === 0).map((value) => value * " +
             std::to_string(a) + ").reduce((sum, value) => sum + value, 0);\n"
             "  record(\"array_" + n + "\", " + noun + "Summary" + n + ");\n";
      break;
    case 7:
      out += "  function classify" + n + "(code) {\n"
             "    switch (code % 4) {\n"
             "      case 0: return \"north\";\n"
             "      case 1: return \"east\";\n"
             "      case 2: return \"south\";\n"
             "      default: return \"west\";\n"
             "    }\n"
             "  }\n"
             "  record(\"switch_" + n + "\", [" + std::to_string(a) + ", " +
             std::to_string(b) + ", " + std::to_string(c) + "].map(classify" +
             n + ").join(\",\"));\n";
      break;
    case 8:
      out += "  function guarded" + n + "(input) {\n"
             "    try {\n"
             "      if (input > " + std::to_string(b) +
             ") throw new Error(\"too large: \" + input);\n"
             "      return \"ok:\" + input;\n"
             "    } catch (problem) {\n"
             "      return \"caught:\" + problem.message;\n"
             "    } finally {\n"
             "      attempts" + n + " += 1;\n"
             "    }\n"
             "  }\n"
             "  var attempts" + n + " = 0;\n"
             "  record(\"try_" + n + "\", guarded" + n + "(" + std::to_string(a) +
             ") + \"|\" + guarded" + n + "(" + std::to_string(c + b) +
             ") + \"|\" + attempts" + n + ");\n";
      break;
    case 9:
      out += "  function combine" + n + "({ first, second = " +
             std::to_string(a) + " }, ...rest) {\n"
             "    const [head, ...tail] = rest;\n"
             "    return first * second + (head || 0) + tail.length;\n"
             "  }\n"
             "  record(\"destructure_" + n + "\", combine" + n + "({ first: " +
             std::to_string(b) + " }, " + std::to_string(c) + ", 1, 2, 3));\n";
      break;
    case 10:
      // Inner functions reuse outer names to exercise shadowing.
      out += "  var value" + n + " = " + std::to_string(a) + ";\n"
             "  function outer" + n + "(value) {\n"
             "    var total = value;\n"
             "    function inner(total) {\n"
             "      var value = total * 2;\n"
             "      return value + 1;\n"
             "    }\n"
             "    { let total = " + std::to_string(b) + "; value += total; }\n"
             "    return inner(total) + value + value" + n + ";\n"
             "  }\n"
             "  record(\"shadow_" + n + "\", outer" + n + "(" +
             std::to_string(c) + "));\n";
      break;
    case 11:
      out += "  var pairs" + n + " = 0;\n"
             "  search" + n + ": for (var row = 0; row < " + std::to_string(a) +
             "; row++) {\n"
             "    var column = 0;\n"
             "    while (column < " + std::to_string(b) + ") {\n"
             "      column++;\n"
             "      if ((row * column) % " + std::to_string(c) +
             " === 0) continue search" + n + ";\n"
             "      pairs" + n + "++;\n"
             "    }\n"
             "  }\n"
             "  var countdown" + n + " = 3;\n"
             "  do { pairs" + n + " += countdown" + n + "; } while (--countdown" +
             n + " > 0);\n"
             "  record(\"loops_" + n + "\", pairs" + n + ");\n";
      break;
    case 12:
      out += "  function pack" + n + "(alpha, beta) {\n"
             "    var gamma = alpha + beta;\n"
             "    return { alpha, beta, gamma, describe() { return this.alpha + "
             "\"+\" + this.beta + \"=\" + this.gamma; } };\n"
             "  }\n"
             "  record(\"shorthand_" + n + "\", pack" + n + "(" +
             std::to_string(a) + ", " + std::to_string(b) + ").describe());\n";
      break;
    default:
      out += "  var pattern" + n + " = /^[a-z]+-(\\d+)$/;\n"
             "  var matched" + n + " = pattern" + n + ".exec(\"" + noun + "-" +
             std::to_string(c) + "\");\n"
             "  record(\"regex_" + n + "\", matched" + n + " ? matched" + n +
             "[1] : \"none\");\n";
      break;
  }
}

}  // namespace

std::string GenerateProgram(uint64_t seed, uint64_t target_bytes) {
  Writer w(seed);
  std::string out =
      "(function () {\n"
      "  \"use strict\";\n"
      "  var output = [];\n"
      "  function record(label, value) {\n"
      "    output.push(label + \"=\" + value);\n"
      "  }\n";
  const std::string tail =
      "  var checksum = 0;\n"
      "  for (var line of output) {\n"
      "    for (var offset = 0; offset < line.length; offset++) {\n"
      "      checksum = (checksum * 31 + line.charCodeAt(offset)) >>> 0;\n"
      "    }\n"
      "  }\n"
      "  console.log(output.length + \" \" + checksum);\n"
      "  console.log(output.slice(0, 3).join(\"\\n\"));\n"
      "})();\n";
  uint32_t id = 0;
  while (out.size() + tail.size() < target_bytes || id == 0)
    w.Snippet(out, id++);
  out += tail;
  return out;
}

CorpusStats WriteScalingCorpus(const std::string& dir, uint64_t total_bytes,
                               uint64_t file_bytes, uint32_t variants) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> templates;
  for (uint32_t v = 0; v < std::max<uint32_t>(variants, 1); ++v)
    templates.push_back(GenerateProgram(0x5eed0000u + v, file_bytes));
  CorpusStats stats;
  while (stats.bytes < total_bytes) {
    char name[32];
    std::snprintf(name, sizeof(name), "f%05llu.js",
                  static_cast<unsigned long long>(stats.files));
    const std::string& text = templates[stats.files % templates.size()];
    std::ofstream out(fs::path(dir) / name, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), text.size()))
      throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
    ++stats.files;
    stats.bytes += text.size();
  }
  return stats;
}

}  // namespace scopeshield
