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


// Differential testing of original vs obfuscated programs under an external
// JavaScript engine.

#ifndef SCOPESHIELD_EQUIVHARNESS_H_
#define SCOPESHIELD_EQUIVHARNESS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scopeshield {

class EngineNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CaseManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CompareMode { kExact, kNormalized };

struct TestCase {
  std::string entry;  // relative to the roots
  std::vector<std::string> args;
  std::string stdin_data;
  CompareMode mode = CompareMode::kExact;
  double timeout_s = 10;
};

// Manifest: a JSON array of {entry, args, stdin, mode, timeout_s}, or an
// object with such an array under "cases".
std::vector<TestCase> ParseCases(std::string_view json);
std::vector<TestCase> LoadCases(const std::string& path);

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool spawn_failed = false;
  std::string out;
  std::string err;
};

// Runs argv[0] (looked up on PATH) with the given stdin, capturing stdout
// and stderr; kills it after `timeout_s`.
ProcessResult RunProcess(const std::vector<std::string>& argv,
                         std::string_view stdin_data, double timeout_s);

// Splits the template on whitespace (single and double quotes group) and
// substitutes {file}; case arguments are appended.
std::vector<std::string> ExpandEngine(std::string_view engine_template,
                                      const std::string& file,
                                      const std::vector<std::string>& args);

// Throws EngineNotFound if the template's program cannot be executed.
void CheckEngine(std::string_view engine_template);

enum class VerdictKind { kEquivalent, kDivergent, kError, kTimeout };
const char* VerdictKindName(VerdictKind kind);

struct Verdict {
  std::string entry;
  VerdictKind kind = VerdictKind::kEquivalent;
  std::string side;  // for errors and timeouts: original / obfuscated
  std::string message;
  // Divergences: 1-based line of the first difference and both lines.
  uint64_t line = 0;
  std::string original_line;
  std::string obfuscated_line;
  std::string rename_dump;

  std::string ToJsonLine() const;
};

// Compares two stdout captures under `mode`; fills the divergence fields
// of `verdict` when they differ.
bool SameOutput(std::string_view original, std::string_view obfuscated,
                CompareMode mode, Verdict* verdict = nullptr);

std::vector<Verdict> RunDifferential(const std::string& original_root,
                                     const std::string& obfuscated_root,
                                     const std::vector<TestCase>& cases,
                                     std::string_view engine_template,
                                     uint32_t workers = 1,
                                     const std::string& rename_dump = "");

double EquivalenceRate(const std::vector<Verdict>& verdicts);

// Nondeterminism sources (Date.now, argument-less new Date(), Math.random,
// performance.now, crypto.getRandomValues) used without the program
// installing its own replacement. Returns one message per finding.
std::vector<std::string> LintDeterminism(std::string_view source);

}  // namespace scopeshield

#endif  // SCOPESHIELD_EQUIVHARNESS_H_
