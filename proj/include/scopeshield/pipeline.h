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


#ifndef SCOPESHIELD_PIPELINE_H_
#define SCOPESHIELD_PIPELINE_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scopeshield/transforms.h"

namespace scopeshield {

class FatalConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ObfuscationConfig {
  std::string input_root;
  std::string output_root;
  uint32_t workers = 1;
  bool rename = true;
  bool strings = true;
  bool property_access = true;
  bool minify = true;
  bool count_decodes = false;
  // Extra host names, one per line; added to the built-in list.
  std::string allowlist_path;
  std::string engine = "node {file}";
  uint64_t seed = 0;
  size_t unit_bytes = kDefaultUnitBytes;
  // Optional diagnostic dumps (empty = off).
  std::string dump_scopes_path;
  std::string dump_renames_path;

  // Throws FatalConfigError on invalid values.
  void Validate() const;
};

// Overlays the keys present in a JSON object onto `base`. Unknown keys and
// ill-typed values raise FatalConfigError.
ObfuscationConfig ParseConfigJson(std::string_view json,
                                  ObfuscationConfig base = {});
std::string ConfigToJson(const ObfuscationConfig& config);

struct PhaseTimes {
  double parse_ms = 0;
  double pasa_ms = 0;
  double rename_ms = 0;
  double transform_ms = 0;
  double emit_ms = 0;
};

struct FileIssue {
  std::string path;
  std::string kind;  // ParseError, SafetyViolation, IoError, Unsupported
  std::string message;
};

struct RunReport {
  uint64_t files_total = 0;
  uint64_t files_transformed = 0;
  uint64_t files_copied = 0;
  uint64_t cut_weight = 0;
  PhaseTimes phase_times;
  uint64_t peak_memory_bytes = 0;
  uint64_t output_bytes = 0;
  uint64_t input_bytes = 0;
  uint32_t workers = 1;
  uint32_t partitions = 1;
  uint64_t renamed_bindings = 0;
  uint64_t rename_cost = 0;
  TransformStats transform;
  std::vector<FileIssue> issues;
  bool fatal = false;
  std::string fatal_message;

  // 0 success, 2 some file-level error, 3 fatal.
  int ExitCode() const;
  std::string ToJson(const ObfuscationConfig* config = nullptr) const;
};

struct SourceFile {
  std::string path;  // relative, '/'-separated
  std::string text;
};

struct ProgramResult {
  std::vector<std::string> outputs;  // parallel to the input files
  RunReport report;
};

// In-memory driver over a set of JavaScript sources (all treated as
// supported files). input_root/output_root are ignored.
ProgramResult ObfuscateSources(std::span<const SourceFile> files,
                               const ObfuscationConfig& config);

// Filesystem driver: mirrors input_root into output_root. Never throws for
// file-level problems; fatal problems are reported with `fatal` set.
RunReport ObfuscateProject(const ObfuscationConfig& config);

// Peak resident set size of this process.
uint64_t PeakMemoryBytes();

}  // namespace scopeshield

#endif  // SCOPESHIELD_PIPELINE_H_
