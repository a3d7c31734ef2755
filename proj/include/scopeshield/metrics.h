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


#ifndef SCOPESHIELD_METRICS_H_
#define SCOPESHIELD_METRICS_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scopeshield/ast.h"

namespace scopeshield {

class ZeroInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CompressorFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (output - input) / input × 100. Throws ZeroInput when input is 0.
double SizeInflation(uint64_t input_bytes, uint64_t output_bytes);

// 1 per function, 1 for the module body, plus one per if, loop, case,
// catch, conditional expression, && and ||.
uint64_t CyclomaticComplexity(const Ast& ast);

// Parses `source` and measures it; nullopt if it does not parse.
std::optional<uint64_t> CyclomaticComplexity(std::string_view source);

// Name of the compressor used by CompressedSize.
const char* CompressorName();

// Size of the xz (LZMA2) encoding of `data`. Throws CompressorFailure.
uint64_t CompressedSize(std::string_view data);

// (C(xy) - min(C(x), C(y))) / max(C(x), C(y)) with xy the raw
// concatenation x then y.
double NidFromSizes(uint64_t cx, uint64_t cy, uint64_t cxy);
double Nid(std::string_view x, std::string_view y);

struct FileMetrics {
  std::string path;
  uint64_t input_bytes = 0;
  uint64_t output_bytes = 0;
  double inflation_percent = 0;
  std::optional<uint64_t> cyclomatic_original;
  std::optional<uint64_t> cyclomatic_obfuscated;
  double nid = 0;
};

struct SizeClassRow {
  std::string size_class;
  uint64_t files = 0;
  uint64_t input_bytes = 0;
  uint64_t output_bytes = 0;
  double inflation_percent = 0;
};

struct MetricsReport {
  std::vector<FileMetrics> files;
  uint64_t input_bytes = 0;
  uint64_t output_bytes = 0;
  double inflation_percent = 0;
  uint64_t cyclomatic_original = 0;
  uint64_t cyclomatic_obfuscated = 0;
  double cyclomatic_ratio = 0;
  // Input-size-weighted mean.
  double nid = 0;
  std::vector<std::string> missing;  // original files without a counterpart

  std::vector<SizeClassRow> SizeClasses() const;
  std::string ToJson() const;
  // Size class, average output size, inflation percent.
  std::string ToTable() const;
};

struct FilePair {
  std::string path;
  std::string original;
  std::string obfuscated;
};

MetricsReport ComputeMetrics(const std::vector<FilePair>& pairs);

// Pairs JavaScript files by relative path under the two roots.
MetricsReport ComputeMetrics(const std::string& original_root,
                             const std::string& obfuscated_root);

// "89 KB", "1.7 MB", ...
std::string FormatBytes(uint64_t bytes);

}  // namespace scopeshield

#endif  // SCOPESHIELD_METRICS_H_
