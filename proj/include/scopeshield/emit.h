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

#ifndef SCOPESHIELD_EMIT_H_
#define SCOPESHIELD_EMIT_H_

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scopeshield/lexer.h"

namespace scopeshield {

struct Patch {
  Span span;
  std::string replacement;

  friend bool operator==(const Patch&, const Patch&) = default;
};

class OverlappingPatches : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Sorts patches by (start, end). Zero-width insertions sort before a patch
// starting at the same offset.
void SortPatches(std::vector<Patch>& patches);

// Replaces each patch span of `source` by its replacement in one pass. Bytes
// outside all spans are copied unchanged. `patches` must be sorted and
// non-overlapping; throws OverlappingPatches otherwise.
std::string Emit(std::string_view source, std::span<const Patch> patches);

// Strips comments and collapses whitespace while keeping every line break
// that automatic semicolon insertion could depend on.
std::string Minify(std::string_view source, std::span<const Token> tokens);
std::string Minify(std::string_view source);

}  // namespace scopeshield

#endif  // SCOPESHIELD_EMIT_H_
