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


// String-literal encoding and property-access rewriting, applied per
// transformation unit.

#ifndef SCOPESHIELD_TRANSFORMS_H_
#define SCOPESHIELD_TRANSFORMS_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scopeshield/ast.h"
#include "scopeshield/emit.h"
#include "scopeshield/pasa.h"
#include "scopeshield/scope_tree.h"

namespace scopeshield {

// A contiguous run of top-level statements. The units of a file cover it
// exactly, in order.
struct Unit {
  uint32_t index = 0;
  Span span;
  // Cross-boundary names the unit uses, sorted: bindings declared outside
  // the unit, imported bindings, and free names other than host names.
  std::vector<std::string> external_deps;
};

inline constexpr size_t kDefaultUnitBytes = 4096;

// Groups top-level statements into units of at least `min_bytes` (the last
// unit may be smaller). A file without statements has no units.
std::vector<Unit> PlanUnits(const Ast& ast, const ScopeTree& tree,
                            size_t source_size,
                            size_t min_bytes = kDefaultUnitBytes,
                            const HostNames* hosts = nullptr);

// Program-unique names for the helpers injected into each unit. Names are
// '$'-prefixed so they never meet pool-generated names, and skip every
// '$'-identifier the program already spells.
class HelperNamer {
 public:
  explicit HelperNamer(std::set<std::string> taken = {})
      : taken_(std::move(taken)) {}
  std::string Name(FileId file, uint32_t unit, char role) const;

 private:
  std::set<std::string> taken_;
};

struct TransformOptions {
  bool strings = true;
  bool property_access = true;
  // Adds a global counter bumped whenever a unit's table is decoded.
  bool count_decodes = false;
  uint64_t seed = 0;
  // Literals shorter than this many UTF-16 code units stay as they are.
  uint32_t min_string_units = 2;
};

struct TransformStats {
  uint64_t strings_encoded = 0;
  uint64_t properties_rewritten = 0;
  // Distinct property names per unit, summed over units.
  uint64_t property_slots = 0;
  uint64_t units_with_helpers = 0;

  TransformStats& operator+=(const TransformStats& o);
};

struct TransformContext {
  TransformOptions options;
  std::string path;
  FileId file = 0;
  const HelperNamer* namer = nullptr;
};

// Patches for one unit: literal/member replacements inside the unit plus a
// zero-width insertion of the unit's decoder at its start (after any
// hashbang and directive prologue for the first unit).
std::vector<Patch> TransformUnit(const Ast& ast, const ScopeTree& tree,
                                 const Unit& unit, std::string_view source,
                                 const TransformContext& ctx,
                                 TransformStats* stats);

// All units of a file.
std::vector<Patch> TransformFile(const Ast& ast, const ScopeTree& tree,
                                 std::span<const Unit> units,
                                 std::string_view source,
                                 const TransformContext& ctx,
                                 TransformStats* stats);

// Value of a JavaScript string literal (quotes included) as UTF-16 code
// units; nullopt for malformed input.
std::optional<std::u16string> DecodeStringLiteral(std::string_view literal);

// Double-quoted literal holding the encoding of table entry `n` under `key`.
std::string EncodeTableEntry(const std::u16string& value, uint32_t key,
                             uint32_t n);

// Inverse of EncodeTableEntry, on decoded literal contents.
std::u16string DecodeTableEntry(const std::u16string& encoded, uint32_t key,
                                uint32_t n);

// Double-quoted JavaScript literal for `value`.
std::string QuoteUtf16(const std::u16string& value);

std::u16string Utf8ToUtf16(std::string_view text);

uint32_t UnitKey(const std::string& path, uint32_t unit, uint64_t seed);

}  // namespace scopeshield

#endif  // SCOPESHIELD_TRANSFORMS_H_
