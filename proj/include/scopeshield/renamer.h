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


#ifndef SCOPESHIELD_RENAMER_H_
#define SCOPESHIELD_RENAMER_H_

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "scopeshield/emit.h"
#include "scopeshield/name_pool.h"
#include "scopeshield/pasa.h"
#include "scopeshield/scope_tree.h"

namespace scopeshield {

struct RenameKey {
  FileId file = 0;
  ScopeId scope = 0;
  std::string name;

  friend bool operator==(const RenameKey&, const RenameKey&) = default;
  friend auto operator<=>(const RenameKey&, const RenameKey&) = default;
};

struct RenameEntry {
  std::string name;
  uint32_t usage = 0;
  bool frozen = false;

  friend bool operator==(const RenameEntry&, const RenameEntry&) = default;
};

// Binding -> output identifier. Global bindings are never stored and always
// map to themselves.
class RenameMap {
 public:
  void Set(const RenameKey& key, RenameEntry entry) {
    entries_[key] = std::move(entry);
  }
  const RenameEntry* Find(const RenameKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }
  bool Contains(const RenameKey& key) const { return Find(key) != nullptr; }
  // Output name of `binding` in `file`; identity when absent.
  std::string OutputName(FileId file, const Binding& binding) const;

  const std::map<RenameKey, RenameEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const RenameMap&, const RenameMap&) = default;

 private:
  std::map<RenameKey, RenameEntry> entries_;
};

// Raised when a scope is processed before an enclosing scope whose bindings
// it references.
class OrderViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MarkerConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RenameConstraints {
  // Program-wide link result; null for a standalone file.
  const LinkResult* link = nullptr;
  // Never produced as output names.
  const HostNames* hosts = nullptr;
  // When false, a scope's forbidden set only holds names its own direct
  // references resolve to outside it, not those of its whole subtree. Unsafe;
  // exists to demonstrate that the check catches the resulting captures.
  bool subtree_forbidden = true;
};

// Names scope `scope` may not assign: current names of outer bindings
// referenced anywhere in its subtree, plus names of its own fixed
// (frozen or pre-assigned) declarations. Throws OrderViolation if an outer
// binding has not been named in `state` yet.
std::unordered_set<std::string> ForbiddenSet(const ScopeTree& tree,
                                             ScopeId scope,
                                             const RenameMap& state,
                                             const RenameConstraints& c);

// Renames every binding of `tree` (pre-order, per-scope restart of the name
// pool). Deterministic for a given tree and constraints.
RenameMap RenameFile(const ScopeTree& tree, const RenameConstraints& c);

// Renames a partition's files and merges the result.
RenameMap RenamePartition(std::span<const ScopeTree* const> trees,
                          const RenameConstraints& c);

// Union of partition maps. Every binding named by a marker must map to the
// marker's frozen name in all maps containing it; throws MarkerConflict
// otherwise.
RenameMap MergeMaps(std::span<const RenameMap> maps,
                    std::span<const BoundaryMarker> markers);

// Σ |name| × usage over the map's bindings.
uint64_t Cost(const RenameMap& map);

struct SafetyViolation {
  FileId file = 0;
  Span span;
  std::string original;
  std::string renamed;
  std::string reason;
};

struct SafetyReport {
  std::vector<SafetyViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Verifies that every occurrence still resolves to its original binding
// after renaming, that renaming is injective per scope, and that renamed
// shared-global declarations agree with the link result.
SafetyReport CheckSafety(const ScopeTree& tree, const RenameMap& map,
                         const RenameConstraints& c);
SafetyReport CheckSafety(std::span<const ScopeTree* const> trees,
                         const RenameMap& map, const RenameConstraints& c);

// Source patches replacing every renamed occurrence. Shorthand properties
// are expanded to `key: name`.
std::vector<Patch> RenamePatches(const ScopeTree& tree, const RenameMap& map);

// One line per declaration: scopeId<TAB>original<TAB>renamed.
std::string DumpRenames(const ScopeTree& tree, const RenameMap& map);

}  // namespace scopeshield

#endif  // SCOPESHIELD_RENAMER_H_
