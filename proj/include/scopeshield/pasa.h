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

// Cross-file half of the parallel-aware scope analysis: the file dependency
// graph, its edge-cut partitioning, and the coordination step that decides
// which names are visible across files.

#ifndef SCOPESHIELD_PASA_H_
#define SCOPESHIELD_PASA_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scopeshield/parser.h"
#include "scopeshield/scope_tree.h"

namespace scopeshield {

// Host and runtime names that are never renamed and never treated as shared
// program state (console, Math, window, wx, ...).
class HostNames {
 public:
  static HostNames Default();
  // One name per line; '#' starts a comment. Throws std::runtime_error.
  static HostNames FromFile(const std::string& path);

  bool Contains(std::string_view name) const {
    return names_.count(std::string(name)) > 0;
  }
  void Add(std::string name) { names_.insert(std::move(name)); }
  const std::set<std::string>& names() const { return names_; }

 private:
  std::set<std::string> names_;
};

struct DependencyEdge {
  FileId from = 0;  // importer (or lower file id for implicit globals)
  FileId to = 0;
  std::vector<std::string> shared;  // sorted, non-empty
  bool implicit_global = false;

  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

struct UnresolvedImport {
  FileId importer = 0;
  std::string source;
  std::vector<std::string> names;
};

// Files are identified by their index in the summary list handed to
// BuildDependencyGraph; paths must be unique.
struct DependencyGraph {
  std::vector<std::string> paths;
  std::vector<uint64_t> sizes;
  std::vector<DependencyEdge> edges;
  std::vector<UnresolvedImport> unresolved;
  // Resolved import target per (importer, import index); nullopt if external.
  std::vector<std::vector<std::optional<FileId>>> import_targets;
  std::vector<std::vector<std::optional<FileId>>> reexport_targets;

  size_t file_count() const { return paths.size(); }
};

// Normalizes `spec` relative to the directory of `importer` and looks it up
// among `paths` (exact, then .js, .mjs, /index.js).
std::optional<FileId> ResolveImportPath(const std::string& importer,
                                        const std::string& spec,
                                        std::span<const std::string> paths);

DependencyGraph BuildDependencyGraph(std::span<const FileSummary> summaries,
                                     const HostNames& hosts);

struct IndependenceMap {
  std::vector<uint32_t> partition_of_file;
  uint32_t partition_count = 1;
  // Number of shared names on edges whose endpoints lie in different
  // partitions.
  uint64_t cut_weight = 0;

  std::vector<std::vector<FileId>> Partitions() const;
};

// Deterministic greedy edge-cut partitioning into at most k partitions.
IndependenceMap PartitionGraph(const DependencyGraph& graph, uint32_t k);

// Number of shared names crossing partitions under `assignment`.
uint64_t CutWeight(const DependencyGraph& graph,
                   std::span<const uint32_t> assignment);

// Per-scope independence: true unless the scope or an ancestor is dynamic,
// or the scope declares exported/imported (boundary-visible) bindings.
std::vector<bool> ScopeIndependence(const ScopeTree& tree);

struct BoundaryMarker {
  std::string identifier;
  uint32_t owner_partition = 0;
  std::vector<uint32_t> consumer_partitions;  // sorted
  FileId owner_file = 0;
  // Module-scope binding in owner_file, or ⟨global, x⟩ for host/external
  // and undeclared shared names.
  Binding binding;
  std::optional<std::string> frozen_name;

  friend bool operator==(const BoundaryMarker&, const BoundaryMarker&) = default;
};

class LinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output of the coordination phase. Everything here is independent of the
// partition count except `markers`.
struct LinkResult {
  std::vector<BoundaryMarker> markers;
  // Names of the shared global scope used by more than one file; frozen.
  std::set<std::string> shared_globals;
  // Pre-assigned output names for top-level declarations of non-module
  // files (one shared global scope), keyed by original name.
  std::map<std::string, std::string> global_renames;
  // True when some file has a dynamic construct, which freezes every
  // binding of the shared global scope.
  bool globals_frozen = false;
};

// Cross-file coordination. Only names with cross-file visibility are
// processed. Throws LinkError on ConflictingExport.
LinkResult LinkCrossFile(std::span<const FileSummary> summaries,
                         const DependencyGraph& graph,
                         const IndependenceMap& map, const HostNames& hosts);

}  // namespace scopeshield

#endif  // SCOPESHIELD_PASA_H_
