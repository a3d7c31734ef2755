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


#include "scopeshield/renamer.h"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace scopeshield {

namespace {

constexpr uint64_t kGlobalRefBit = uint64_t{1} << 63;

uint64_t RefKey(const Occurrence& o) {
  if (o.decl_scope == kGlobalBinding) return kGlobalRefBit | o.name_id;
  return (static_cast<uint64_t>(o.decl_scope) << 32) | o.decl_index;
}

// For every scope, the outer bindings referenced in it (or, when `subtree`,
// anywhere below it), as sorted RefKeys.
std::vector<std::vector<uint64_t>> OuterRefs(const ScopeTree& tree,
                                             bool subtree) {
  std::vector<std::vector<uint64_t>> refs(tree.size());
  for (const Occurrence& o : tree.occurrences()) {
    if (o.decl_scope == o.scope) continue;
    const uint64_t key = RefKey(o);
    if (!subtree) {
      refs[o.scope].push_back(key);
      continue;
    }
    for (ScopeId t = o.scope; t != kNoScope && t != o.decl_scope;
         t = tree.node(t).parent)
      refs[t].push_back(key);
  }
  for (auto& r : refs) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
  }
  return refs;
}

bool IsScriptTopLevel(const ScopeTree& tree, ScopeId scope) {
  return scope == tree.module_scope() && !tree.is_module();
}

// Name a declaration must keep or receive regardless of the pool, if any.
std::optional<std::string> FixedName(const ScopeTree& tree, ScopeId scope,
                                     const Declaration& d,
                                     const RenameConstraints& c,
                                     bool* frozen) {
  const std::string& name = tree.name(d.name_id);
  *frozen = true;
  if (tree.node(scope).is_dynamic || d.exported || d.imported ||
      name == "arguments" || name == "eval")
    return name;
  if (IsScriptTopLevel(tree, scope) && c.link != nullptr) {
    if (c.link->globals_frozen || c.link->shared_globals.count(name))
      return name;
    auto it = c.link->global_renames.find(name);
    if (it == c.link->global_renames.end()) return name;
    *frozen = false;
    return it->second;
  }
  *frozen = false;
  return std::nullopt;
}

NamePool MakePool(const RenameConstraints& c) {
  return NamePool([&c](std::string_view n) {
    if (c.hosts != nullptr && c.hosts->Contains(n)) return true;
    return c.link != nullptr &&
           c.link->shared_globals.count(std::string(n)) > 0;
  });
}

std::string RefName(const ScopeTree& tree, uint64_t key, const RenameMap& map,
                    ScopeId for_scope) {
  if (key & kGlobalRefBit)
    return tree.name(static_cast<uint32_t>(key & 0xFFFFFFFFu));
  const ScopeId scope = static_cast<ScopeId>(key >> 32);
  const Declaration& d =
      tree.declaration(scope, static_cast<uint32_t>(key & 0xFFFFFFFFu));
  const RenameEntry* e =
      map.Find(RenameKey{tree.file(), scope, tree.name(d.name_id)});
  if (e == nullptr)
    throw OrderViolation("scope " + std::to_string(for_scope) +
                         " processed before outer binding '" +
                         tree.name(d.name_id) + "' of scope " +
                         std::to_string(scope) + " was named");
  return e->name;
}

void NameScope(const ScopeTree& tree, ScopeId s,
               const std::vector<uint64_t>& outer, const NamePool& pool,
               const RenameConstraints& c, RenameMap* map) {
  const ScopeNode& node = tree.node(s);
  std::unordered_set<std::string> forbidden;
  for (uint64_t key : outer) forbidden.insert(RefName(tree, key, *map, s));
  std::vector<uint32_t> open;
  for (uint32_t i = 0; i < node.declarations.size(); ++i) {
    const Declaration& d = node.declarations[i];
    bool frozen = false;
    if (auto fixed = FixedName(tree, s, d, c, &frozen)) {
      forbidden.insert(*fixed);
      map->Set(RenameKey{tree.file(), s, tree.name(d.name_id)},
               RenameEntry{*fixed, d.usage, frozen});
    } else {
      open.push_back(i);
    }
  }
  std::sort(open.begin(), open.end(), [&](uint32_t a, uint32_t b) {
    const Declaration& x = node.declarations[a];
    const Declaration& y = node.declarations[b];
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.site.start != y.site.start) return x.site.start < y.site.start;
    return a < b;
  });
  uint64_t cursor = 0;
  auto taken = [&](std::string_view n) {
    return forbidden.count(std::string(n)) > 0;
  };
  for (uint32_t i : open) {
    const Declaration& d = node.declarations[i];
    std::string name = pool.Next(&cursor, taken);
    forbidden.insert(name);
    map->Set(RenameKey{tree.file(), s, tree.name(d.name_id)},
             RenameEntry{std::move(name), d.usage, false});
  }
}

}  // namespace

std::string RenameMap::OutputName(FileId file, const Binding& binding) const {
  if (binding.IsGlobal()) return binding.name;
  const RenameEntry* e = Find(RenameKey{file, binding.scope, binding.name});
  return e == nullptr ? binding.name : e->name;
}

std::unordered_set<std::string> ForbiddenSet(const ScopeTree& tree,
                                             ScopeId scope,
                                             const RenameMap& state,
                                             const RenameConstraints& c) {
  if (scope >= tree.size())
    throw ScopeError("UnknownScope: " + std::to_string(scope));
  std::vector<uint64_t> outer;
  for (const Occurrence& o : tree.occurrences()) {
    if (o.decl_scope == o.scope) continue;
    const bool inside =
        c.subtree_forbidden
            ? (o.scope == scope || tree.IsAncestor(scope, o.scope))
            : o.scope == scope;
    if (!inside) continue;
    if (o.decl_scope != kGlobalBinding &&
        (o.decl_scope == scope || tree.IsAncestor(scope, o.decl_scope)))
      continue;
    outer.push_back(RefKey(o));
  }
  std::sort(outer.begin(), outer.end());
  outer.erase(std::unique(outer.begin(), outer.end()), outer.end());
  std::unordered_set<std::string> forbidden;
  for (uint64_t key : outer) forbidden.insert(RefName(tree, key, state, scope));
  for (const Declaration& d : tree.node(scope).declarations) {
    bool frozen = false;
    if (auto fixed = FixedName(tree, scope, d, c, &frozen))
      forbidden.insert(*fixed);
  }
  return forbidden;
}

RenameMap RenameFile(const ScopeTree& tree, const RenameConstraints& c) {
  RenameMap map;
  const auto outer = OuterRefs(tree, c.subtree_forbidden);
  const NamePool pool = MakePool(c);
  // Scope ids are assigned in pre-order, so parents precede children.
  for (ScopeId s = 0; s < tree.size(); ++s)
    NameScope(tree, s, outer[s], pool, c, &map);
  return map;
}

RenameMap RenamePartition(std::span<const ScopeTree* const> trees,
                          const RenameConstraints& c) {
  std::vector<RenameMap> maps;
  maps.reserve(trees.size());
  for (const ScopeTree* t : trees) maps.push_back(RenameFile(*t, c));
  return MergeMaps(maps, {});
}

RenameMap MergeMaps(std::span<const RenameMap> maps,
                    std::span<const BoundaryMarker> markers) {
  RenameMap merged;
  for (const RenameMap& m : maps) {
    for (const auto& [key, entry] : m.entries()) {
      const RenameEntry* existing = merged.Find(key);
      if (existing != nullptr && !(*existing == entry))
        throw MarkerConflict("binding '" + key.name + "' of file " +
                             std::to_string(key.file) +
                             " renamed inconsistently: '" + existing->name +
                             "' vs '" + entry.name + "'");
      merged.Set(key, entry);
    }
  }
  for (const BoundaryMarker& marker : markers) {
    if (marker.binding.IsGlobal() || !marker.frozen_name) continue;
    const RenameKey key{marker.owner_file, marker.binding.scope,
                        marker.binding.name};
    for (const RenameMap& m : maps) {
      const RenameEntry* e = m.Find(key);
      if (e != nullptr && e->name != *marker.frozen_name)
        throw MarkerConflict("marker '" + marker.identifier +
                             "' requires name '" + *marker.frozen_name +
                             "' but a partition assigned '" + e->name + "'");
    }
  }
  return merged;
}

uint64_t Cost(const RenameMap& map) {
  uint64_t cost = 0;
  for (const auto& [key, entry] : map.entries())
    cost += static_cast<uint64_t>(entry.name.size()) * entry.usage;
  return cost;
}

namespace {

void CheckTree(const ScopeTree& tree, const RenameMap& map,
               const RenameConstraints& c, SafetyReport* report) {
  auto violation = [&](Span span, std::string original, std::string renamed,
                       std::string reason) {
    report->violations.push_back({tree.file(), span, std::move(original),
                                  std::move(renamed), std::move(reason)});
  };
  // Output name -> declaration index, per scope.
  std::vector<std::unordered_map<std::string, uint32_t>> outputs(tree.size());
  std::vector<std::vector<std::string>> out_names(tree.size());
  for (ScopeId s = 0; s < tree.size(); ++s) {
    const auto& decls = tree.node(s).declarations;
    out_names[s].reserve(decls.size());
    for (uint32_t i = 0; i < decls.size(); ++i) {
      const std::string& original = tree.name(decls[i].name_id);
      std::string out = map.OutputName(tree.file(), Binding{s, original});
      if (!outputs[s].emplace(out, i).second)
        violation(decls[i].site, original, out,
                  "two bindings of scope " + std::to_string(s) +
                      " share the output name");
      if (IsScriptTopLevel(tree, s) && c.link != nullptr && out != original) {
        auto it = c.link->global_renames.find(original);
        if (it == c.link->global_renames.end() || it->second != out)
          violation(decls[i].site, original, out,
                    "shared global scope binding renamed without link");
      }
      out_names[s].push_back(std::move(out));
    }
  }
  std::unordered_map<std::string, std::string> global_owner;
  if (c.link != nullptr)
    for (const auto& [original, out] : c.link->global_renames)
      global_owner.emplace(out, original);

  for (const Occurrence& o : tree.occurrences()) {
    const std::string& original = tree.name(o.name_id);
    const std::string out =
        o.decl_scope == kGlobalBinding ? original
                                       : out_names[o.decl_scope][o.decl_index];
    ScopeId found = kGlobalBinding;
    uint32_t found_index = 0;
    for (ScopeId s = o.scope; s != kNoScope; s = tree.node(s).parent) {
      auto it = outputs[s].find(out);
      if (it != outputs[s].end()) {
        found = s;
        found_index = it->second;
        break;
      }
    }
    if (found != o.decl_scope ||
        (found != kGlobalBinding && found_index != o.decl_index)) {
      violation(o.span, original, out,
                found == kGlobalBinding
                    ? "reference escapes to the global scope"
                    : "captured by a binding of scope " +
                          std::to_string(found));
      continue;
    }
    if (found == kGlobalBinding) {
      auto it = global_owner.find(out);
      if (it != global_owner.end() && it->second != original)
        violation(o.span, original, out,
                  "captured by renamed global '" + it->second + "'");
    }
  }
}

}  // namespace

SafetyReport CheckSafety(const ScopeTree& tree, const RenameMap& map,
                         const RenameConstraints& c) {
  SafetyReport report;
  CheckTree(tree, map, c, &report);
  return report;
}

SafetyReport CheckSafety(std::span<const ScopeTree* const> trees,
                         const RenameMap& map, const RenameConstraints& c) {
  SafetyReport report;
  // Output name -> original, over the shared global scope of all scripts.
  std::unordered_map<std::string, std::string> shared;
  for (const ScopeTree* tree : trees) {
    CheckTree(*tree, map, c, &report);
    if (tree->is_module()) continue;
    const ScopeId top = tree->module_scope();
    for (const Declaration& d : tree->node(top).declarations) {
      const std::string& original = tree->name(d.name_id);
      std::string out = map.OutputName(tree->file(), Binding{top, original});
      auto [it, inserted] = shared.emplace(out, original);
      if (!inserted && it->second != original)
        report.violations.push_back(
            {tree->file(), d.site, original, out,
             "global '" + it->second + "' of another file has the same name"});
    }
  }
  return report;
}

std::vector<Patch> RenamePatches(const ScopeTree& tree, const RenameMap& map) {
  std::vector<Patch> patches;
  for (const Occurrence& o : tree.occurrences()) {
    if (o.decl_scope == kGlobalBinding) continue;
    const std::string& original = tree.name(o.name_id);
    std::string out =
        map.OutputName(tree.file(), Binding{o.decl_scope, original});
    if (out == original) continue;
    patches.push_back(
        {o.span, o.shorthand ? original + ":" + out : std::move(out)});
  }
  SortPatches(patches);
  return patches;
}

std::string DumpRenames(const ScopeTree& tree, const RenameMap& map) {
  std::ostringstream out;
  for (ScopeId s = 0; s < tree.size(); ++s) {
    for (const Declaration& d : tree.node(s).declarations) {
      const std::string& original = tree.name(d.name_id);
      out << s << '\t' << original << '\t'
          << map.OutputName(tree.file(), Binding{s, original}) << '\n';
    }
  }
  return out.str();
}

}  // namespace scopeshield
