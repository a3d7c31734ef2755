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


#include "scopeshield/pasa.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "scopeshield/name_pool.h"

namespace scopeshield {

namespace {

constexpr const char* kDefaultHostNames[] = {
    // Language builtins.
    "globalThis", "Object", "Function", "Array", "Number", "parseFloat",
    "parseInt", "Infinity", "NaN", "undefined", "Boolean", "String", "Symbol",
    "Date", "Promise", "RegExp", "Error", "AggregateError", "EvalError",
    "RangeError", "ReferenceError", "SyntaxError", "TypeError", "URIError",
    "JSON", "Math", "Intl", "ArrayBuffer", "SharedArrayBuffer", "Atomics",
    "Uint8Array", "Int8Array", "Uint16Array", "Int16Array", "Uint32Array",
    "Int32Array", "Float32Array", "Float64Array", "Uint8ClampedArray",
    "BigUint64Array", "BigInt64Array", "DataView", "Map", "BigInt", "Set",
    "WeakMap", "WeakSet", "WeakRef", "FinalizationRegistry", "Proxy",
    "Reflect", "decodeURI", "decodeURIComponent", "encodeURI",
    "encodeURIComponent", "escape", "unescape", "eval", "isFinite", "isNaN",
    "console", "Iterator", "arguments",
    // Node.js.
    "process", "require", "module", "exports", "__dirname", "__filename",
    "Buffer", "global", "setTimeout", "clearTimeout", "setInterval",
    "clearInterval", "setImmediate", "clearImmediate", "queueMicrotask",
    "structuredClone", "URL", "URLSearchParams", "TextEncoder", "TextDecoder",
    "AbortController", "AbortSignal", "fetch", "performance", "atob", "btoa",
    "WebAssembly",
    // Browsers.
    "window", "document", "navigator", "location", "history", "localStorage",
    "sessionStorage", "alert", "confirm", "prompt", "XMLHttpRequest",
    "requestAnimationFrame", "cancelAnimationFrame", "self", "frames",
    "parent", "top", "Image", "Event", "CustomEvent", "EventTarget",
    "HTMLElement", "Node", "Element", "getComputedStyle", "WebSocket",
    "Worker", "Blob", "File", "FileReader", "FormData", "Headers", "Request",
    "Response", "MutationObserver", "IntersectionObserver", "ResizeObserver",
    "crypto", "indexedDB", "screen", "devicePixelRatio",
    // Mini-program runtimes.
    "wx", "App", "Page", "Component", "getApp", "getCurrentPages", "Behavior",
    "my", "swan", "tt", "qq",
};

// Shared-name groups larger than this are connected as a star around their
// first file instead of pairwise.
constexpr size_t kPairwiseGroupLimit = 32;

std::string Dirname(const std::string& path) {
  size_t slash = path.rfind('/');
  return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

std::string NormalizePath(const std::string& path) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (pos <= path.size()) {
    size_t next = path.find('/', pos);
    if (next == std::string::npos) next = path.size();
    std::string part = path.substr(pos, next - pos);
    if (part == "..") {
      if (!parts.empty() && parts.back() != "..")
        parts.pop_back();
      else
        parts.push_back(part);
    } else if (!part.empty() && part != ".") {
      parts.push_back(std::move(part));
    }
    pos = next + 1;
  }
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out.push_back('/');
    out += p;
  }
  return out;
}

// Names a file contributes to the shared global scope.
std::vector<std::string> SharedCandidates(const FileSummary& s,
                                          const HostNames& hosts) {
  std::vector<std::string> names;
  auto keep = [&](const std::string& n) {
    return !hosts.Contains(n) && !IsRestrictedName(n) && !IsReservedWord(n);
  };
  for (const std::string& n : s.free_names)
    if (keep(n)) names.push_back(n);
  if (!s.is_module)
    for (const std::string& n : s.declared_globals)
      if (keep(n)) names.push_back(n);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

// name -> sorted list of files that use it in the shared global scope.
std::map<std::string, std::vector<FileId>> SharedNameGroups(
    std::span<const FileSummary> summaries, const HostNames& hosts) {
  std::map<std::string, std::vector<FileId>> groups;
  for (FileId f = 0; f < summaries.size(); ++f)
    for (std::string& n : SharedCandidates(summaries[f], hosts))
      groups[std::move(n)].push_back(f);
  for (auto it = groups.begin(); it != groups.end();) {
    if (it->second.size() < 2)
      it = groups.erase(it);
    else
      ++it;
  }
  return groups;
}

}  // namespace

HostNames HostNames::Default() {
  HostNames h;
  for (const char* n : kDefaultHostNames) h.names_.insert(n);
  return h;
}

HostNames HostNames::FromFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read allowlist " + path);
  HostNames h = Default();
  std::string line;
  while (std::getline(in, line)) {
    if (size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    size_t e = line.find_last_not_of(" \t\r");
    h.names_.insert(line.substr(b, e - b + 1));
  }
  return h;
}

std::optional<FileId> ResolveImportPath(const std::string& importer,
                                        const std::string& spec,
                                        std::span<const std::string> paths) {
  if (!spec.starts_with("./") && !spec.starts_with("../") &&
      !spec.starts_with("/") && spec != "." && spec != "..")
    return std::nullopt;
  std::string base = spec.starts_with("/")
                         ? NormalizePath(spec)
                         : NormalizePath(Dirname(importer) + "/" + spec);
  for (const std::string& candidate :
       {base, base + ".js", base + ".mjs", base + "/index.js"}) {
    auto it = std::find(paths.begin(), paths.end(), candidate);
    if (it != paths.end()) return static_cast<FileId>(it - paths.begin());
  }
  return std::nullopt;
}

DependencyGraph BuildDependencyGraph(std::span<const FileSummary> summaries,
                                     const HostNames& hosts) {
  DependencyGraph g;
  const size_t n = summaries.size();
  g.paths.reserve(n);
  for (FileId f = 0; f < n; ++f) {
    if (summaries[f].file != f)
      throw std::invalid_argument("summary file ids must be 0..n-1 in order");
    g.paths.push_back(summaries[f].path);
    g.sizes.push_back(summaries[f].size_bytes);
  }
  std::unordered_map<std::string, FileId> by_path;
  for (FileId f = 0; f < n; ++f) by_path.emplace(g.paths[f], f);
  auto resolve = [&](FileId importer,
                     const std::string& spec) -> std::optional<FileId> {
    if (!spec.starts_with(".") && !spec.starts_with("/")) return std::nullopt;
    std::string base =
        spec.starts_with("/")
            ? NormalizePath(spec)
            : NormalizePath(Dirname(g.paths[importer]) + "/" + spec);
    for (const std::string& c :
         {base, base + ".js", base + ".mjs", base + "/index.js"}) {
      auto it = by_path.find(c);
      if (it != by_path.end()) return it->second;
    }
    return std::nullopt;
  };

  std::map<std::pair<FileId, FileId>, std::set<std::string>> explicit_edges;
  std::map<std::pair<FileId, FileId>, std::set<std::string>> implicit_edges;
  g.import_targets.resize(n);
  g.reexport_targets.resize(n);
  for (FileId f = 0; f < n; ++f) {
    const FileSummary& s = summaries[f];
    for (const ImportEntry& imp : s.imports) {
      std::optional<FileId> target = resolve(f, imp.source);
      g.import_targets[f].push_back(target);
      if (!target) {
        g.unresolved.push_back({f, imp.source, imp.names});
        continue;
      }
      if (*target == f) continue;
      auto& names = explicit_edges[{f, *target}];
      names.insert(imp.names.begin(), imp.names.end());
      if (imp.names.empty()) names.insert("*");
    }
    for (const ReExport& re : s.reexports) {
      std::optional<FileId> target = resolve(f, re.source);
      g.reexport_targets[f].push_back(target);
      std::vector<std::string> names;
      if (re.star) names.push_back("*");
      for (const auto& [from, as] : re.names) names.push_back(from);
      if (!target) {
        g.unresolved.push_back({f, re.source, names});
        continue;
      }
      if (*target == f) continue;
      explicit_edges[{f, *target}].insert(names.begin(), names.end());
    }
  }
  for (const auto& [name, files] : SharedNameGroups(summaries, hosts)) {
    if (files.size() <= kPairwiseGroupLimit) {
      for (size_t i = 0; i < files.size(); ++i)
        for (size_t j = i + 1; j < files.size(); ++j)
          implicit_edges[{files[i], files[j]}].insert(name);
    } else {
      for (size_t j = 1; j < files.size(); ++j)
        implicit_edges[{files[0], files[j]}].insert(name);
    }
  }
  for (auto& [key, names] : explicit_edges)
    g.edges.push_back({key.first, key.second,
                       std::vector<std::string>(names.begin(), names.end()),
                       false});
  for (auto& [key, names] : implicit_edges)
    g.edges.push_back({key.first, key.second,
                       std::vector<std::string>(names.begin(), names.end()),
                       true});
  return g;
}

std::vector<std::vector<FileId>> IndependenceMap::Partitions() const {
  std::vector<std::vector<FileId>> parts(partition_count);
  for (FileId f = 0; f < partition_of_file.size(); ++f)
    parts[partition_of_file[f]].push_back(f);
  return parts;
}

uint64_t CutWeight(const DependencyGraph& graph,
                   std::span<const uint32_t> assignment) {
  uint64_t cut = 0;
  for (const DependencyEdge& e : graph.edges)
    if (assignment[e.from] != assignment[e.to]) cut += e.shared.size();
  return cut;
}

IndependenceMap PartitionGraph(const DependencyGraph& graph, uint32_t k) {
  const size_t n = graph.file_count();
  k = std::max<uint32_t>(k, 1);
  IndependenceMap map;
  map.partition_count =
      static_cast<uint32_t>(std::min<size_t>(k, std::max<size_t>(n, 1)));
  map.partition_of_file.assign(n, 0);
  if (n == 0) return map;
  k = map.partition_count;

  std::vector<std::vector<std::pair<FileId, uint64_t>>> adj(n);
  std::vector<FileId> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](FileId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const DependencyEdge& e : graph.edges) {
    adj[e.from].push_back({e.to, e.shared.size()});
    adj[e.to].push_back({e.from, e.shared.size()});
    FileId a = find(e.from), b = find(e.to);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  // Components are identified by their smallest path so that the result
  // does not depend on the order of the input file list.
  std::vector<const std::string*> comp_key(n, nullptr);
  for (FileId f = 0; f < n; ++f) {
    const std::string*& key = comp_key[find(f)];
    if (key == nullptr || graph.paths[f] < *key) key = &graph.paths[f];
  }
  std::vector<const std::string*> comp(n);
  for (FileId f = 0; f < n; ++f) comp[f] = comp_key[find(f)];

  std::vector<FileId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](FileId a, FileId b) {
    if (*comp[a] != *comp[b]) return *comp[a] < *comp[b];
    if (graph.sizes[a] != graph.sizes[b]) return graph.sizes[a] > graph.sizes[b];
    return graph.paths[a] < graph.paths[b];
  });

  auto weight = [&](FileId f) { return std::max<uint64_t>(graph.sizes[f], 1); };
  uint64_t total = 0;
  for (FileId f = 0; f < n; ++f) total += weight(f);
  const double capacity = 1.05 * static_cast<double>(total) / k;

  std::vector<uint64_t> load(k, 0);
  std::vector<uint64_t> affinity(k, 0);
  std::vector<bool> assigned(n, false);
  for (FileId f : order) {
    std::fill(affinity.begin(), affinity.end(), 0);
    for (auto [other, w] : adj[f])
      if (assigned[other]) affinity[map.partition_of_file[other]] += w;
    bool any_eligible = false;
    std::vector<bool> eligible(k);
    for (uint32_t p = 0; p < k; ++p) {
      eligible[p] = load[p] == 0 ||
                    static_cast<double>(load[p] + weight(f)) <= capacity;
      any_eligible = any_eligible || eligible[p];
    }
    uint32_t best = k;
    for (uint32_t p = 0; p < k; ++p) {
      if (any_eligible && !eligible[p]) continue;
      if (best == k || affinity[p] > affinity[best] ||
          (affinity[p] == affinity[best] && load[p] < load[best]))
        best = p;
    }
    map.partition_of_file[f] = best;
    load[best] += weight(f);
    assigned[f] = true;
  }
  map.cut_weight = CutWeight(graph, map.partition_of_file);
  return map;
}

std::vector<bool> ScopeIndependence(const ScopeTree& tree) {
  std::vector<bool> flags(tree.size(), false);
  std::vector<bool> dynamic_above(tree.size(), false);
  // Parents are created before their children, so ids are a preorder.
  for (ScopeId s = 0; s < tree.size(); ++s) {
    const ScopeNode& node = tree.node(s);
    const bool inherited =
        node.parent != kNoScope &&
        (dynamic_above[node.parent] || tree.node(node.parent).is_dynamic);
    dynamic_above[s] = inherited;
    bool boundary = false;
    for (const Declaration& d : node.declarations)
      boundary = boundary || d.exported || d.imported;
    flags[s] = !inherited && !node.is_dynamic && !boundary;
  }
  return flags;
}

namespace {

struct ExportTarget {
  FileId file = 0;
  std::string name;
  bool external = false;
  friend bool operator==(const ExportTarget&, const ExportTarget&) = default;
  friend auto operator<=>(const ExportTarget&, const ExportTarget&) = default;
};

class ExportResolver {
 public:
  ExportResolver(std::span<const FileSummary> summaries,
                 const DependencyGraph& graph)
      : summaries_(summaries), graph_(graph) {}

  // Empty when `file` does not export `name`.
  std::set<ExportTarget> Resolve(FileId file, const std::string& name) {
    std::set<std::pair<FileId, std::string>> visiting;
    return Resolve(file, name, &visiting);
  }

 private:
  std::set<ExportTarget> Resolve(
      FileId file, const std::string& name,
      std::set<std::pair<FileId, std::string>>* visiting) {
    if (!visiting->insert({file, name}).second) return {};
    const FileSummary& s = summaries_[file];
    for (size_t i = 0; i < s.reexports.size(); ++i) {
      const ReExport& re = s.reexports[i];
      for (const auto& [from, as] : re.names) {
        if (as != name) continue;
        const auto& target = graph_.reexport_targets[file][i];
        if (!target || from == "*") return {{file, name, !target}};
        return Resolve(*target, from, visiting);
      }
    }
    if (std::find(s.exports.begin(), s.exports.end(), name) != s.exports.end())
      return {{file, name, false}};
    if (name == "default") return {};
    std::set<ExportTarget> found;
    for (size_t i = 0; i < s.reexports.size(); ++i) {
      const ReExport& re = s.reexports[i];
      if (!re.star) continue;
      const auto& target = graph_.reexport_targets[file][i];
      if (!target) continue;
      std::set<ExportTarget> r = Resolve(*target, name, visiting);
      found.insert(r.begin(), r.end());
    }
    if (found.size() > 1)
      throw LinkError("ConflictingExport: '" + name + "' is exported by " +
                      std::to_string(found.size()) + " star re-exports of " +
                      s.path);
    return found;
  }

  std::span<const FileSummary> summaries_;
  const DependencyGraph& graph_;
};

}  // namespace

LinkResult LinkCrossFile(std::span<const FileSummary> summaries,
                         const DependencyGraph& graph,
                         const IndependenceMap& map, const HostNames& hosts) {
  LinkResult link;
  const auto part = [&](FileId f) { return map.partition_of_file.at(f); };
  std::map<std::pair<FileId, std::string>, BoundaryMarker> markers;
  auto add_marker = [&](FileId owner, const std::string& id, Binding binding,
                        std::optional<uint32_t> consumer) {
    auto [it, inserted] = markers.try_emplace({owner, id});
    BoundaryMarker& m = it->second;
    if (inserted) {
      m.identifier = id;
      m.owner_file = owner;
      m.owner_partition = part(owner);
      m.binding = std::move(binding);
      m.frozen_name = id;
    }
    if (consumer && *consumer != m.owner_partition &&
        std::find(m.consumer_partitions.begin(), m.consumer_partitions.end(),
                  *consumer) == m.consumer_partitions.end())
      m.consumer_partitions.push_back(*consumer);
  };

  ExportResolver resolver(summaries, graph);
  const ScopeId module_scope = 1;
  for (FileId f = 0; f < summaries.size(); ++f) {
    const FileSummary& s = summaries[f];
    for (size_t i = 0; i < s.imports.size(); ++i) {
      const ImportEntry& imp = s.imports[i];
      const auto& target = graph.import_targets[f][i];
      if (!target) {
        for (const std::string& name : imp.names)
          add_marker(f, name, Binding{kGlobalBinding, name}, std::nullopt);
        continue;
      }
      std::vector<std::string> wanted;
      for (const std::string& name : imp.names) {
        if (name == "*")
          wanted.insert(wanted.end(), summaries[*target].exports.begin(),
                        summaries[*target].exports.end());
        else
          wanted.push_back(name);
      }
      for (const std::string& name : wanted) {
        for (const ExportTarget& t : resolver.Resolve(*target, name)) {
          if (t.external) {
            add_marker(t.file, t.name, Binding{kGlobalBinding, t.name},
                       std::nullopt);
          } else if (part(t.file) != part(f)) {
            add_marker(t.file, t.name, Binding{module_scope, t.name}, part(f));
          }
        }
      }
    }
  }

  for (const auto& [name, files] : SharedNameGroups(summaries, hosts)) {
    link.shared_globals.insert(name);
    FileId owner = files.front();
    for (FileId f : files) {
      const auto& decls = summaries[f].declared_globals;
      if (!summaries[f].is_module &&
          std::find(decls.begin(), decls.end(), name) != decls.end()) {
        owner = f;
        break;
      }
    }
    std::set<uint32_t> parts;
    for (FileId f : files) parts.insert(part(f));
    if (parts.size() < 2) continue;
    const auto& decls = summaries[owner].declared_globals;
    const bool declared =
        !summaries[owner].is_module &&
        std::find(decls.begin(), decls.end(), name) != decls.end();
    for (FileId f : files)
      add_marker(owner, name,
                 declared ? Binding{module_scope, name}
                          : Binding{kGlobalBinding, name},
                 part(f));
  }

  for (auto& [key, m] : markers) {
    std::sort(m.consumer_partitions.begin(), m.consumer_partitions.end());
    const bool external = m.binding.IsGlobal() && m.consumer_partitions.empty();
    if (!m.consumer_partitions.empty() || external)
      link.markers.push_back(std::move(m));
  }

  for (const FileSummary& s : summaries)
    link.globals_frozen = link.globals_frozen || !s.dynamic_sites.empty();
  if (link.globals_frozen) return link;

  std::set<std::string> taken(link.shared_globals);
  for (const FileSummary& s : summaries)
    taken.insert(s.free_names.begin(), s.free_names.end());
  NamePool pool([&](std::string_view n) {
    return hosts.Contains(n) || taken.count(std::string(n)) > 0;
  });
  uint64_t cursor = 0;
  for (const FileSummary& s : summaries) {
    if (s.is_module) continue;
    for (const std::string& name : s.declared_globals) {
      if (link.shared_globals.count(name) || hosts.Contains(name) ||
          IsRestrictedName(name) || link.global_renames.count(name))
        continue;
      link.global_renames.emplace(name, pool.Next(&cursor));
    }
  }
  return link;
}

}  // namespace scopeshield
