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

#ifndef SCOPESHIELD_SCOPE_TREE_H_
#define SCOPESHIELD_SCOPE_TREE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scopeshield/ast.h"
#include "scopeshield/lexer.h"

namespace scopeshield {

struct FileSummary;

using ScopeId = uint32_t;

inline constexpr ScopeId kNoScope = 0xFFFFFFFFu;
// Scope id of the distinguished ⟨global, x⟩ binding for unresolved names.
inline constexpr ScopeId kGlobalBinding = 0xFFFFFFFEu;

enum class ScopeKind : uint8_t { kGlobal, kModule, kFunction, kBlock };

const char* ScopeKindName(ScopeKind kind);

// Order in which a scope's declarations receive names.
enum class DeclKind : uint8_t {
  kParam = 0,
  kFunction = 1,
  kVar = 2,
  kLexical = 3,
};

struct Declaration {
  uint32_t name_id = 0;
  Span site;           // first declaring occurrence
  uint32_t usage = 0;  // occurrences (declaring sites included) bound here
  DeclKind kind = DeclKind::kVar;
  bool exported = false;
  bool imported = false;
};

struct ScopeNode {
  ScopeId id = 0;
  ScopeKind kind = ScopeKind::kBlock;
  ScopeId parent = kNoScope;
  std::vector<ScopeId> children;
  std::vector<Declaration> declarations;
  // Occurrence ids of names used in this scope but declared elsewhere.
  std::vector<uint32_t> references;
  bool is_dynamic = false;
  Span span;
};

// A resolved name: the declaring scope (or kGlobalBinding) plus the
// identifier.
struct Binding {
  ScopeId scope = kGlobalBinding;
  std::string name;

  bool IsGlobal() const { return scope == kGlobalBinding; }
  friend bool operator==(const Binding&, const Binding&) = default;
  friend auto operator<=>(const Binding&, const Binding&) = default;
};

struct Occurrence {
  Span span;
  ScopeId scope = 0;  // scope the occurrence appears in
  uint32_t name_id = 0;
  // Resolution result; decl_scope is kGlobalBinding for free names.
  ScopeId decl_scope = kGlobalBinding;
  uint32_t decl_index = 0;
  bool is_declaration = false;
  bool shorthand = false;
};

class ScopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lexical scope structure of one file: node 0 is the global root and node 1
// the file's top-level (module) scope.
class ScopeTree {
 public:
  explicit ScopeTree(FileId file = 0);

  FileId file() const { return file_; }
  // True for ES modules; otherwise top-level declarations belong to the
  // global scope shared by all non-module files.
  bool is_module() const { return is_module_; }
  void set_is_module(bool is_module) { is_module_ = is_module; }
  ScopeId root() const { return 0; }
  ScopeId module_scope() const { return 1; }
  size_t size() const { return scopes_.size(); }
  const ScopeNode& node(ScopeId id) const { return scopes_.at(id); }
  ScopeNode& mutable_node(ScopeId id) { return scopes_.at(id); }
  const std::vector<ScopeNode>& nodes() const { return scopes_; }

  const std::vector<Occurrence>& occurrences() const { return occurrences_; }
  const std::string& name(uint32_t name_id) const { return names_[name_id]; }
  uint32_t Intern(std::string_view name);
  std::optional<uint32_t> FindName(std::string_view name) const;

  // Builder interface.
  ScopeId AddScope(ScopeKind kind, ScopeId parent, Span span = {});
  // Declares `name` in `scope` (idempotent) and records the declaring
  // occurrence, which textually sits in `site_scope` (defaults to `scope`;
  // differs for hoisted var and function declarations inside blocks).
  // Returns the declaration index within the scope.
  uint32_t Declare(ScopeId scope, std::string_view name, Span site,
                   DeclKind kind, bool shorthand = false,
                   ScopeId site_scope = kNoScope);
  void AddReference(ScopeId scope, std::string_view name, Span span,
                    bool shorthand = false);
  // Marks `scope` and all of its ancestors dynamic.
  void MarkDynamic(ScopeId scope);
  // Resolves every pending reference, fills usage counts and per-scope
  // reference lists. Call once after building.
  void Finalize();

  std::optional<uint32_t> FindDeclaration(ScopeId scope,
                                          uint32_t name_id) const;
  const Declaration& declaration(ScopeId scope, uint32_t index) const {
    return scopes_[scope].declarations[index];
  }
  Declaration& mutable_declaration(ScopeId scope, uint32_t index) {
    return scopes_[scope].declarations[index];
  }

  Binding BindingOf(const Occurrence& occurrence) const;
  bool IsAncestor(ScopeId ancestor, ScopeId scope) const;
  uint32_t Depth(ScopeId scope) const;

 private:
  static uint64_t Key(ScopeId scope, uint32_t name_id) {
    return (static_cast<uint64_t>(scope) << 32) | name_id;
  }

  FileId file_;
  std::vector<ScopeNode> scopes_;
  std::vector<Occurrence> occurrences_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, uint32_t> name_ids_;
  std::unordered_map<uint64_t, uint32_t> decl_index_;
  bool finalized_ = false;
  bool is_module_ = false;
};

// Builds the scope tree of a parsed file. Total over every AST the parser
// produces.
ScopeTree BuildScopeTree(const Ast& ast, FileId file = 0);

// Nearest-declaration lookup starting at `scope`; ⟨global, x⟩ when no
// enclosing scope declares `name`. Throws ScopeError for unknown scopes.
Binding Resolve(std::string_view name, ScopeId scope, const ScopeTree& tree);

// Fills declared_globals and free_names from a scope walk of `ast`.
void FillScopeSummary(const Ast& ast, FileSummary* summary);

// Indented textual dump, one scope per line.
std::string DumpScopeTree(const ScopeTree& tree);

}  // namespace scopeshield

#endif  // SCOPESHIELD_SCOPE_TREE_H_
