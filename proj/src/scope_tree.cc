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

#include "scopeshield/scope_tree.h"

#include <algorithm>
#include <sstream>

#include "scopeshield/parser.h"

namespace scopeshield {

const char* ScopeKindName(ScopeKind kind) {
  switch (kind) {
    case ScopeKind::kGlobal: return "global";
    case ScopeKind::kModule: return "module";
    case ScopeKind::kFunction: return "function";
    case ScopeKind::kBlock: return "block";
  }
  return "?";
}

ScopeTree::ScopeTree(FileId file) : file_(file) {
  AddScope(ScopeKind::kGlobal, kNoScope);
  AddScope(ScopeKind::kModule, 0);
}

uint32_t ScopeTree::Intern(std::string_view name) {
  auto [it, inserted] =
      name_ids_.try_emplace(std::string(name), static_cast<uint32_t>(names_.size()));
  if (inserted) names_.emplace_back(name);
  return it->second;
}

std::optional<uint32_t> ScopeTree::FindName(std::string_view name) const {
  auto it = name_ids_.find(std::string(name));
  if (it == name_ids_.end()) return std::nullopt;
  return it->second;
}

ScopeId ScopeTree::AddScope(ScopeKind kind, ScopeId parent, Span span) {
  ScopeId id = static_cast<ScopeId>(scopes_.size());
  ScopeNode node;
  node.id = id;
  node.kind = kind;
  node.parent = parent;
  node.span = span;
  scopes_.push_back(std::move(node));
  if (parent != kNoScope) scopes_[parent].children.push_back(id);
  return id;
}

uint32_t ScopeTree::Declare(ScopeId scope, std::string_view name, Span site,
                            DeclKind kind, bool shorthand,
                            ScopeId site_scope) {
  const uint32_t name_id = Intern(name);
  auto [it, inserted] = decl_index_.try_emplace(
      Key(scope, name_id),
      static_cast<uint32_t>(scopes_[scope].declarations.size()));
  if (inserted) {
    Declaration d;
    d.name_id = name_id;
    d.site = site;
    d.kind = kind;
    scopes_[scope].declarations.push_back(d);
  } else if (kind < scopes_[scope].declarations[it->second].kind) {
    scopes_[scope].declarations[it->second].kind = kind;
  }
  Occurrence o;
  o.span = site;
  o.scope = site_scope == kNoScope ? scope : site_scope;
  o.name_id = name_id;
  o.decl_scope = scope;
  o.decl_index = it->second;
  o.is_declaration = true;
  o.shorthand = shorthand;
  occurrences_.push_back(o);
  return it->second;
}

void ScopeTree::AddReference(ScopeId scope, std::string_view name, Span span,
                             bool shorthand) {
  Occurrence o;
  o.span = span;
  o.scope = scope;
  o.name_id = Intern(name);
  o.shorthand = shorthand;
  occurrences_.push_back(o);
}

void ScopeTree::MarkDynamic(ScopeId scope) {
  for (ScopeId s = scope; s != kNoScope; s = scopes_[s].parent) {
    if (scopes_[s].is_dynamic) break;
    scopes_[s].is_dynamic = true;
  }
}

std::optional<uint32_t> ScopeTree::FindDeclaration(ScopeId scope,
                                                   uint32_t name_id) const {
  auto it = decl_index_.find(Key(scope, name_id));
  if (it == decl_index_.end()) return std::nullopt;
  return it->second;
}

void ScopeTree::Finalize() {
  if (finalized_) return;
  finalized_ = true;
  for (uint32_t i = 0; i < occurrences_.size(); ++i) {
    Occurrence& o = occurrences_[i];
    if (!o.is_declaration) {
      o.decl_scope = kGlobalBinding;
      for (ScopeId s = o.scope; s != kNoScope; s = scopes_[s].parent) {
        if (auto d = FindDeclaration(s, o.name_id)) {
          o.decl_scope = s;
          o.decl_index = *d;
          break;
        }
      }
    }
    if (o.decl_scope != kGlobalBinding)
      ++scopes_[o.decl_scope].declarations[o.decl_index].usage;
    if (o.decl_scope != o.scope) scopes_[o.scope].references.push_back(i);
  }
}

Binding ScopeTree::BindingOf(const Occurrence& occurrence) const {
  return Binding{occurrence.decl_scope, names_[occurrence.name_id]};
}

bool ScopeTree::IsAncestor(ScopeId ancestor, ScopeId scope) const {
  for (ScopeId s = scopes_[scope].parent; s != kNoScope; s = scopes_[s].parent)
    if (s == ancestor) return true;
  return false;
}

uint32_t ScopeTree::Depth(ScopeId scope) const {
  uint32_t depth = 0;
  for (ScopeId s = scopes_[scope].parent; s != kNoScope; s = scopes_[s].parent)
    ++depth;
  return depth;
}

namespace {

class ScopeBuilder {
 public:
  ScopeBuilder(const Ast& ast, ScopeTree* tree) : ast_(ast), tree_(*tree) {}

  void Build() {
    tree_.mutable_node(tree_.root()).span = ast_.node(0).span;
    tree_.mutable_node(tree_.module_scope()).span = ast_.node(0).span;
    const ScopeId module = tree_.module_scope();
    ast_.ForEachChild(ast_.root(), [&](uint32_t c) {
      NodeKind k = ast_.node(c).kind;
      if (k == NodeKind::kImportDecl || k == NodeKind::kExportDecl)
        tree_.set_is_module(true);
    });
    ast_.ForEachChild(ast_.root(),
                      [&](uint32_t c) { Walk(c, module, module, false); });
    tree_.Finalize();
    for (uint32_t occ : exported_refs_) {
      const Occurrence& o = tree_.occurrences()[occ];
      if (o.decl_scope != kGlobalBinding)
        tree_.mutable_declaration(o.decl_scope, o.decl_index).exported = true;
    }
  }

 private:
  ScopeId NewScope(ScopeKind kind, ScopeId parent, Span span) {
    ScopeId s = tree_.AddScope(kind, parent, span);
    if (with_depth_ > 0) tree_.mutable_node(s).is_dynamic = true;
    return s;
  }

  void DeclareBinding(uint32_t n, ScopeId scope, DeclKind kind, bool exported,
                      bool imported = false, ScopeId site_scope = kNoScope) {
    const AstNode& b = ast_.node(n);
    uint32_t idx = tree_.Declare(scope, b.name, b.span, kind,
                                 b.Has(kFlagShorthand), site_scope);
    Declaration& d = tree_.mutable_declaration(scope, idx);
    d.exported = d.exported || exported;
    d.imported = d.imported || imported;
  }

  bool NeedsBlockScope(uint32_t block) const {
    bool needed = false;
    ast_.ForEachChild(block, [&](uint32_t c) {
      const AstNode& n = ast_.node(c);
      if ((n.kind == NodeKind::kVarDecl && !n.Has(kFlagVar)) ||
          (n.kind == NodeKind::kClass && !n.Has(kFlagExpression)))
        needed = true;
    });
    return needed;
  }

  void WalkFunction(uint32_t n, ScopeId outer, bool name_inside) {
    const AstNode& fn = ast_.node(n);
    ScopeId f = NewScope(ScopeKind::kFunction, outer, fn.span);
    ast_.ForEachChild(n, [&](uint32_t c) {
      const AstNode& child = ast_.node(c);
      if (child.kind == NodeKind::kBindingIdentifier &&
          child.Has(kFlagFunctionName)) {
        if (name_inside) DeclareBinding(c, f, DeclKind::kFunction, false);
        return;
      }
      if (child.kind == NodeKind::kParam) {
        ast_.ForEachChild(c, [&](uint32_t p) {
          if (ast_.node(p).kind == NodeKind::kBindingIdentifier)
            DeclareBinding(p, f, DeclKind::kParam, false);
          else
            Walk(p, f, f, false);
        });
        return;
      }
      Walk(c, f, f, false);
    });
  }

  void Walk(uint32_t n, ScopeId scope, ScopeId var_scope, bool exported) {
    const AstNode& node = ast_.node(n);
    switch (node.kind) {
      case NodeKind::kFunctionDecl:
        ast_.ForEachChild(n, [&](uint32_t c) {
          if (ast_.node(c).Has(kFlagFunctionName))
            DeclareBinding(c, var_scope, DeclKind::kFunction, exported, false,
                           scope);
        });
        WalkFunction(n, scope, false);
        return;
      case NodeKind::kFunctionExpr:
      case NodeKind::kArrow:
        WalkFunction(n, scope, true);
        return;
      case NodeKind::kClass: {
        ScopeId inner = scope;
        const bool is_expr = node.Has(kFlagExpression);
        if (is_expr && !node.name.empty())
          inner = NewScope(ScopeKind::kBlock, scope, node.span);
        ast_.ForEachChild(n, [&](uint32_t c) {
          const AstNode& child = ast_.node(c);
          if (child.kind == NodeKind::kBindingIdentifier &&
              child.Has(kFlagFunctionName)) {
            DeclareBinding(c, inner, DeclKind::kLexical, exported && !is_expr);
            return;
          }
          Walk(c, inner, var_scope, false);
        });
        return;
      }
      case NodeKind::kBlock: {
        ScopeId inner = scope;
        if (NeedsBlockScope(n))
          inner = NewScope(ScopeKind::kBlock, scope, node.span);
        ast_.ForEachChild(n, [&](uint32_t c) { Walk(c, inner, var_scope, false); });
        return;
      }
      case NodeKind::kLoop: {
        ScopeId inner = scope;
        if (node.Has(kFlagLexicalHeader))
          inner = NewScope(ScopeKind::kBlock, scope, node.span);
        ast_.ForEachChild(n, [&](uint32_t c) { Walk(c, inner, var_scope, false); });
        return;
      }
      case NodeKind::kCatchClause: {
        ScopeId inner = NewScope(ScopeKind::kBlock, scope, node.span);
        ast_.ForEachChild(n, [&](uint32_t c) {
          if (ast_.node(c).kind == NodeKind::kBindingIdentifier)
            DeclareBinding(c, inner, DeclKind::kLexical, false);
          else
            Walk(c, inner, var_scope, false);
        });
        return;
      }
      case NodeKind::kWith: {
        tree_.MarkDynamic(scope);
        ++with_depth_;
        ast_.ForEachChild(n, [&](uint32_t c) { Walk(c, scope, var_scope, false); });
        --with_depth_;
        return;
      }
      case NodeKind::kVarDecl: {
        const bool is_var = node.Has(kFlagVar);
        ast_.ForEachChild(n, [&](uint32_t c) {
          if (ast_.node(c).kind == NodeKind::kBindingIdentifier)
            DeclareBinding(c, is_var ? var_scope : scope,
                           is_var ? DeclKind::kVar : DeclKind::kLexical,
                           exported, false, scope);
          else
            Walk(c, scope, var_scope, false);
        });
        return;
      }
      case NodeKind::kImportDecl:
        ast_.ForEachChild(n, [&](uint32_t c) {
          if (ast_.node(c).kind == NodeKind::kBindingIdentifier)
            DeclareBinding(c, tree_.module_scope(), DeclKind::kLexical, false,
                           true);
        });
        return;
      case NodeKind::kExportDecl:
        ast_.ForEachChild(n, [&](uint32_t c) { Walk(c, scope, var_scope, true); });
        return;
      case NodeKind::kIdentifierRef:
        if (node.Has(kFlagExportSpecifier))
          exported_refs_.push_back(
              static_cast<uint32_t>(tree_.occurrences().size()));
        tree_.AddReference(scope, node.name, node.span,
                           node.Has(kFlagShorthand));
        return;
      case NodeKind::kBindingIdentifier:
        // Only reachable for patterns outside declarations, which the parser
        // does not produce; treat as a reference.
        tree_.AddReference(scope, node.name, node.span,
                           node.Has(kFlagShorthand));
        return;
      case NodeKind::kCall:
        if (node.Has(kFlagDynamic)) tree_.MarkDynamic(scope);
        [[fallthrough]];
      default:
        ast_.ForEachChild(n, [&](uint32_t c) { Walk(c, scope, var_scope, false); });
        return;
    }
  }

  const Ast& ast_;
  ScopeTree& tree_;
  int with_depth_ = 0;
  std::vector<uint32_t> exported_refs_;
};

}  // namespace

ScopeTree BuildScopeTree(const Ast& ast, FileId file) {
  ScopeTree tree(file);
  ScopeBuilder(ast, &tree).Build();
  return tree;
}

Binding Resolve(std::string_view name, ScopeId scope, const ScopeTree& tree) {
  if (scope >= tree.size())
    throw ScopeError("UnknownScope: " + std::to_string(scope));
  auto name_id = tree.FindName(name);
  if (name_id) {
    for (ScopeId s = scope; s != kNoScope; s = tree.node(s).parent) {
      if (tree.FindDeclaration(s, *name_id)) return Binding{s, std::string(name)};
    }
  }
  return Binding{kGlobalBinding, std::string(name)};
}

void FillScopeSummary(const Ast& ast, FileSummary* summary) {
  ScopeTree tree = BuildScopeTree(ast, summary->file);
  summary->declared_globals.clear();
  for (const Declaration& d : tree.node(tree.module_scope()).declarations)
    summary->declared_globals.push_back(tree.name(d.name_id));
  std::vector<std::string> free;
  for (const Occurrence& o : tree.occurrences())
    if (o.decl_scope == kGlobalBinding) free.push_back(tree.name(o.name_id));
  std::sort(free.begin(), free.end());
  free.erase(std::unique(free.begin(), free.end()), free.end());
  summary->free_names = std::move(free);
}

std::string DumpScopeTree(const ScopeTree& tree) {
  std::ostringstream out;
  struct Item {
    ScopeId id;
    int depth;
  };
  std::vector<Item> stack{{tree.root(), 0}};
  while (!stack.empty()) {
    Item item = stack.back();
    stack.pop_back();
    const ScopeNode& s = tree.node(item.id);
    out << std::string(2 * item.depth, ' ') << "#" << s.id << " "
        << ScopeKindName(s.kind) << " [";
    for (size_t i = 0; i < s.declarations.size(); ++i) {
      if (i) out << ' ';
      out << tree.name(s.declarations[i].name_id);
    }
    out << "]" << (s.is_dynamic ? " dynamic" : "") << "\n";
    for (auto it = s.children.rbegin(); it != s.children.rend(); ++it)
      stack.push_back({*it, item.depth + 1});
  }
  return out.str();
}

}  // namespace scopeshield
