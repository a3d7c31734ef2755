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

#ifndef SCOPESHIELD_AST_H_
#define SCOPESHIELD_AST_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "scopeshield/lexer.h"

namespace scopeshield {

// The tree keeps only what scope analysis, the transforms and the metrics
// need. Expressions are flattened: an expression statement owns its
// identifier references, member accesses, string literals, calls and nested
// functions directly, and decision points (?:, &&, ||) appear as leaf markers
// at their operator token.
enum class NodeKind : uint8_t {
  kProgram,
  kFunctionDecl,
  kFunctionExpr,  // also object/class methods and class static blocks
  kArrow,
  kClass,
  kBlock,
  kVarDecl,
  kParam,
  kIdentifierRef,
  kBindingIdentifier,
  kMemberAccess,  // span covers ".name" (or "?.name"); name is the property
  kStringLit,
  kCall,  // span covers the argument list; name is the callee if simple
  kImportDecl,
  kExportDecl,
  kOtherStatement,
  kIf,
  kLoop,
  kSwitch,
  kSwitchCase,  // one per `case` clause (not `default`)
  kCatchClause,
  kWith,
  kConditional,
  kLogicalAnd,
  kLogicalOr,
};

const char* NodeKindName(NodeKind kind);

enum NodeFlag : uint16_t {
  kFlagNone = 0,
  kFlagVar = 1u << 0,
  kFlagLet = 1u << 1,
  kFlagConst = 1u << 2,
  // Identifier written as a shorthand property (`{x}`); renaming must expand
  // it to `x:newName`.
  kFlagShorthand = 1u << 3,
  kFlagExpression = 1u << 4,
  kFlagMethod = 1u << 5,
  kFlagDirective = 1u << 6,
  kFlagModuleSpecifier = 1u << 7,
  kFlagOptional = 1u << 8,
  kFlagPrivate = 1u << 9,
  kFlagDeleteOperand = 1u << 10,
  kFlagDynamic = 1u << 11,
  kFlagExportSpecifier = 1u << 12,
  kFlagLexicalHeader = 1u << 13,
  kFlagFunctionName = 1u << 14,
  kFlagDefaultExport = 1u << 15,
};

inline constexpr uint32_t kNoNode = 0xFFFFFFFFu;

struct AstNode {
  NodeKind kind;
  uint16_t flags = kFlagNone;
  Span span;
  // Exact source spelling for identifiers, declarations, member properties
  // and simple callees.
  std::string_view name;
  uint32_t first_child = kNoNode;
  uint32_t next_sibling = kNoNode;

  bool Has(NodeFlag f) const { return (flags & f) != 0; }
};

// Arena-allocated tree. Node 0 is the program.
class Ast {
 public:
  const AstNode& node(uint32_t id) const { return nodes_[id]; }
  AstNode& node(uint32_t id) { return nodes_[id]; }
  uint32_t root() const { return 0; }
  size_t size() const { return nodes_.size(); }

  std::vector<uint32_t> Children(uint32_t id) const {
    std::vector<uint32_t> out;
    for (uint32_t c = nodes_[id].first_child; c != kNoNode;
         c = nodes_[c].next_sibling)
      out.push_back(c);
    return out;
  }

  template <typename Fn>
  void ForEachChild(uint32_t id, Fn&& fn) const {
    for (uint32_t c = nodes_[id].first_child; c != kNoNode;
         c = nodes_[c].next_sibling)
      fn(c);
  }

  std::vector<AstNode>& mutable_nodes() { return nodes_; }
  const std::vector<AstNode>& nodes() const { return nodes_; }

 private:
  std::vector<AstNode> nodes_;
};

}  // namespace scopeshield

#endif  // SCOPESHIELD_AST_H_
