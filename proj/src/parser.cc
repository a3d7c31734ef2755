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

#include "scopeshield/parser.h"

#include <algorithm>
#include <string>

#include "scopeshield/scope_tree.h"

namespace scopeshield {

const char* NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kProgram: return "program";
    case NodeKind::kFunctionDecl: return "function-decl";
    case NodeKind::kFunctionExpr: return "function-expr";
    case NodeKind::kArrow: return "arrow";
    case NodeKind::kClass: return "class";
    case NodeKind::kBlock: return "block";
    case NodeKind::kVarDecl: return "var-decl";
    case NodeKind::kParam: return "param";
    case NodeKind::kIdentifierRef: return "identifier-ref";
    case NodeKind::kBindingIdentifier: return "binding-identifier";
    case NodeKind::kMemberAccess: return "member-access";
    case NodeKind::kStringLit: return "string-lit";
    case NodeKind::kCall: return "call";
    case NodeKind::kImportDecl: return "import-decl";
    case NodeKind::kExportDecl: return "export-decl";
    case NodeKind::kOtherStatement: return "other-statement";
    case NodeKind::kIf: return "if";
    case NodeKind::kLoop: return "loop";
    case NodeKind::kSwitch: return "switch";
    case NodeKind::kSwitchCase: return "switch-case";
    case NodeKind::kCatchClause: return "catch-clause";
    case NodeKind::kWith: return "with";
    case NodeKind::kConditional: return "conditional";
    case NodeKind::kLogicalAnd: return "logical-and";
    case NodeKind::kLogicalOr: return "logical-or";
  }
  return "?";
}

ParseError::ParseError(FileId file, uint32_t offset, const std::string& message)
    : std::runtime_error("ParseError in file " + std::to_string(file) +
                         " at offset " + std::to_string(offset) + ": " +
                         message),
      file_(file),
      offset_(offset) {}

namespace {

bool IsAssignOp(std::string_view t) {
  static constexpr std::string_view kOps[] = {
      "=",  "+=",  "-=",  "*=",   "/=",  "%=",  "**=", "<<=",
      ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=", "\?\?="};
  return std::find(std::begin(kOps), std::end(kOps), t) != std::end(kOps);
}

bool IsBinaryOp(const Token& t, bool no_in) {
  if (t.kind == TokenKind::kKeyword)
    return t.text == "instanceof" || (t.text == "in" && !no_in);
  if (t.kind != TokenKind::kPunctuator) return false;
  static constexpr std::string_view kOps[] = {
      "??", "||", "&&", "|",  "^",  "&",  "==", "!=", "===", "!==", "<",
      ">",  "<=", ">=", "<<", ">>", ">>>", "+", "-",  "*",   "/",   "%",
      "**"};
  return std::find(std::begin(kOps), std::end(kOps), t.text) !=
         std::end(kOps);
}

std::string Unquote(std::string_view s) {
  if (s.size() >= 2) return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

class Parser {
 public:
  Parser(std::span<const Token> tokens, std::string_view src, FileId file)
      : src_(src), file_(file) {
    bool newline = false;
    for (const Token& t : tokens) {
      if (t.IsTrivia()) {
        if (t.text.find_first_of("\n\r") != std::string_view::npos ||
            t.text.find("\xE2\x80\xA8") != std::string_view::npos ||
            t.text.find("\xE2\x80\xA9") != std::string_view::npos)
          newline = true;
        continue;
      }
      if (t.kind == TokenKind::kIdentifier && !t.text.empty() &&
          t.text[0] == '$')
        dollar_names_.emplace_back(t.text);
      toks_.push_back(&t);
      newline_before_.push_back(newline);
      newline = false;
    }
    eof_ = Token{TokenKind::kPunctuator, std::string_view(),
                 Span{static_cast<uint32_t>(src.size()),
                      static_cast<uint32_t>(src.size())}};
    newline_before_.push_back(true);
  }

  ParseResult Run() {
    ParseResult result;
    auto& nodes = result.ast.mutable_nodes();
    nodes_ = &nodes;
    nodes.reserve(toks_.size() / 2 + 8);
    uint32_t program = Open(NodeKind::kProgram, 0);
    ParseDirectives();
    while (!AtEnd()) ParseStatement();
    Close(program, static_cast<uint32_t>(src_.size()));

    std::sort(dollar_names_.begin(), dollar_names_.end());
    dollar_names_.erase(std::unique(dollar_names_.begin(), dollar_names_.end()),
                        dollar_names_.end());
    summary_.file = file_;
    summary_.is_module = is_module_;
    summary_.dollar_names = std::move(dollar_names_);
    summary_.size_bytes = src_.size();
    result.summary = std::move(summary_);
    return result;
  }

 private:
  // ---- token access ----
  const Token& Cur() const { return At(0); }
  const Token& At(size_t k) const {
    return p_ + k < toks_.size() ? *toks_[p_ + k] : eof_;
  }
  bool AtEnd() const { return p_ >= toks_.size(); }
  bool NewlineBefore(size_t k = 0) const {
    return newline_before_[std::min(p_ + k, toks_.size())];
  }
  void Advance() {
    if (p_ < toks_.size()) {
      prev_end_ = toks_[p_]->span.end;
      ++p_;
    }
  }
  bool IsPunct(std::string_view t, size_t k = 0) const {
    return At(k).IsPunct(t);
  }
  bool IsKeyword(std::string_view t, size_t k = 0) const {
    return At(k).IsKeyword(t);
  }
  bool IsIdent(std::string_view t, size_t k = 0) const {
    return At(k).Is(TokenKind::kIdentifier, t);
  }
  bool IsPlainIdent(size_t k = 0) const {
    const Token& t = At(k);
    return t.kind == TokenKind::kIdentifier && !t.text.empty() &&
           t.text[0] != '#';
  }

  [[noreturn]] void Fail(const std::string& message) const {
    throw ParseError(file_, Cur().span.start,
                     message + " near '" + std::string(Cur().text) + "'");
  }

  void Expect(std::string_view punct) {
    if (!IsPunct(punct)) Fail("expected '" + std::string(punct) + "'");
    Advance();
  }

  void ExpectKeyword(std::string_view kw) {
    if (!IsKeyword(kw)) Fail("expected '" + std::string(kw) + "'");
    Advance();
  }

  void ConsumeSemicolon() {
    if (IsPunct(";")) {
      Advance();
      return;
    }
    if (AtEnd() || IsPunct("}") || NewlineBefore()) return;
    Fail("expected ';'");
  }

  // ---- node construction ----
  uint32_t Open(NodeKind kind, uint32_t start, uint16_t flags = kFlagNone,
                std::string_view name = {}) {
    uint32_t id = Append(kind, Span{start, start}, flags, name);
    open_.push_back(id);
    return id;
  }

  void Close(uint32_t id, uint32_t end) {
    open_.pop_back();
    (*nodes_)[id].span.end = std::max(end, (*nodes_)[id].span.start);
  }

  uint32_t Leaf(NodeKind kind, Span span, uint16_t flags = kFlagNone,
                std::string_view name = {}) {
    return Append(kind, span, flags, name);
  }

  uint32_t Append(NodeKind kind, Span span, uint16_t flags,
                  std::string_view name) {
    uint32_t id = static_cast<uint32_t>(nodes_->size());
    AstNode n;
    n.kind = kind;
    n.flags = flags;
    n.span = span;
    n.name = name;
    nodes_->push_back(n);
    last_child_.push_back(kNoNode);
    if (!open_.empty()) {
      uint32_t parent = open_.back();
      if (last_child_[parent] == kNoNode)
        (*nodes_)[parent].first_child = id;
      else
        (*nodes_)[last_child_[parent]].next_sibling = id;
      last_child_[parent] = id;
    }
    return id;
  }

  struct FunctionContext {
    Parser* parser;
    bool saved_async, saved_generator;
    FunctionContext(Parser* p, bool is_async, bool is_generator)
        : parser(p),
          saved_async(p->in_async_),
          saved_generator(p->in_generator_) {
      p->in_async_ = is_async;
      p->in_generator_ = is_generator;
    }
    ~FunctionContext() {
      parser->in_async_ = saved_async;
      parser->in_generator_ = saved_generator;
    }
  };

  // ---- statements ----
  void ParseDirectives() {
    while (Cur().kind == TokenKind::kStringLiteral) {
      const Token& next = At(1);
      bool ends = next.IsPunct(";") || next.IsPunct("}") ||
                  p_ + 1 >= toks_.size() || NewlineBefore(1);
      if (!ends) return;
      uint32_t stmt = Open(NodeKind::kOtherStatement, Cur().span.start);
      Leaf(NodeKind::kStringLit, Cur().span, kFlagDirective, Cur().text);
      Advance();
      ConsumeSemicolon();
      Close(stmt, prev_end_);
    }
  }

  bool LetStartsDeclaration() const {
    if (!IsIdent("let")) return false;
    const Token& n = At(1);
    return n.kind == TokenKind::kIdentifier || n.IsPunct("[") ||
           n.IsPunct("{");
  }

  void ParseStatement() {
    const Token& t = Cur();
    if (t.kind == TokenKind::kPunctuator) {
      if (t.text == "{") {
        ParseBlock();
        return;
      }
      if (t.text == ";") {
        Advance();
        return;
      }
    }
    if (t.kind == TokenKind::kKeyword) {
      std::string_view k = t.text;
      if (k == "var" || k == "const") {
        ParseVarDecl(true, false);
        return;
      }
      if (k == "function") {
        ParseFunction(false, false, t.span.start);
        return;
      }
      if (k == "class") {
        ParseClass(false, t.span.start);
        return;
      }
      if (k == "if") return ParseIf();
      if (k == "for") return ParseFor();
      if (k == "while") return ParseWhile();
      if (k == "do") return ParseDoWhile();
      if (k == "switch") return ParseSwitch();
      if (k == "try") return ParseTry();
      if (k == "return" || k == "throw") return ParseReturnOrThrow();
      if (k == "break" || k == "continue") return ParseBreakContinue();
      if (k == "with") return ParseWith();
      if (k == "debugger") {
        uint32_t s = Open(NodeKind::kOtherStatement, t.span.start);
        Advance();
        ConsumeSemicolon();
        Close(s, prev_end_);
        return;
      }
      if (k == "import" && !IsPunct("(", 1) && !IsPunct(".", 1))
        return ParseImport();
      if (k == "export") return ParseExport();
    }
    if (LetStartsDeclaration()) {
      ParseVarDecl(true, false);
      return;
    }
    if (IsIdent("async") && IsKeyword("function", 1) && !NewlineBefore(1)) {
      ParseFunction(false, true, t.span.start);
      return;
    }
    if (IsPlainIdent() && IsPunct(":", 1)) {
      // Labels live in their own namespace and are left untouched.
      Advance();
      Advance();
      ParseStatement();
      return;
    }
    uint32_t s = Open(NodeKind::kOtherStatement, t.span.start);
    ParseExpression(false);
    ConsumeSemicolon();
    Close(s, prev_end_);
  }

  void ParseBlock() {
    uint32_t b = Open(NodeKind::kBlock, Cur().span.start);
    Expect("{");
    while (!IsPunct("}")) {
      if (AtEnd()) Fail("unterminated block");
      ParseStatement();
    }
    Advance();
    Close(b, prev_end_);
  }

  // Declarations of `var`, `let` or `const`.
  void ParseVarDecl(bool consume_semicolon, bool no_in) {
    const Token& kw = Cur();
    uint16_t flags = kw.text == "var"   ? kFlagVar
                     : kw.text == "let" ? kFlagLet
                                        : kFlagConst;
    uint32_t d = Open(NodeKind::kVarDecl, kw.span.start, flags);
    Advance();
    while (true) {
      ParseBindingTarget();
      if (IsPunct("=")) {
        Advance();
        ParseAssignment(no_in);
      }
      if (!IsPunct(",")) break;
      Advance();
    }
    if (consume_semicolon) ConsumeSemicolon();
    Close(d, prev_end_);
  }

  void ParseBindingTarget() {
    const Token& t = Cur();
    if (IsPlainIdent()) {
      Leaf(NodeKind::kBindingIdentifier, t.span, kFlagNone, t.text);
      Advance();
      return;
    }
    if (t.IsPunct("[")) {
      Advance();
      while (!IsPunct("]")) {
        if (AtEnd()) Fail("unterminated array pattern");
        if (IsPunct(",")) {
          Advance();
          continue;
        }
        if (IsPunct("...")) Advance();
        ParseBindingTarget();
        if (IsPunct("=")) {
          Advance();
          ParseAssignment(false);
        }
        if (IsPunct(",")) Advance();
      }
      Advance();
      return;
    }
    if (t.IsPunct("{")) {
      Advance();
      while (!IsPunct("}")) {
        if (AtEnd()) Fail("unterminated object pattern");
        if (IsPunct("...")) {
          Advance();
          ParseBindingTarget();
        } else if (IsPunct("[")) {
          Advance();
          ParseAssignment(false);
          Expect("]");
          Expect(":");
          ParseBindingTarget();
        } else if (IsPunct(":", 1)) {
          if (!IsPropertyKeyToken(Cur())) Fail("bad property key in pattern");
          Advance();
          Advance();
          ParseBindingTarget();
        } else {
          if (!IsPlainIdent()) Fail("expected identifier in pattern");
          Leaf(NodeKind::kBindingIdentifier, Cur().span, kFlagShorthand,
               Cur().text);
          Advance();
        }
        if (IsPunct("=")) {
          Advance();
          ParseAssignment(false);
        }
        if (IsPunct(",")) Advance();
        else if (!IsPunct("}")) Fail("expected ',' in object pattern");
      }
      Advance();
      return;
    }
    Fail("expected binding target");
  }

  static bool IsPropertyKeyToken(const Token& t) {
    return t.kind == TokenKind::kIdentifier || t.kind == TokenKind::kKeyword ||
           t.kind == TokenKind::kStringLiteral ||
           t.kind == TokenKind::kNumericLiteral;
  }

  void ParseFunction(bool is_expression, bool is_async, uint32_t start) {
    uint32_t f = Open(is_expression ? NodeKind::kFunctionExpr
                                    : NodeKind::kFunctionDecl,
                      start, is_expression ? kFlagExpression : kFlagNone);
    if (is_async) Advance();
    ExpectKeyword("function");
    bool generator = false;
    if (IsPunct("*")) {
      generator = true;
      Advance();
    }
    if (IsPlainIdent()) {
      Leaf(NodeKind::kBindingIdentifier, Cur().span, kFlagFunctionName,
           Cur().text);
      (*nodes_)[f].name = Cur().text;
      Advance();
    }
    ParseFunctionRest(is_async, generator);
    Close(f, prev_end_);
  }

  void ParseFunctionRest(bool is_async, bool is_generator) {
    FunctionContext ctx(this, is_async, is_generator);
    ParseParams();
    ParseFunctionBody();
  }

  void ParseParams() {
    Expect("(");
    while (!IsPunct(")")) {
      if (AtEnd()) Fail("unterminated parameter list");
      uint32_t param = Open(NodeKind::kParam, Cur().span.start);
      if (IsPunct("...")) Advance();
      ParseBindingTarget();
      if (IsPunct("=")) {
        Advance();
        ParseAssignment(false);
      }
      Close(param, prev_end_);
      if (IsPunct(",")) Advance();
      else if (!IsPunct(")")) Fail("expected ',' in parameter list");
    }
    Advance();
  }

  void ParseFunctionBody() {
    Expect("{");
    ParseDirectives();
    while (!IsPunct("}")) {
      if (AtEnd()) Fail("unterminated function body");
      ParseStatement();
    }
    Advance();
  }

  void ParseClass(bool is_expression, uint32_t start) {
    uint32_t c = Open(NodeKind::kClass, start,
                      is_expression ? kFlagExpression : kFlagNone);
    ExpectKeyword("class");
    if (IsPlainIdent()) {
      Leaf(NodeKind::kBindingIdentifier, Cur().span, kFlagFunctionName,
           Cur().text);
      (*nodes_)[c].name = Cur().text;
      Advance();
    }
    if (IsKeyword("extends")) {
      Advance();
      ParseLeftHandSide();
    }
    Expect("{");
    while (!IsPunct("}")) {
      if (AtEnd()) Fail("unterminated class body");
      ParseClassMember();
    }
    Advance();
    Close(c, prev_end_);
  }

  bool ModifierApplies(size_t k = 1) const {
    const Token& n = At(k);
    return !(n.IsPunct("(") || n.IsPunct("=") || n.IsPunct(";") ||
             n.IsPunct("}") || n.IsPunct(",") || n.IsPunct(":")) &&
           p_ + k < toks_.size();
  }

  void ParseClassMember() {
    if (IsPunct(";")) {
      Advance();
      return;
    }
    const uint32_t start = Cur().span.start;
    if (IsIdent("static") && IsPunct("{", 1)) {
      Advance();
      uint32_t f = Open(NodeKind::kFunctionExpr, start, kFlagMethod);
      {
        FunctionContext ctx(this, false, false);
        ParseFunctionBody();
      }
      Close(f, prev_end_);
      return;
    }
    if (IsIdent("static") && ModifierApplies()) Advance();
    bool is_async = false, generator = false;
    if (IsIdent("async") && ModifierApplies() && !NewlineBefore(1)) {
      is_async = true;
      Advance();
    }
    if (IsPunct("*")) {
      generator = true;
      Advance();
    }
    if ((IsIdent("get") || IsIdent("set")) && ModifierApplies()) Advance();
    ParsePropertyKey();
    if (IsPunct("(")) {
      uint32_t f = Open(NodeKind::kFunctionExpr, start, kFlagMethod);
      ParseFunctionRest(is_async, generator);
      Close(f, prev_end_);
      return;
    }
    if (IsPunct("=")) {
      Advance();
      ParseAssignment(false);
    }
    ConsumeSemicolon();
  }

  // Property names are not bindings and produce no nodes; computed keys
  // contribute their expression.
  void ParsePropertyKey() {
    if (IsPunct("[")) {
      Advance();
      ParseAssignment(false);
      Expect("]");
      return;
    }
    if (IsPropertyKeyToken(Cur())) {
      Advance();
      return;
    }
    Fail("expected property name");
  }

  void ParseIf() {
    uint32_t s = Open(NodeKind::kIf, Cur().span.start);
    Advance();
    Expect("(");
    ParseExpression(false);
    Expect(")");
    ParseStatement();
    if (IsKeyword("else")) {
      Advance();
      ParseStatement();
    }
    Close(s, prev_end_);
  }

  void ParseFor() {
    uint32_t s = Open(NodeKind::kLoop, Cur().span.start);
    Advance();
    if (IsIdent("await")) Advance();
    Expect("(");
    bool head_done = false;
    if (IsPunct(";")) {
      // no initializer
    } else if (IsKeyword("var") || IsKeyword("const") ||
               LetStartsDeclaration()) {
      if (!IsKeyword("var")) (*nodes_)[s].flags |= kFlagLexicalHeader;
      ParseVarDecl(false, true);
    } else {
      ParseExpression(true);
    }
    if (IsIdent("of")) {
      Advance();
      ParseAssignment(false);
      head_done = true;
    } else if (IsKeyword("in")) {
      Advance();
      ParseExpression(false);
      head_done = true;
    }
    if (!head_done) {
      Expect(";");
      if (!IsPunct(";")) ParseExpression(false);
      Expect(";");
      if (!IsPunct(")")) ParseExpression(false);
    }
    Expect(")");
    ParseStatement();
    Close(s, prev_end_);
  }

  void ParseWhile() {
    uint32_t s = Open(NodeKind::kLoop, Cur().span.start);
    Advance();
    Expect("(");
    ParseExpression(false);
    Expect(")");
    ParseStatement();
    Close(s, prev_end_);
  }

  void ParseDoWhile() {
    uint32_t s = Open(NodeKind::kLoop, Cur().span.start);
    Advance();
    ParseStatement();
    ExpectKeyword("while");
    Expect("(");
    ParseExpression(false);
    Expect(")");
    if (IsPunct(";")) Advance();
    Close(s, prev_end_);
  }

  void ParseSwitch() {
    uint32_t s = Open(NodeKind::kSwitch, Cur().span.start);
    Advance();
    Expect("(");
    ParseExpression(false);
    Expect(")");
    uint32_t body = Open(NodeKind::kBlock, Cur().span.start);
    Expect("{");
    while (!IsPunct("}")) {
      if (AtEnd()) Fail("unterminated switch");
      if (IsKeyword("case")) {
        Leaf(NodeKind::kSwitchCase, Cur().span);
        Advance();
        ParseExpression(false);
        Expect(":");
      } else if (IsKeyword("default")) {
        Advance();
        Expect(":");
      } else {
        ParseStatement();
      }
    }
    Advance();
    Close(body, prev_end_);
    Close(s, prev_end_);
  }

  void ParseTry() {
    uint32_t s = Open(NodeKind::kOtherStatement, Cur().span.start);
    Advance();
    ParseBlock();
    if (IsKeyword("catch")) {
      uint32_t c = Open(NodeKind::kCatchClause, Cur().span.start);
      Advance();
      if (IsPunct("(")) {
        Advance();
        ParseBindingTarget();
        Expect(")");
      }
      Expect("{");
      while (!IsPunct("}")) {
        if (AtEnd()) Fail("unterminated catch block");
        ParseStatement();
      }
      Advance();
      Close(c, prev_end_);
    }
    if (IsKeyword("finally")) {
      Advance();
      ParseBlock();
    }
    Close(s, prev_end_);
  }

  void ParseReturnOrThrow() {
    uint32_t s = Open(NodeKind::kOtherStatement, Cur().span.start);
    Advance();
    if (!(IsPunct(";") || IsPunct("}") || AtEnd() || NewlineBefore()))
      ParseExpression(false);
    ConsumeSemicolon();
    Close(s, prev_end_);
  }

  void ParseBreakContinue() {
    uint32_t s = Open(NodeKind::kOtherStatement, Cur().span.start);
    Advance();
    if (IsPlainIdent() && !NewlineBefore()) Advance();
    ConsumeSemicolon();
    Close(s, prev_end_);
  }

  void ParseWith() {
    const uint32_t start = Cur().span.start;
    uint32_t s = Open(NodeKind::kWith, start, kFlagDynamic);
    Advance();
    Expect("(");
    ParseExpression(false);
    Expect(")");
    ParseStatement();
    Close(s, prev_end_);
    summary_.dynamic_sites.push_back(Span{start, prev_end_});
    summary_.warnings.push_back("`with` statement at offset " +
                                std::to_string(start) +
                                ": enclosing bindings keep their names");
  }

  std::string ParseModuleSpecifier() {
    if (Cur().kind != TokenKind::kStringLiteral)
      Fail("expected module specifier");
    Leaf(NodeKind::kStringLit, Cur().span, kFlagModuleSpecifier, Cur().text);
    std::string source = Unquote(Cur().text);
    Advance();
    return source;
  }

  void SkipImportAttributes() {
    if ((IsKeyword("with") || IsIdent("assert")) && IsPunct("{", 1) &&
        !NewlineBefore()) {
      Advance();
      int depth = 0;
      do {
        if (IsPunct("{")) ++depth;
        if (IsPunct("}")) --depth;
        Advance();
      } while (depth > 0 && !AtEnd());
    }
  }

  void ParseImport() {
    is_module_ = true;
    uint32_t s = Open(NodeKind::kImportDecl, Cur().span.start);
    Advance();
    ImportEntry entry;
    if (Cur().kind == TokenKind::kStringLiteral) {
      entry.source = ParseModuleSpecifier();
    } else {
      if (IsPlainIdent()) {
        Leaf(NodeKind::kBindingIdentifier, Cur().span, kFlagNone, Cur().text);
        entry.names.push_back("default");
        Advance();
        if (IsPunct(",")) Advance();
      }
      if (IsPunct("*")) {
        Advance();
        if (!IsIdent("as")) Fail("expected 'as'");
        Advance();
        if (!IsPlainIdent()) Fail("expected namespace binding");
        Leaf(NodeKind::kBindingIdentifier, Cur().span, kFlagNone, Cur().text);
        entry.names.push_back("*");
        Advance();
      } else if (IsPunct("{")) {
        Advance();
        while (!IsPunct("}")) {
          if (AtEnd()) Fail("unterminated import list");
          const Token& imported = Cur();
          if (!IsPropertyKeyToken(imported)) Fail("expected import name");
          std::string name = imported.kind == TokenKind::kStringLiteral
                                 ? Unquote(imported.text)
                                 : std::string(imported.text);
          Advance();
          const Token* local = &imported;
          if (IsIdent("as")) {
            Advance();
            local = &Cur();
            Advance();
          }
          if (local->kind != TokenKind::kIdentifier)
            Fail("expected local import binding");
          Leaf(NodeKind::kBindingIdentifier, local->span, kFlagNone,
               local->text);
          entry.names.push_back(std::move(name));
          if (IsPunct(",")) Advance();
        }
        Advance();
      }
      if (!IsIdent("from")) Fail("expected 'from'");
      Advance();
      entry.source = ParseModuleSpecifier();
    }
    SkipImportAttributes();
    ConsumeSemicolon();
    Close(s, prev_end_);
    summary_.imports.push_back(std::move(entry));
  }

  void ParseExport() {
    is_module_ = true;
    const uint32_t start = Cur().span.start;
    uint32_t s = Open(NodeKind::kExportDecl, start);
    Advance();
    if (IsKeyword("default")) {
      (*nodes_)[s].flags |= kFlagDefaultExport;
      summary_.exports.push_back("default");
      Advance();
      if (IsKeyword("function")) {
        ParseFunction(false, false, Cur().span.start);
      } else if (IsIdent("async") && IsKeyword("function", 1) &&
                 !NewlineBefore(1)) {
        ParseFunction(false, true, Cur().span.start);
      } else if (IsKeyword("class")) {
        ParseClass(false, Cur().span.start);
      } else {
        ParseAssignment(false);
        ConsumeSemicolon();
      }
      Close(s, prev_end_);
      return;
    }
    if (IsPunct("*")) {
      Advance();
      ReExport re;
      re.star = true;
      if (IsIdent("as")) {
        Advance();
        std::string as = Cur().kind == TokenKind::kStringLiteral
                             ? Unquote(Cur().text)
                             : std::string(Cur().text);
        Advance();
        re.star = false;
        re.names.emplace_back("*", as);
        summary_.exports.push_back(as);
      }
      if (!IsIdent("from")) Fail("expected 'from'");
      Advance();
      re.source = ParseModuleSpecifier();
      SkipImportAttributes();
      ConsumeSemicolon();
      Close(s, prev_end_);
      summary_.reexports.push_back(std::move(re));
      return;
    }
    if (IsPunct("{")) {
      Advance();
      struct Spec {
        Token local;
        std::string exported;
      };
      std::vector<Spec> specs;
      while (!IsPunct("}")) {
        if (AtEnd()) Fail("unterminated export list");
        Spec spec{Cur(), {}};
        if (!IsPropertyKeyToken(spec.local)) Fail("expected export name");
        Advance();
        const Token* exported = &spec.local;
        if (IsIdent("as")) {
          Advance();
          exported = &Cur();
          Advance();
        }
        spec.exported = exported->kind == TokenKind::kStringLiteral
                            ? Unquote(exported->text)
                            : std::string(exported->text);
        specs.push_back(std::move(spec));
        if (IsPunct(",")) Advance();
      }
      Advance();
      if (IsIdent("from")) {
        Advance();
        ReExport re;
        for (const Spec& spec : specs) {
          std::string local = spec.local.kind == TokenKind::kStringLiteral
                                  ? Unquote(spec.local.text)
                                  : std::string(spec.local.text);
          re.names.emplace_back(local, spec.exported);
          summary_.exports.push_back(spec.exported);
        }
        re.source = ParseModuleSpecifier();
        summary_.reexports.push_back(std::move(re));
        SkipImportAttributes();
      } else {
        for (const Spec& spec : specs) {
          if (spec.local.kind != TokenKind::kIdentifier)
            throw ParseError(file_, spec.local.span.start,
                             "export of a non-identifier");
          Leaf(NodeKind::kIdentifierRef, spec.local.span,
               kFlagExportSpecifier, spec.local.text);
          summary_.exports.push_back(spec.exported);
        }
      }
      ConsumeSemicolon();
      Close(s, prev_end_);
      return;
    }
    const size_t first_new = nodes_->size();
    if (IsKeyword("var") || IsKeyword("const") || LetStartsDeclaration()) {
      ParseVarDecl(true, false);
    } else if (IsKeyword("function")) {
      ParseFunction(false, false, Cur().span.start);
    } else if (IsIdent("async") && IsKeyword("function", 1)) {
      ParseFunction(false, true, Cur().span.start);
    } else if (IsKeyword("class")) {
      ParseClass(false, Cur().span.start);
    } else {
      Fail("unsupported export form");
    }
    // Exported names are the bindings the declaration introduces directly.
    const AstNode& decl = (*nodes_)[first_new];
    if (decl.kind == NodeKind::kVarDecl) {
      for (uint32_t c = decl.first_child; c != kNoNode;
           c = (*nodes_)[c].next_sibling) {
        if ((*nodes_)[c].kind == NodeKind::kBindingIdentifier)
          summary_.exports.emplace_back((*nodes_)[c].name);
      }
    } else if (!decl.name.empty()) {
      summary_.exports.emplace_back(decl.name);
    }
    Close(s, prev_end_);
  }

  // ---- expressions ----
  void ParseExpression(bool no_in) {
    ParseAssignment(no_in);
    while (IsPunct(",")) {
      Advance();
      ParseAssignment(no_in);
    }
  }

  size_t MatchingParen(size_t k) const {
    int depth = 0;
    for (size_t i = p_ + k; i < toks_.size(); ++i) {
      const Token& t = *toks_[i];
      if (t.kind != TokenKind::kPunctuator) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      else if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (--depth == 0) return i - p_;
      }
    }
    return std::string_view::npos;
  }

  bool ArrowAhead() const {
    size_t k = 0;
    if (IsIdent("async") && !NewlineBefore(1) &&
        (IsPlainIdent(1) || IsPunct("(", 1)))
      k = 1;
    if (IsPlainIdent(k) && IsPunct("=>", k + 1)) return true;
    if (IsPunct("(", k)) {
      size_t close = MatchingParen(k);
      return close != std::string_view::npos && IsPunct("=>", close + 1);
    }
    return false;
  }

  void ParseArrow(bool no_in) {
    uint32_t a = Open(NodeKind::kArrow, Cur().span.start);
    bool is_async = false;
    if (IsIdent("async") && !IsPunct("=>", 1)) {
      is_async = true;
      Advance();
    }
    {
      FunctionContext ctx(this, is_async, false);
      if (IsPlainIdent()) {
        uint32_t param = Open(NodeKind::kParam, Cur().span.start);
        Leaf(NodeKind::kBindingIdentifier, Cur().span, kFlagNone, Cur().text);
        Advance();
        Close(param, prev_end_);
      } else {
        ParseParams();
      }
      Expect("=>");
      if (IsPunct("{")) ParseFunctionBody();
      else ParseAssignment(no_in);
    }
    Close(a, prev_end_);
  }

  bool StartsExpression() const {
    const Token& t = Cur();
    if (AtEnd()) return false;
    if (t.kind == TokenKind::kPunctuator)
      return t.text == "(" || t.text == "[" || t.text == "{" ||
             t.text == "!" || t.text == "~" || t.text == "+" ||
             t.text == "-" || t.text == "++" || t.text == "--" ||
             t.text == "/" || t.text == "...";
    if (t.kind == TokenKind::kKeyword)
      return !(t.text == "in" || t.text == "instanceof" || t.text == "case" ||
               t.text == "default" || t.text == "else" || t.text == "catch" ||
               t.text == "finally");
    return true;
  }

  void ParseAssignment(bool no_in) {
    if (ArrowAhead()) {
      ParseArrow(no_in);
      return;
    }
    if (in_generator_ && IsIdent("yield")) {
      Advance();
      if (IsPunct("*")) Advance();
      if (!NewlineBefore() && StartsExpression() && !IsPunct(")") &&
          !IsPunct("]") && !IsPunct("}") && !IsPunct(",") && !IsPunct(";") &&
          !IsPunct(":"))
        ParseAssignment(no_in);
      return;
    }
    ParseConditional(no_in);
    if (Cur().kind == TokenKind::kPunctuator && IsAssignOp(Cur().text)) {
      Advance();
      ParseAssignment(no_in);
    }
  }

  void ParseConditional(bool no_in) {
    ParseBinary(no_in);
    if (IsPunct("?")) {
      Leaf(NodeKind::kConditional, Cur().span);
      Advance();
      ParseAssignment(false);
      Expect(":");
      ParseAssignment(no_in);
    }
  }

  // Operator precedence does not affect the flattened tree, so binary
  // expressions are parsed as a flat operand/operator sequence.
  void ParseBinary(bool no_in) {
    ParseUnary();
    while (IsBinaryOp(Cur(), no_in)) {
      if (IsPunct("&&")) Leaf(NodeKind::kLogicalAnd, Cur().span);
      else if (IsPunct("||")) Leaf(NodeKind::kLogicalOr, Cur().span);
      Advance();
      ParseUnary();
    }
  }

  void ParseUnary() {
    const Token& t = Cur();
    if (t.kind == TokenKind::kPunctuator &&
        (t.text == "!" || t.text == "~" || t.text == "+" || t.text == "-" ||
         t.text == "++" || t.text == "--")) {
      Advance();
      ParseUnary();
      return;
    }
    if (t.kind == TokenKind::kKeyword &&
        (t.text == "typeof" || t.text == "void" || t.text == "delete")) {
      const bool is_delete = t.text == "delete";
      Advance();
      if (is_delete) ++delete_depth_;
      ParseUnary();
      if (is_delete) --delete_depth_;
      return;
    }
    if (in_async_ && t.Is(TokenKind::kIdentifier, "await")) {
      Advance();
      ParseUnary();
      return;
    }
    ParseLeftHandSide();
    if ((IsPunct("++") || IsPunct("--")) && !NewlineBefore()) Advance();
  }

  void ParseArguments(std::string_view callee, uint32_t callee_start) {
    uint16_t flags = kFlagNone;
    const bool dynamic = callee == "eval" || callee == "Function";
    if (dynamic) flags |= kFlagDynamic;
    uint32_t call = Open(NodeKind::kCall, Cur().span.start, flags, callee);
    Expect("(");
    while (!IsPunct(")")) {
      if (AtEnd()) Fail("unterminated argument list");
      if (IsPunct("...")) Advance();
      ParseAssignment(false);
      if (IsPunct(",")) Advance();
      else if (!IsPunct(")")) Fail("expected ',' in argument list");
    }
    Advance();
    Close(call, prev_end_);
    if (dynamic) summary_.dynamic_sites.push_back(Span{callee_start, prev_end_});
  }

  void ParseTemplate() {
    std::string_view text = Cur().text;
    Advance();
    if (!text.ends_with("${")) return;
    while (true) {
      ParseExpression(false);
      if (Cur().kind != TokenKind::kTemplateLiteral ||
          !Cur().text.starts_with("}"))
        Fail("malformed template literal");
      std::string_view piece = Cur().text;
      Advance();
      if (!piece.ends_with("${")) return;
    }
  }

  void ParseMemberAccess(bool optional) {
    const uint32_t start = Cur().span.start;  // "." or "?."
    Advance();
    const Token& name = Cur();
    if (!(name.kind == TokenKind::kIdentifier ||
          name.kind == TokenKind::kKeyword))
      Fail("expected property name");
    uint16_t flags = kFlagNone;
    if (optional) flags |= kFlagOptional;
    if (name.text[0] == '#') flags |= kFlagPrivate;
    if (delete_depth_ > 0) flags |= kFlagDeleteOperand;
    Leaf(NodeKind::kMemberAccess, Span{start, name.span.end}, flags,
         name.text);
    Advance();
  }

  void ParseLeftHandSide() {
    const uint32_t start = Cur().span.start;
    std::string_view callee;
    if (IsKeyword("new")) {
      ParseNew();
    } else {
      if (IsPlainIdent() && !IsIdent("async")) callee = Cur().text;
      if (IsIdent("async") && !(IsKeyword("function", 1) && !NewlineBefore(1)))
        callee = Cur().text;
      ParsePrimary();
    }
    bool first = true;
    while (true) {
      if (IsPunct(".")) {
        ParseMemberAccess(false);
      } else if (IsPunct("?.")) {
        if (IsPunct("(", 1)) {
          Advance();
          ParseArguments({}, start);
        } else if (IsPunct("[", 1)) {
          Advance();
          Advance();
          ParseExpression(false);
          Expect("]");
        } else {
          ParseMemberAccess(true);
        }
      } else if (IsPunct("[")) {
        Advance();
        ParseExpression(false);
        Expect("]");
      } else if (IsPunct("(")) {
        ParseArguments(first ? callee : std::string_view(), start);
      } else if (Cur().kind == TokenKind::kTemplateLiteral &&
                 Cur().text.starts_with("`")) {
        ParseTemplate();
      } else {
        break;
      }
      first = false;
    }
  }

  void ParseNew() {
    const uint32_t start = Cur().span.start;
    Advance();  // new
    if (IsPunct(".")) {
      Advance();
      Advance();  // target
      return;
    }
    std::string_view callee;
    if (IsKeyword("new")) {
      ParseNew();
    } else {
      if (IsPlainIdent()) callee = Cur().text;
      ParsePrimary();
    }
    bool first = true;
    while (true) {
      if (IsPunct(".")) {
        ParseMemberAccess(false);
      } else if (IsPunct("[")) {
        Advance();
        ParseExpression(false);
        Expect("]");
      } else if (Cur().kind == TokenKind::kTemplateLiteral &&
                 Cur().text.starts_with("`")) {
        ParseTemplate();
      } else {
        break;
      }
      first = false;
    }
    if (IsPunct("(")) ParseArguments(first ? callee : std::string_view(), start);
  }

  void ParsePrimary() {
    const Token& t = Cur();
    switch (t.kind) {
      case TokenKind::kIdentifier:
        if (t.text == "async" && IsKeyword("function", 1) &&
            !NewlineBefore(1)) {
          ParseFunction(true, true, t.span.start);
          return;
        }
        if (t.text[0] == '#') {  // `#x in obj`
          Advance();
          return;
        }
        Leaf(NodeKind::kIdentifierRef, t.span, kFlagNone, t.text);
        Advance();
        return;
      case TokenKind::kKeyword:
        if (t.text == "this" || t.text == "super" || t.text == "null" ||
            t.text == "true" || t.text == "false") {
          Advance();
          return;
        }
        if (t.text == "function") {
          ParseFunction(true, false, t.span.start);
          return;
        }
        if (t.text == "class") {
          ParseClass(true, t.span.start);
          return;
        }
        if (t.text == "import") {
          const uint32_t start = t.span.start;
          Advance();
          if (IsPunct(".")) {
            Advance();
            Advance();  // meta
            return;
          }
          summary_.warnings.push_back("dynamic import() at offset " +
                                      std::to_string(start));
          ParseArguments("import", start);
          return;
        }
        Fail("unexpected keyword");
      case TokenKind::kNumericLiteral:
      case TokenKind::kRegexLiteral:
        Advance();
        return;
      case TokenKind::kStringLiteral:
        Leaf(NodeKind::kStringLit, t.span, kFlagNone, t.text);
        Advance();
        return;
      case TokenKind::kTemplateLiteral:
        if (!t.text.starts_with("`")) Fail("unexpected template continuation");
        ParseTemplate();
        return;
      case TokenKind::kPunctuator:
        if (t.text == "(") {
          Advance();
          ParseExpression(false);
          Expect(")");
          return;
        }
        if (t.text == "[") {
          ParseArrayLiteral();
          return;
        }
        if (t.text == "{") {
          ParseObjectLiteral();
          return;
        }
        Fail("unexpected token");
      default:
        Fail("unexpected token");
    }
  }

  void ParseArrayLiteral() {
    Advance();
    while (!IsPunct("]")) {
      if (AtEnd()) Fail("unterminated array literal");
      if (IsPunct(",")) {
        Advance();
        continue;
      }
      if (IsPunct("...")) Advance();
      ParseAssignment(false);
      if (IsPunct(",")) Advance();
      else if (!IsPunct("]")) Fail("expected ',' in array literal");
    }
    Advance();
  }

  void ParseObjectLiteral() {
    Advance();
    while (!IsPunct("}")) {
      if (AtEnd()) Fail("unterminated object literal");
      if (IsPunct("...")) {
        Advance();
        ParseAssignment(false);
      } else {
        const uint32_t start = Cur().span.start;
        bool is_async = false, generator = false, accessor = false;
        if (IsIdent("async") && ModifierApplies() && !NewlineBefore(1)) {
          is_async = true;
          Advance();
        }
        if (IsPunct("*")) {
          generator = true;
          Advance();
        }
        if ((IsIdent("get") || IsIdent("set")) && ModifierApplies()) {
          accessor = true;
          Advance();
        }
        const Token key = Cur();
        const bool computed = IsPunct("[");
        ParsePropertyKey();
        if (IsPunct("(")) {
          uint32_t f = Open(NodeKind::kFunctionExpr, start, kFlagMethod);
          ParseFunctionRest(is_async, generator);
          Close(f, prev_end_);
        } else if (IsPunct(":") && !is_async && !generator && !accessor) {
          Advance();
          ParseAssignment(false);
        } else {
          if (computed || key.kind != TokenKind::kIdentifier || is_async ||
              generator || accessor)
            Fail("malformed object literal property");
          Leaf(NodeKind::kIdentifierRef, key.span, kFlagShorthand, key.text);
          if (IsPunct("=")) {  // cover grammar for destructuring defaults
            Advance();
            ParseAssignment(false);
          }
        }
      }
      if (IsPunct(",")) Advance();
      else if (!IsPunct("}")) Fail("expected ',' in object literal");
    }
    Advance();
  }

  std::string_view src_;
  FileId file_;
  std::vector<const Token*> toks_;
  std::vector<bool> newline_before_;
  Token eof_{TokenKind::kPunctuator, {}, {}};
  size_t p_ = 0;
  uint32_t prev_end_ = 0;
  std::vector<AstNode>* nodes_ = nullptr;
  std::vector<uint32_t> open_;
  std::vector<uint32_t> last_child_;
  bool in_async_ = false;
  bool in_generator_ = false;
  int delete_depth_ = 0;
  bool is_module_ = false;
  FileSummary summary_;
  std::vector<std::string> dollar_names_;
};

}  // namespace

ParseResult Parse(std::span<const Token> tokens, std::string_view source,
                  FileId file) {
  ParseResult result = Parser(tokens, source, file).Run();
  FillScopeSummary(result.ast, &result.summary);
  return result;
}

ParseResult ParseSource(std::string_view source, FileId file) {
  std::vector<Token> tokens = Tokenize(source, file);
  return Parse(tokens, source, file);
}

}  // namespace scopeshield
