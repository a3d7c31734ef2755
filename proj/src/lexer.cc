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

#include "scopeshield/lexer.h"

#include <algorithm>
#include <array>
#include <string>

namespace scopeshield {

namespace {

constexpr std::array<std::string_view, 36> kReservedWords = {
    "break",    "case",       "catch",  "class",   "const",  "continue",
    "debugger", "default",    "delete", "do",      "else",   "enum",
    "export",   "extends",    "false",  "finally", "for",    "function",
    "if",       "import",     "in",     "instanceof", "new", "null",
    "return",   "super",      "switch", "this",    "throw",  "true",
    "try",      "typeof",     "var",    "void",    "while",  "with",
};

constexpr std::array<std::string_view, 17> kRestrictedNames = {
    "let",     "static",    "yield",     "await",   "implements",
    "interface", "package", "private",   "protected", "public",
    "arguments", "eval",    "undefined", "NaN",     "Infinity",
    "async",   "of",
};

// Longest first within each leading character is not required because we
// try lengths 4..1 in order.
constexpr std::array<std::string_view, 48> kPunctuators = {
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=",
    "\?\?=",  "=>",  "==",  "!=",  "<=",  ">=",  "&&",  "||",  "??",  "?.",
    "++",   "--",  "+=",  "-=",  "*=",  "/=",  "%=",  "&=",  "|=",  "^=",
    "**",   "<<",  ">>",  "{",   "}",   "(",   ")",   "[",   "]",   ";",
    ",",    "<",   ">",   "+",   "-",   "*",   "/",   "%",
};

constexpr std::string_view kSinglePunct = "&|^!~?:=.@";

bool IsDigit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view src, FileId file) : src_(src), file_(file) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    out.reserve(src_.size() / 3 + 4);
    if (src_.substr(0, 2) == "#!") {
      size_t end = src_.find('\n');
      if (end == std::string_view::npos) end = src_.size();
      Push(out, TokenKind::kComment, 0, end);
      pos_ = end;
    }
    while (pos_ < src_.size()) {
      const size_t start = pos_;
      const unsigned char c = src_[pos_];
      if (size_t ws = WhitespaceLength(pos_); ws > 0) {
        while (pos_ < src_.size()) {
          size_t n = WhitespaceLength(pos_);
          if (n == 0) break;
          pos_ += n;
        }
        Push(out, TokenKind::kWhitespace, start, pos_);
        continue;
      }
      if (c == '/' && Peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n' && src_[pos_] != '\r')
          ++pos_;
        Push(out, TokenKind::kComment, start, pos_);
        continue;
      }
      if (c == '/' && Peek(1) == '*') {
        size_t end = src_.find("*/", pos_ + 2);
        if (end == std::string_view::npos)
          throw LexError(LexErrorKind::kUnterminatedComment, file_, start);
        pos_ = end + 2;
        Push(out, TokenKind::kComment, start, pos_);
        continue;
      }
      if (c == '"' || c == '\'') {
        LexString(c);
        Push(out, TokenKind::kStringLiteral, start, pos_);
        continue;
      }
      if (c == '`') {
        ++pos_;
        LexTemplateRest(start);
        Push(out, TokenKind::kTemplateLiteral, start, pos_);
        continue;
      }
      if (c == '}' && !braces_.empty() && braces_.back()) {
        braces_.pop_back();
        ++pos_;
        LexTemplateRest(start);
        Push(out, TokenKind::kTemplateLiteral, start, pos_);
        continue;
      }
      if (IsDigit(c) || (c == '.' && IsDigit(Peek(1)))) {
        LexNumber();
        Push(out, TokenKind::kNumericLiteral, start, pos_);
        continue;
      }
      if (c == '#' && IsIdentifierStart(Peek(1))) {
        ++pos_;
        LexIdentifierChars();
        Push(out, TokenKind::kIdentifier, start, pos_);
        continue;
      }
      if (IsIdentifierStart(c)) {
        LexIdentifierChars();
        std::string_view word = src_.substr(start, pos_ - start);
        Push(out,
             IsReservedWord(word) ? TokenKind::kKeyword : TokenKind::kIdentifier,
             start, pos_);
        continue;
      }
      if (c == '/' && RegexAllowed()) {
        LexRegex(start);
        Push(out, TokenKind::kRegexLiteral, start, pos_);
        continue;
      }
      if (c == '{') {
        braces_.push_back(false);
      } else if (c == '}') {
        if (!braces_.empty()) braces_.pop_back();
      }
      size_t len = PunctuatorLength();
      if (len == 0) throw LexError(LexErrorKind::kInvalidCharacter, file_, start);
      pos_ += len;
      Push(out, TokenKind::kPunctuator, start, pos_);
    }
    return out;
  }

 private:
  unsigned char Peek(size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void Push(std::vector<Token>& out, TokenKind kind, size_t start, size_t end) {
    Token t{kind, src_.substr(start, end - start),
            Span{static_cast<uint32_t>(start), static_cast<uint32_t>(end)}};
    if (!t.IsTrivia()) last_significant_ = t;
    has_significant_ = has_significant_ || !t.IsTrivia();
    out.push_back(t);
  }

  size_t WhitespaceLength(size_t p) const {
    const unsigned char c = src_[p];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f')
      return 1;
    if (c == 0xC2 && p + 1 < src_.size() &&
        static_cast<unsigned char>(src_[p + 1]) == 0xA0)
      return 2;
    if (c == 0xEF && src_.substr(p, 3) == "\xEF\xBB\xBF") return 3;
    if (c == 0xE2 && (src_.substr(p, 3) == "\xE2\x80\xA8" ||
                      src_.substr(p, 3) == "\xE2\x80\xA9"))
      return 3;
    return 0;
  }

  void LexString(unsigned char quote) {
    const size_t start = pos_++;
    while (pos_ < src_.size()) {
      const unsigned char c = src_[pos_];
      if (c == quote) {
        ++pos_;
        return;
      }
      if (c == '\\') {
        pos_ += 2;
        if (pos_ <= src_.size() && src_[pos_ - 1] == '\r' && Peek(0) == '\n')
          ++pos_;
        continue;
      }
      if (c == '\n' || c == '\r') break;
      ++pos_;
    }
    throw LexError(LexErrorKind::kUnterminatedString, file_, start);
  }

  // Scans template characters after the opening backtick or closing brace.
  void LexTemplateRest(size_t start) {
    while (pos_ < src_.size()) {
      const unsigned char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '`') {
        ++pos_;
        return;
      }
      if (c == '$' && Peek(1) == '{') {
        pos_ += 2;
        braces_.push_back(true);
        return;
      }
      ++pos_;
    }
    throw LexError(LexErrorKind::kUnterminatedTemplate, file_, start);
  }

  void LexNumber() {
    auto digits = [&](bool hex) {
      while (pos_ < src_.size()) {
        const unsigned char c = src_[pos_];
        if (IsDigit(c) || c == '_' ||
            (hex && ((c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'))))
          ++pos_;
        else
          break;
      }
    };
    const unsigned char c = src_[pos_];
    const unsigned char n = Peek(1);
    if (c == '0' && (n == 'x' || n == 'X' || n == 'o' || n == 'O' ||
                     n == 'b' || n == 'B')) {
      pos_ += 2;
      digits(true);
    } else {
      digits(false);
      if (Peek(0) == '.') {
        ++pos_;
        digits(false);
      }
      if (Peek(0) == 'e' || Peek(0) == 'E') {
        ++pos_;
        if (Peek(0) == '+' || Peek(0) == '-') ++pos_;
        digits(false);
      }
    }
    if (Peek(0) == 'n') ++pos_;
    if (pos_ < src_.size() && IsIdentifierStart(src_[pos_]))
      throw LexError(LexErrorKind::kInvalidCharacter, file_, pos_);
  }

  void LexIdentifierChars() {
    while (pos_ < src_.size()) {
      const unsigned char c = src_[pos_];
      if (c >= 0x80 && WhitespaceLength(pos_) > 0) break;
      if (c == '\\') {
        // Unicode escape inside an identifier: \uXXXX or \u{...}.
        pos_ += 2;
        if (Peek(0) == '{') {
          while (pos_ < src_.size() && src_[pos_] != '}') ++pos_;
          ++pos_;
        } else {
          pos_ += 4;
        }
        pos_ = std::min(pos_, src_.size());
        continue;
      }
      if (!IsIdentifierPart(c)) break;
      ++pos_;
    }
  }

  bool RegexAllowed() const {
    if (!has_significant_) return true;
    const Token& t = last_significant_;
    switch (t.kind) {
      case TokenKind::kIdentifier:
      case TokenKind::kNumericLiteral:
      case TokenKind::kStringLiteral:
      case TokenKind::kRegexLiteral:
        return false;
      case TokenKind::kTemplateLiteral:
        // A head or middle piece ends with "${", so an expression follows.
        return t.text.ends_with("${");
      case TokenKind::kKeyword:
        return !(t.text == "this" || t.text == "super" || t.text == "true" ||
                 t.text == "false" || t.text == "null");
      case TokenKind::kPunctuator:
        return !(t.text == ")" || t.text == "]" || t.text == "}");
      default:
        return true;
    }
  }

  void LexRegex(size_t start) {
    ++pos_;
    bool in_class = false;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n' || src_[pos_] == '\r')
        throw LexError(LexErrorKind::kUnterminatedRegex, file_, start);
      const unsigned char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      ++pos_;
      if (c == '[') in_class = true;
      else if (c == ']') in_class = false;
      else if (c == '/' && !in_class) break;
    }
    while (pos_ < src_.size() && IsIdentifierPart(src_[pos_])) ++pos_;
  }

  size_t PunctuatorLength() const {
    std::string_view rest = src_.substr(pos_, 4);
    for (std::string_view p : kPunctuators) {
      if (rest.starts_with(p)) {
        // `?.` followed by a digit is a conditional followed by a number.
        if (p == "?." && IsDigit(Peek(2))) continue;
        return p.size();
      }
    }
    if (kSinglePunct.find(static_cast<char>(src_[pos_])) !=
        std::string_view::npos)
      return 1;
    return 0;
  }

  std::string_view src_;
  FileId file_;
  size_t pos_ = 0;
  // true entries mark a template substitution opened by "${".
  std::vector<bool> braces_;
  Token last_significant_{TokenKind::kWhitespace, {}, {}};
  bool has_significant_ = false;
};

}  // namespace

const char* TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kIdentifier: return "identifier";
    case TokenKind::kKeyword: return "keyword";
    case TokenKind::kStringLiteral: return "string-literal";
    case TokenKind::kNumericLiteral: return "numeric-literal";
    case TokenKind::kTemplateLiteral: return "template-literal";
    case TokenKind::kPunctuator: return "punctuator";
    case TokenKind::kRegexLiteral: return "regex-literal";
    case TokenKind::kComment: return "comment";
    case TokenKind::kWhitespace: return "whitespace";
  }
  return "?";
}

const char* LexErrorKindName(LexErrorKind kind) {
  switch (kind) {
    case LexErrorKind::kUnterminatedString: return "UnterminatedString";
    case LexErrorKind::kUnterminatedTemplate: return "UnterminatedTemplate";
    case LexErrorKind::kUnterminatedComment: return "UnterminatedComment";
    case LexErrorKind::kUnterminatedRegex: return "UnterminatedRegex";
    case LexErrorKind::kInvalidCharacter: return "InvalidCharacter";
  }
  return "?";
}

LexError::LexError(LexErrorKind kind, FileId file, uint32_t offset)
    : std::runtime_error(std::string(LexErrorKindName(kind)) + " in file " +
                         std::to_string(file) + " at offset " +
                         std::to_string(offset)),
      kind_(kind),
      file_(file),
      offset_(offset) {}

std::vector<Token> Tokenize(std::string_view source, FileId file) {
  return Lexer(source, file).Run();
}

bool IsReservedWord(std::string_view word) {
  return std::find(kReservedWords.begin(), kReservedWords.end(), word) !=
         kReservedWords.end();
}

bool IsRestrictedName(std::string_view word) {
  return IsReservedWord(word) ||
         std::find(kRestrictedNames.begin(), kRestrictedNames.end(), word) !=
             kRestrictedNames.end();
}

}  // namespace scopeshield
