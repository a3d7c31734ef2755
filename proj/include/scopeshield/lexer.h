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

#ifndef SCOPESHIELD_LEXER_H_
#define SCOPESHIELD_LEXER_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace scopeshield {

using FileId = uint32_t;

// Half-open byte range [start, end) into a file.
struct Span {
  uint32_t start = 0;
  uint32_t end = 0;

  uint32_t size() const { return end - start; }
  bool Contains(const Span& other) const {
    return start <= other.start && other.end <= end;
  }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

enum class TokenKind : uint8_t {
  kIdentifier,
  kKeyword,
  kStringLiteral,
  kNumericLiteral,
  // One piece of a template literal: the whole literal when it has no
  // substitutions, otherwise the head (`...${), middles (}...${) and tail
  // (}...`). Substitution expressions are lexed as ordinary tokens.
  kTemplateLiteral,
  kPunctuator,
  kRegexLiteral,
  kComment,
  kWhitespace,
};

const char* TokenKindName(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string_view text;  // exact slice of the source
  Span span;

  bool IsTrivia() const {
    return kind == TokenKind::kComment || kind == TokenKind::kWhitespace;
  }
  bool Is(TokenKind k, std::string_view t) const {
    return kind == k && text == t;
  }
  bool IsPunct(std::string_view t) const {
    return Is(TokenKind::kPunctuator, t);
  }
  bool IsKeyword(std::string_view t) const {
    return Is(TokenKind::kKeyword, t);
  }
};

enum class LexErrorKind {
  kUnterminatedString,
  kUnterminatedTemplate,
  kUnterminatedComment,
  kUnterminatedRegex,
  kInvalidCharacter,
};

const char* LexErrorKindName(LexErrorKind kind);

class LexError : public std::runtime_error {
 public:
  LexError(LexErrorKind kind, FileId file, uint32_t offset);

  LexErrorKind kind() const { return kind_; }
  FileId file() const { return file_; }
  uint32_t offset() const { return offset_; }

 private:
  LexErrorKind kind_;
  FileId file_;
  uint32_t offset_;
};

// Lossless tokenization: concatenating the text of every returned token
// reproduces `source` byte for byte. Throws LexError.
std::vector<Token> Tokenize(std::string_view source, FileId file = 0);

// Reserved words that can never be used as binding names, plus the literal
// keywords true/false/null.
bool IsReservedWord(std::string_view word);

// Words that are reserved in strict mode or contextually; emitted names must
// also avoid these.
bool IsRestrictedName(std::string_view word);

inline bool IsIdentifierStart(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$' || c >= 0x80 || c == '\\';
}

inline bool IsIdentifierPart(unsigned char c) {
  return IsIdentifierStart(c) || (c >= '0' && c <= '9');
}

}  // namespace scopeshield

#endif  // SCOPESHIELD_LEXER_H_
