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

#include "scopeshield/emit.h"

#include <algorithm>

namespace scopeshield {

void SortPatches(std::vector<Patch>& patches) {
  std::stable_sort(patches.begin(), patches.end(),
                   [](const Patch& a, const Patch& b) {
                     if (a.span.start != b.span.start)
                       return a.span.start < b.span.start;
                     return a.span.end < b.span.end;
                   });
}

std::string Emit(std::string_view source, std::span<const Patch> patches) {
  size_t extra = 0;
  for (const Patch& p : patches) extra += p.replacement.size();
  std::string out;
  out.reserve(source.size() + extra);
  uint32_t cursor = 0;
  for (const Patch& p : patches) {
    if (p.span.start < cursor || p.span.end < p.span.start ||
        p.span.end > source.size())
      throw OverlappingPatches("patch [" + std::to_string(p.span.start) + "," +
                               std::to_string(p.span.end) +
                               ") overlaps or is out of range");
    out.append(source.substr(cursor, p.span.start - cursor));
    out.append(p.replacement);
    cursor = p.span.end;
  }
  out.append(source.substr(cursor));
  return out;
}

namespace {

bool HasLineBreak(std::string_view text) {
  return text.find_first_of("\n\r") != std::string_view::npos ||
         text.find("\xE2\x80\xA8") != std::string_view::npos ||
         text.find("\xE2\x80\xA9") != std::string_view::npos;
}

bool NewlineDroppable(const Token& prev, const Token& next) {
  if (prev.kind == TokenKind::kPunctuator &&
      (prev.text == ";" || prev.text == "{" || prev.text == "," ||
       prev.text == "(" || prev.text == "["))
    return true;
  return next.kind == TokenKind::kPunctuator &&
         (next.text == ";" || next.text == "}" || next.text == ")" ||
          next.text == "]" || next.text == ",");
}

bool NeedsSpace(const Token& prev, const Token& next) {
  const unsigned char last = prev.text.back();
  const unsigned char first = next.text.front();
  if (IsIdentifierPart(last) && (IsIdentifierPart(first) || first == '#'))
    return true;
  if ((last == '+' && first == '+') || (last == '-' && first == '-'))
    return true;
  if (last == '/' && (first == '/' || first == '*')) return true;
  if (prev.kind == TokenKind::kNumericLiteral && first == '.') return true;
  return false;
}

}  // namespace

std::string Minify(std::string_view source, std::span<const Token> tokens) {
  std::string out;
  out.reserve(source.size());
  const Token* prev = nullptr;
  bool pending_newline = false;
  for (const Token& t : tokens) {
    if (t.IsTrivia()) {
      if (prev == nullptr && t.kind == TokenKind::kComment &&
          t.text.starts_with("#!")) {
        out.append(t.text);
        out.push_back('\n');
        continue;
      }
      if (HasLineBreak(t.text)) pending_newline = true;
      continue;
    }
    if (prev != nullptr) {
      if (pending_newline && !NewlineDroppable(*prev, t))
        out.push_back('\n');
      else if (NeedsSpace(*prev, t))
        out.push_back(' ');
    }
    out.append(t.text);
    prev = &t;
    pending_newline = false;
  }
  return out;
}

std::string Minify(std::string_view source) {
  std::vector<Token> tokens = Tokenize(source);
  return Minify(source, tokens);
}

}  // namespace scopeshield
