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

#ifndef SCOPESHIELD_PARSER_H_
#define SCOPESHIELD_PARSER_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scopeshield/ast.h"
#include "scopeshield/lexer.h"

namespace scopeshield {

struct ImportEntry {
  std::string source;
  // Names requested from the exporter: "default" for default imports and
  // "*" for namespace imports.
  std::vector<std::string> names;

  friend bool operator==(const ImportEntry&, const ImportEntry&) = default;
};

struct ReExport {
  std::string source;
  bool star = false;
  // (name in source module, exported name); empty when `star`.
  std::vector<std::pair<std::string, std::string>> names;
};

// Per-file digest consumed by the cross-file analysis.
struct FileSummary {
  FileId file = 0;
  std::string path;
  // True when the file contains import or export declarations; its top-level
  // scope is then private to the file. Otherwise top-level declarations live
  // in the shared global scope.
  bool is_module = false;
  // Declarations of the file's top-level scope, in textual order.
  std::vector<std::string> declared_globals;
  // Names that resolve to no declaration in the file, sorted.
  std::vector<std::string> free_names;
  std::vector<ImportEntry> imports;
  // Names visible to importers of this file (including "default").
  std::vector<std::string> exports;
  std::vector<ReExport> reexports;
  // eval calls, `with` statements and Function-constructor calls.
  std::vector<Span> dynamic_sites;
  // Identifiers spelled with a leading '$'; generated helper names avoid
  // them.
  std::vector<std::string> dollar_names;
  uint64_t size_bytes = 0;
  std::vector<std::string> warnings;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(FileId file, uint32_t offset, const std::string& message);

  FileId file() const { return file_; }
  uint32_t offset() const { return offset_; }

 private:
  FileId file_;
  uint32_t offset_;
};

struct ParseResult {
  Ast ast;
  FileSummary summary;
};

// Parses a token stream produced by Tokenize over `source`. The AST refers
// into `source`, which must outlive it. Throws ParseError.
ParseResult Parse(std::span<const Token> tokens, std::string_view source,
                  FileId file = 0);

// Convenience: Tokenize + Parse.
ParseResult ParseSource(std::string_view source, FileId file = 0);

}  // namespace scopeshield

#endif  // SCOPESHIELD_PARSER_H_
