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


#include "scopeshield/name_pool.h"

#include "scopeshield/lexer.h"

namespace scopeshield {

std::string RawPoolName(uint64_t index) {
  // Bijective base-26.
  std::string out;
  uint64_t n = index + 1;
  while (n > 0) {
    --n;
    out.push_back(static_cast<char>('a' + n % 26));
    n /= 26;
  }
  return std::string(out.rbegin(), out.rend());
}

bool NamePool::Allowed(std::string_view name) const {
  if (IsReservedWord(name) || IsRestrictedName(name)) return false;
  return !(excluded_ && excluded_(name));
}

std::string NamePool::Next(uint64_t* cursor, const Predicate& forbidden) const {
  for (;; ++*cursor) {
    std::string name = RawPoolName(*cursor);
    if (!Allowed(name)) continue;
    if (forbidden && forbidden(name)) continue;
    ++*cursor;
    return name;
  }
}

std::string NamePool::At(uint64_t index) const {
  uint64_t cursor = 0;
  std::string name;
  for (uint64_t i = 0; i <= index; ++i) name = Next(&cursor);
  return name;
}

}  // namespace scopeshield
