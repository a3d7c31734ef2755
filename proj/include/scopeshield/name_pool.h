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

#ifndef SCOPESHIELD_NAME_POOL_H_
#define SCOPESHIELD_NAME_POOL_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace scopeshield {

// i-th string of the sequence a..z, aa, ab, ..., zz, aaa, ...
std::string RawPoolName(uint64_t index);

// The candidate name sequence with reserved words, restricted names and any
// name rejected by `excluded` removed. Lengths are non-decreasing.
class NamePool {
 public:
  using Predicate = std::function<bool(std::string_view)>;

  NamePool() = default;
  explicit NamePool(Predicate excluded) : excluded_(std::move(excluded)) {}

  bool Allowed(std::string_view name) const;

  // Returns the first allowed name at raw position >= *cursor for which
  // `forbidden` is false, and advances *cursor past it.
  std::string Next(uint64_t* cursor,
                   const Predicate& forbidden = nullptr) const;

  // i-th allowed name (0-based).
  std::string At(uint64_t index) const;

 private:
  Predicate excluded_;
};

}  // namespace scopeshield

#endif  // SCOPESHIELD_NAME_POOL_H_
