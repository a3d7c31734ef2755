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


// Synthetic JavaScript sources: self-checking programs for equivalence runs
// and the independent-file corpus used by `bench`.

#ifndef SCOPESHIELD_CORPUS_H_
#define SCOPESHIELD_CORPUS_H_

#include <cstdint>
#include <string>

namespace scopeshield {

// A deterministic script of roughly `target_bytes` bytes wrapped in an
// immediately invoked function, so it declares no globals. It prints a
// line count and a checksum of everything it computed.
std::string GenerateProgram(uint64_t seed, uint64_t target_bytes);

struct CorpusStats {
  uint64_t files = 0;
  uint64_t bytes = 0;
};

// Writes independent programs named f00000.js, f00001.js, ... under `dir`
// until at least `total_bytes` bytes are written. Each file is a copy of
// one of `variants` template programs of about `file_bytes` bytes.
CorpusStats WriteScalingCorpus(const std::string& dir, uint64_t total_bytes,
                               uint64_t file_bytes = 64 * 1024,
                               uint32_t variants = 16);

}  // namespace scopeshield

#endif  // SCOPESHIELD_CORPUS_H_
