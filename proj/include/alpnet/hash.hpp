// Copyright 2026 The alpnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ALPNET_HASH_HPP_
#define ALPNET_HASH_HPP_

#include <cstddef>
#include <cstdint>
#include <string>

namespace alpnet {

/// Incremental FNV-1a 64. Used for content hashes on artifacts (change
/// detection and config/artifact pairing, not cryptographic integrity).
class Fnv1a {
public:
  Fnv1a& update(const void* bytes, size_t n);
  Fnv1a& update(const std::string& s) { return update(s.data(), s.size()); }
  Fnv1a& update_u64(uint64_t v);
  Fnv1a& update_f64(double v);
  uint64_t value() const { return state_; }
  std::string hex() const;

private:
  uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string fnv1a_hex(const std::string& s);

}  // namespace alpnet

#endif  // ALPNET_HASH_HPP_
