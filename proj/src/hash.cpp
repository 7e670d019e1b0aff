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

#include "alpnet/hash.hpp"

#include <cstring>

namespace alpnet {

Fnv1a& Fnv1a::update(const void* bytes, size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (size_t i = 0; i < n; ++i) {
    state_ ^= p[i];
    state_ *= 0x100000001b3ull;
  }
  return *this;
}

Fnv1a& Fnv1a::update_u64(uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  return update(buf, 8);
}

Fnv1a& Fnv1a::update_f64(double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  return update_u64(bits);
}

std::string Fnv1a::hex() const {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) {
    out[15 - i] = digits[(state_ >> (4 * i)) & 0xF];
  }
  return out;
}

std::string fnv1a_hex(const std::string& s) { return Fnv1a().update(s).hex(); }

}  // namespace alpnet
