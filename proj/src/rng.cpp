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

#include "alpnet/rng.hpp"

#include <cmath>
#include <sstream>

#include "alpnet/error.hpp"

namespace alpnet {

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  if (hi < lo) throw ValidationError("uniform_int: empty range");
  const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(engine_());  // full 64-bit range
  const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return lo + static_cast<int64_t>(x % span);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

Rng Rng::fork(uint64_t tag) {
  // splitmix64 finalizer on (fresh output ^ tag) decorrelates children.
  uint64_t z = engine_() ^ (tag * 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  z ^= z >> 31;
  return Rng(z);
}

std::string Rng::save_state() const {
  std::ostringstream os;
  os << engine_;
  os << " " << (have_spare_ ? 1 : 0);
  if (have_spare_) {
    os.precision(17);
    os << " " << spare_;
  }
  return os.str();
}

void Rng::load_state(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  int flag = 0;
  is >> flag;
  have_spare_ = flag != 0;
  spare_ = 0.0;
  if (have_spare_) is >> spare_;
  if (is.fail()) throw IoError("Rng::load_state: malformed state string");
}

}  // namespace alpnet
