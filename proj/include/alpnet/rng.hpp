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

#ifndef ALPNET_RNG_HPP_
#define ALPNET_RNG_HPP_

#include <cstdint>
#include <random>
#include <string>

namespace alpnet {

/// Seeded random stream. Distributions are implemented on top of the raw
/// mt19937_64 output so that sequences are identical across standard
/// libraries and can be checkpointed as text.
class Rng {
public:
  explicit Rng(uint64_t seed = 0) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi] inclusive, unbiased via rejection.
  int64_t uniform_int(int64_t lo, int64_t hi);

  /// Standard normal via Box-Muller (both values used, deterministic order).
  double normal();

  /// Derive an independent child stream; mixes the tag into fresh output.
  Rng fork(uint64_t tag);

  std::string save_state() const;
  void load_state(const std::string& state);

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace alpnet

#endif  // ALPNET_RNG_HPP_
