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

#include "alpnet/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alpnet/error.hpp"

namespace alpnet {

double tensor_min(const Tensor& t) {
  double m = std::numeric_limits<double>::infinity();
  for (int64_t i = 0; i < t.size(); ++i) m = std::min(m, t[i]);
  return m;
}

double tensor_max(const Tensor& t) {
  double m = -std::numeric_limits<double>::infinity();
  for (int64_t i = 0; i < t.size(); ++i) m = std::max(m, t[i]);
  return m;
}

double tensor_sum(const Tensor& t) {
  double s = 0.0;
  for (int64_t i = 0; i < t.size(); ++i) s += t[i];
  return s;
}

bool tensor_all_finite(const Tensor& t) {
  for (int64_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i])) return false;
  }
  return true;
}

bool tensor_is_binary(const Tensor& t) {
  for (int64_t i = 0; i < t.size(); ++i) {
    if (t[i] != 0.0 && t[i] != 1.0) return false;
  }
  return true;
}

double tensor_max_abs_diff(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) throw ValidationError("tensor_max_abs_diff: shape mismatch");
  double m = 0.0;
  for (int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace alpnet
