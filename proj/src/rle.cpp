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

#include "alpnet/rle.hpp"

#include "alpnet/error.hpp"

namespace alpnet {

std::vector<int64_t> rle_encode(const Tensor& mask) {
  if (mask.ndim() != 2) throw ValidationError("rle_encode: expected {H,W}");
  if (!tensor_is_binary(mask)) {
    throw ValidationError("rle_encode: mask must be binary");
  }
  std::vector<int64_t> runs;
  double current = 0.0;
  int64_t len = 0;
  for (int64_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == current) {
      ++len;
    } else {
      runs.push_back(len);
      current = mask[i];
      len = 1;
    }
  }
  runs.push_back(len);
  return runs;
}

Tensor rle_decode(const std::vector<int64_t>& runs, int height, int width) {
  Tensor mask({height, width});
  const int64_t total = static_cast<int64_t>(height) * width;
  int64_t pos = 0;
  double value = 0.0;
  for (int64_t run : runs) {
    if (run < 0 || pos + run > total) {
      throw IoError("rle_decode: runs exceed mask size");
    }
    for (int64_t i = 0; i < run; ++i) mask[pos++] = value;
    value = value == 0.0 ? 1.0 : 0.0;
  }
  if (pos != total) throw IoError("rle_decode: runs do not cover mask");
  return mask;
}

}  // namespace alpnet
