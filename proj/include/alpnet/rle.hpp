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

#ifndef ALPNET_RLE_HPP_
#define ALPNET_RLE_HPP_

#include <cstdint>
#include <vector>

#include "alpnet/tensor.hpp"

namespace alpnet {

/// Row-major run-length encoding of a binary mask: alternating run lengths
/// starting with the zero run (first entry may be 0). Runs sum to H*W.
std::vector<int64_t> rle_encode(const Tensor& mask);
Tensor rle_decode(const std::vector<int64_t>& runs, int height, int width);

}  // namespace alpnet

#endif  // ALPNET_RLE_HPP_
