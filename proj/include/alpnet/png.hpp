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

#ifndef ALPNET_PNG_HPP_
#define ALPNET_PNG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "alpnet/tensor.hpp"

namespace alpnet {

/// Writes an 8-bit RGB PNG (no filtering, zlib-deflated rows).
void write_png_rgb(const std::string& path, const std::vector<uint8_t>& rgb,
                   int width, int height);

/// Grayscale slice with the prediction contour burned in red (and the
/// ground-truth contour in green when provided).
void write_overlay_png(const std::string& path, const Tensor& slice,
                       const Tensor& pred_mask, const Tensor* gt_mask = nullptr);

}  // namespace alpnet

#endif  // ALPNET_PNG_HPP_
