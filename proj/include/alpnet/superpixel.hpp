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

#ifndef ALPNET_SUPERPIXEL_HPP_
#define ALPNET_SUPERPIXEL_HPP_

#include <vector>

#include "alpnet/tensor.hpp"

namespace alpnet {

/// Parameters of the graph-based segmentation used for pseudolabels.
struct SuperpixelConfig {
  double scale = 100.0;       // threshold-function constant; larger -> coarser
  double smooth_sigma = 0.8;  // pre-smoothing Gaussian std in pixels
  int min_size = 100;         // minimum segment area, enforced post-merge
  int connectivity = 4;       // 4 or 8

  void validate() const;
};

/// Hard partition of a slice into contiguous integer labels [0, n_segments).
/// Label ids are assigned in raster order of each segment's first pixel.
struct LabelMap {
  int height = 0;
  int width = 0;
  int n_segments = 0;
  std::vector<int> labels;  // row-major, height*width entries

  int at(int y, int x) const { return labels[static_cast<size_t>(y) * width + x]; }
};

/// Graph segmentation of one grayscale slice (values in [0,1]).
/// Grid-graph edges are weighted by |intensity difference| * 255 of the
/// smoothed image, sorted ascending with ties broken by lexicographic
/// pixel-pair order, and merged by union-find under the adaptive threshold
/// scale/|component|; a final pass merges any segment below min_size.
LabelMap segment_slice(const Tensor& image, const SuperpixelConfig& config);

/// One binary {H,W} mask per label id, ordered by label id.
std::vector<Tensor> labelmap_to_masks(const LabelMap& lm);

}  // namespace alpnet

#endif  // ALPNET_SUPERPIXEL_HPP_
