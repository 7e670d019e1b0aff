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

#ifndef ALPNET_EPISODE_HPP_
#define ALPNET_EPISODE_HPP_

#include <optional>
#include <vector>

#include "alpnet/pseudolabel.hpp"
#include "alpnet/transforms.hpp"
#include "alpnet/volume.hpp"

namespace alpnet {

enum class Provenance { kSsl, kLabeled };

struct SupportEntry {
  Tensor image;  // {3,H,W}
  Tensor fg;     // binary {H,W}
  Tensor bg;     // complement of fg
};

struct QueryEntry {
  Tensor image;                    // {3,H,W}
  std::optional<Tensor> target_fg;  // present for SSL episodes
};

/// One 1-way K-shot support/query task. SSL episodes keep the transform
/// they were built with so tests can re-apply it.
struct Episode {
  std::vector<SupportEntry> support;
  std::vector<QueryEntry> query;
  int n_ways = 1;
  int n_shots = 1;
  Provenance provenance = Provenance::kSsl;
  int class_id = 1;

  // SSL bookkeeping
  int superpixel_index = -1;
  GeometricTransform geo;
  IntensityTransform intensity;
};

/// Builds one SSL episode: support = (slice, chosen superpixel); query =
/// gamma-then-warp of the slice with the warped superpixel as target.
/// Returns nullopt as the skip-slice signal: no usable candidates
/// (degenerate slice) or the warped target left the frame.
std::optional<Episode> compose_ssl_episode(const SliceSample& slice,
                                           const SlicePseudolabels& pl,
                                           const TransformConfig& cfg,
                                           Rng& rng);

/// Labeled 1-way K-shot inference episode.
Episode compose_inference_episode(
    const std::vector<std::pair<Tensor, Tensor>>& support_slices,
    const std::vector<Tensor>& query_images, int class_id);

}  // namespace alpnet

#endif  // ALPNET_EPISODE_HPP_
