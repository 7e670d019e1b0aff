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

#include "alpnet/episode.hpp"

#include <algorithm>

#include "alpnet/error.hpp"

namespace alpnet {

namespace {

Tensor complement(const Tensor& mask) {
  Tensor out(mask.shape());
  for (int64_t i = 0; i < mask.size(); ++i) out[i] = 1.0 - mask[i];
  return out;
}

Tensor replicate3(const Tensor& plane) {
  const int h = plane.dim(0), w = plane.dim(1);
  Tensor out({3, h, w});
  for (int c = 0; c < 3; ++c) {
    std::copy(plane.data(), plane.data() + plane.size(),
              out.data() + static_cast<size_t>(c) * h * w);
  }
  return out;
}

}  // namespace

std::optional<Episode> compose_ssl_episode(const SliceSample& slice,
                                           const SlicePseudolabels& pl,
                                           const TransformConfig& cfg,
                                           Rng& rng) {
  if (pl.degenerate || pl.masks.empty()) return std::nullopt;
  const int h = slice.image.dim(1), w = slice.image.dim(2);

  const int r = static_cast<int>(
      rng.uniform_int(0, static_cast<int64_t>(pl.masks.size()) - 1));
  const Tensor& fg = pl.masks[static_cast<size_t>(r)];

  GeometricTransform geo = sample_geometric(cfg, rng, h, w);
  IntensityTransform inten = sample_intensity(cfg, rng);

  // Channels are identical, so transform one plane and replicate.
  Tensor plane({h, w});
  std::copy(slice.image.data(), slice.image.data() + static_cast<size_t>(h) * w,
            plane.data());
  const Tensor query_plane =
      warp(apply_gamma(plane, inten), geo, kernels::Interp::kBilinear);
  Tensor target = warp(fg, geo, kernels::Interp::kNearest);
  if (tensor_sum(target) == 0.0) return std::nullopt;  // pushed out of frame

  Episode ep;
  ep.provenance = Provenance::kSsl;
  ep.n_ways = 1;
  ep.n_shots = 1;
  ep.superpixel_index = r;
  ep.geo = std::move(geo);
  ep.intensity = inten;
  ep.support.push_back({slice.image, fg, complement(fg)});
  ep.query.push_back({replicate3(query_plane), std::move(target)});
  return ep;
}

Episode compose_inference_episode(
    const std::vector<std::pair<Tensor, Tensor>>& support_slices,
    const std::vector<Tensor>& query_images, int class_id) {
  if (support_slices.empty()) {
    throw ValidationError("compose_inference_episode: no support slices");
  }
  bool any_fg = false;
  for (const auto& [image, mask] : support_slices) {
    (void)image;
    if (tensor_sum(mask) > 0.0) any_fg = true;
  }
  if (!any_fg) {
    throw ValidationError(
        "compose_inference_episode: all support masks are empty");
  }

  Episode ep;
  ep.provenance = Provenance::kLabeled;
  ep.n_ways = 1;
  ep.n_shots = static_cast<int>(support_slices.size());
  ep.class_id = class_id;
  for (const auto& [image, mask] : support_slices) {
    ep.support.push_back({image, mask, complement(mask)});
  }
  for (const Tensor& q : query_images) {
    ep.query.push_back({q, std::nullopt});
  }
  return ep;
}

}  // namespace alpnet
