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

#ifndef ALPNET_PSEUDOLABEL_HPP_
#define ALPNET_PSEUDOLABEL_HPP_

#include <string>
#include <vector>

#include "alpnet/superpixel.hpp"
#include "alpnet/volume.hpp"

namespace alpnet {

/// Superpixel candidate masks for one slice. A slice whose segmentation is
/// a single whole-image segment is degenerate: it keeps its one mask for
/// inspection but is excluded from episode sampling.
struct SlicePseudolabels {
  int slice_index = 0;
  bool degenerate = false;
  std::vector<Tensor> masks;
};

struct PseudolabelSet {
  std::string volume_id;
  int height = 0;
  int width = 0;
  SuperpixelConfig config;
  std::vector<SlicePseudolabels> slices;
};

/// Segments every slice of the volume. Deterministic; slices are processed
/// independently (internally parallelized).
PseudolabelSet build_pseudolabel_set(const Volume& volume,
                                     const SuperpixelConfig& config);

/// Hash of the inputs that determine a store's content (volume intensities
/// + superpixel config). Recorded in the manifest for idempotent rebuilds.
std::string pseudolabel_input_hash(const Volume& volume,
                                   const SuperpixelConfig& config);

// On-disk store: <root>/<volume_id>/manifest.json plus one
// slice_NNNN.json per slice holding RLE-coded masks.
void write_pseudolabel_store(const PseudolabelSet& set,
                             const std::string& root,
                             const std::string& input_hash);
PseudolabelSet read_pseudolabel_store(const std::string& root,
                                      const std::string& volume_id);
/// Input hash recorded in an existing manifest, or "" when absent.
std::string stored_input_hash(const std::string& root,
                              const std::string& volume_id);

}  // namespace alpnet

#endif  // ALPNET_PSEUDOLABEL_HPP_
