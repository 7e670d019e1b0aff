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

#ifndef ALPNET_VOLUME_HPP_
#define ALPNET_VOLUME_HPP_

#include <map>
#include <string>
#include <vector>

#include "alpnet/tensor.hpp"

namespace alpnet {

/// A 3D scalar image with optional per-class binary label volumes.
/// Intensities are normalized to [0,1] once preprocessing has run.
struct Volume {
  std::string id;
  Tensor intensities;           // {S,H,W}
  std::map<int, Tensor> labels;  // class id -> binary {S,H,W}
  std::string modality = "unknown";
  std::vector<double> spacing = {1.0, 1.0, 1.0};  // sz, sy, sx

  int n_slices() const { return intensities.ndim() == 3 ? intensities.dim(0) : 0; }
  int height() const { return intensities.ndim() == 3 ? intensities.dim(1) : 0; }
  int width() const { return intensities.ndim() == 3 ? intensities.dim(2) : 0; }

  /// 2D intensity plane of one slice.
  Tensor slice(int index) const;
  /// 2D label plane of one slice for a class (zeros if class absent).
  Tensor label_slice(int class_id, int index) const;
  /// True if any voxel of class_id is set in the given slice.
  bool slice_contains_class(int class_id, int index) const;
};

/// One network-ready 2D sample: channel-replicated image plus class masks.
struct SliceSample {
  std::string volume_id;
  int slice_index = 0;
  Tensor image;                  // {3,H,W}, identical planes
  std::map<int, Tensor> masks;   // class id -> binary {H,W}
};

SliceSample make_slice_sample(const Volume& vol, int slice_index);

struct PreprocessOptions {
  enum class Mode { kPercentile, kHuWindow };
  Mode mode = Mode::kPercentile;
  double pct_lo = 0.5;    // percentile clip bounds (kPercentile)
  double pct_hi = 99.5;
  double hu_min = -125.0;  // window bounds (kHuWindow)
  double hu_max = 275.0;
};

/// Normalizes intensities to [0,1] and resizes slices to target_size^2
/// (bilinear for intensities, nearest for labels). Idempotent in
/// percentile mode: nearest-rank clip bounds of an already-normalized
/// volume are exactly 0 and 1.
void preprocess_volume(Volume& vol, int target_size,
                       const PreprocessOptions& opts = {});

// Portable raw container: <base>.json header + <base>.raw float32
// slice-major payload (+ <base>.labels.raw uint8 class-id payload when
// labels are present).
void save_volume_raw(const Volume& vol, const std::string& base_path,
                     const std::map<std::string, int>& class_names = {});
Volume load_volume_raw(const std::string& json_path);

/// Loads a volume by extension (.json -> raw container, .nii/.nii.gz ->
/// NIfTI) and preprocesses it.
Volume load_and_preprocess(const std::string& path, int target_size = 256,
                           const PreprocessOptions& opts = {});

/// Scans a dataset directory for volumes. format: "raw" looks for *.json
/// headers, "nifti" for *_img.nii[.gz] (+ optional *_lbl.nii[.gz]).
/// Returned volumes are preprocessed and sorted by id.
std::vector<Volume> load_dataset(const std::string& root,
                                 const std::string& format, int target_size,
                                 const PreprocessOptions& opts = {});

}  // namespace alpnet

#endif  // ALPNET_VOLUME_HPP_
