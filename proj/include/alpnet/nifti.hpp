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

#ifndef ALPNET_NIFTI_HPP_
#define ALPNET_NIFTI_HPP_

#include <string>

#include "alpnet/volume.hpp"

namespace alpnet {

/// Minimal NIfTI-1 reader for .nii and .nii.gz (single 3D frame, scalar
/// dtypes u8/i8/i16/u16/i32/u32/f32/f64; scl_slope/inter applied; axes
/// mapped x-fastest -> {slice=z, row=y, col=x}). When label_path is
/// non-empty its distinct nonzero rounded values become binary class grids.
Volume load_volume_nifti(const std::string& image_path,
                         const std::string& label_path = "");

}  // namespace alpnet

#endif  // ALPNET_NIFTI_HPP_
