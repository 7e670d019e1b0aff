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

#ifndef ALPNET_TRANSFORMS_HPP_
#define ALPNET_TRANSFORMS_HPP_

#include <array>

#include "alpnet/kernels.hpp"
#include "alpnet/rng.hpp"
#include "alpnet/tensor.hpp"

namespace alpnet {

/// Sampling ranges for the support->query augmentation. Symmetric ranges
/// take one bound (r means U(-r, r)); scale is an explicit interval.
struct TransformConfig {
  double rotation_deg = 30.0;
  double scale_min = 0.8;
  double scale_max = 1.2;
  double shear_deg = 10.0;
  double translate_frac = 0.05;
  double elastic_alpha = 20.0;  // displacement magnitude bound, pixels
  double elastic_sigma = 20.0;  // field smoothness, pixels
  double gamma_log_range = 0.6931471805599453;  // ln 2
  bool enable_geometric = true;
  bool enable_intensity = true;

  void validate() const;
};

/// Affine followed by elastic displacement, stored in sampling form:
/// the output pixel p reads the source at affine(p + displacement(p)).
/// The smoothed-noise field lies in (-1,1) before scaling, so displacement
/// magnitudes are bounded by elastic_alpha per axis.
struct GeometricTransform {
  // Row-major sampling matrix mapping output (x,y) to source (x,y):
  // sx = m[0]*x + m[1]*y + m[2]; sy = m[3]*x + m[4]*y + m[5].
  std::array<double, 6> affine{1, 0, 0, 0, 1, 0};
  Tensor disp_y;  // {H,W}, may be empty (treated as zero)
  Tensor disp_x;

  bool is_identity_affine() const {
    return affine == std::array<double, 6>{1, 0, 0, 0, 1, 0};
  }
};

struct IntensityTransform {
  double gamma = 1.0;
};

/// Affine sampling matrix for rotation/scale/shear about the image center
/// plus translation, already inverted for gather-style warping.
GeometricTransform make_affine_transform(double rotation_deg, double scale,
                                         double shear_deg, double translate_y,
                                         double translate_x, int height,
                                         int width);

/// Draws transform parameters uniformly from the configured ranges and an
/// elastic field from Gaussian-smoothed white noise. Identity when
/// enable_geometric is false.
GeometricTransform sample_geometric(const TransformConfig& cfg, Rng& rng,
                                    int height, int width);

/// gamma = exp(U(-gamma_log_range, gamma_log_range)); 1 when disabled.
IntensityTransform sample_intensity(const TransformConfig& cfg, Rng& rng);

/// Warps one {H,W} plane. The same transform instance applied to an image
/// and its mask samples identical source locations. Out-of-bounds reads 0.
Tensor warp(const Tensor& image, const GeometricTransform& t,
            kernels::Interp interp);

/// out = image^gamma elementwise; input must lie in [0,1].
Tensor apply_gamma(const Tensor& image, const IntensityTransform& t);

}  // namespace alpnet

#endif  // ALPNET_TRANSFORMS_HPP_
