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

#include "alpnet/transforms.hpp"

#include <cmath>
#include <numbers>

#include "alpnet/error.hpp"

namespace alpnet {

void TransformConfig::validate() const {
  if (rotation_deg < 0 || shear_deg < 0 || translate_frac < 0 ||
      gamma_log_range < 0 || elastic_alpha < 0 || elastic_sigma < 0) {
    throw ValidationError("transforms: range bounds must be non-negative");
  }
  if (!(scale_min > 0.0) || scale_min > scale_max) {
    throw ValidationError("transforms: scale range must be positive and ordered");
  }
}

GeometricTransform make_affine_transform(double rotation_deg, double scale,
                                         double shear_deg, double translate_y,
                                         double translate_x, int height,
                                         int width) {
  const double th = rotation_deg * std::numbers::pi / 180.0;
  const double sh = std::tan(shear_deg * std::numbers::pi / 180.0);
  // Forward 2x2: rotation * shear * isotropic scale, in (x,y) coordinates.
  const double m00 = scale * std::cos(th);
  const double m01 = scale * (std::cos(th) * sh - std::sin(th));
  const double m10 = scale * std::sin(th);
  const double m11 = scale * (std::sin(th) * sh + std::cos(th));
  const double det = m00 * m11 - m01 * m10;
  if (std::fabs(det) < 1e-12) {
    throw ValidationError("make_affine_transform: singular transform");
  }
  const double i00 = m11 / det, i01 = -m01 / det;
  const double i10 = -m10 / det, i11 = m00 / det;

  const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
  // Sampling form: src = Minv * (dst - c - t) + c.
  GeometricTransform t;
  t.affine[0] = i00;
  t.affine[1] = i01;
  t.affine[2] = cx - i00 * (cx + translate_x) - i01 * (cy + translate_y);
  t.affine[3] = i10;
  t.affine[4] = i11;
  t.affine[5] = cy - i10 * (cx + translate_x) - i11 * (cy + translate_y);
  return t;
}

GeometricTransform sample_geometric(const TransformConfig& cfg, Rng& rng,
                                    int height, int width) {
  cfg.validate();
  if (!cfg.enable_geometric) return GeometricTransform{};

  const double rot = rng.uniform(-cfg.rotation_deg, cfg.rotation_deg);
  const double scale = rng.uniform(cfg.scale_min, cfg.scale_max);
  const double shear = rng.uniform(-cfg.shear_deg, cfg.shear_deg);
  const double ty = rng.uniform(-cfg.translate_frac, cfg.translate_frac) * height;
  const double tx = rng.uniform(-cfg.translate_frac, cfg.translate_frac) * width;
  GeometricTransform t =
      make_affine_transform(rot, scale, shear, ty, tx, height, width);

  if (cfg.elastic_alpha > 0.0) {
    Tensor noise_y({height, width}), noise_x({height, width});
    for (int64_t i = 0; i < noise_y.size(); ++i) noise_y[i] = rng.uniform(-1.0, 1.0);
    for (int64_t i = 0; i < noise_x.size(); ++i) noise_x[i] = rng.uniform(-1.0, 1.0);
    kernels::gaussian_blur(noise_y, cfg.elastic_sigma, t.disp_y);
    kernels::gaussian_blur(noise_x, cfg.elastic_sigma, t.disp_x);
    for (int64_t i = 0; i < t.disp_y.size(); ++i) t.disp_y[i] *= cfg.elastic_alpha;
    for (int64_t i = 0; i < t.disp_x.size(); ++i) t.disp_x[i] *= cfg.elastic_alpha;
  }
  return t;
}

IntensityTransform sample_intensity(const TransformConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!cfg.enable_intensity) return IntensityTransform{};
  return IntensityTransform{
      std::exp(rng.uniform(-cfg.gamma_log_range, cfg.gamma_log_range))};
}

Tensor warp(const Tensor& image, const GeometricTransform& t,
            kernels::Interp interp) {
  if (image.ndim() != 2) throw ValidationError("warp: expected {H,W}");
  if (!tensor_all_finite(image)) throw ValidationError("warp: non-finite image");
  const int h = image.dim(0), w = image.dim(1);
  const bool has_field = !t.disp_y.empty();
  if (has_field && (t.disp_y.dim(0) != h || t.disp_y.dim(1) != w ||
                    !t.disp_y.same_shape(t.disp_x))) {
    throw ValidationError("warp: displacement field shape mismatch");
  }
  if (!has_field && t.is_identity_affine()) return image;

  Tensor map_y({h, w}), map_x({h, w});
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double qx = c + (has_field ? t.disp_x.at(r, c) : 0.0);
      const double qy = r + (has_field ? t.disp_y.at(r, c) : 0.0);
      map_x.at(r, c) = t.affine[0] * qx + t.affine[1] * qy + t.affine[2];
      map_y.at(r, c) = t.affine[3] * qx + t.affine[4] * qy + t.affine[5];
    }
  }
  Tensor out;
  kernels::remap(image, map_y, map_x, interp, 0.0, out);
  return out;
}

Tensor apply_gamma(const Tensor& image, const IntensityTransform& t) {
  if (!(t.gamma > 0.0)) throw ValidationError("apply_gamma: gamma must be > 0");
  if (tensor_min(image) < 0.0 || tensor_max(image) > 1.0) {
    throw ValidationError("apply_gamma: image values must lie in [0,1]");
  }
  if (t.gamma == 1.0) return image;
  Tensor out(image.shape());
  for (int64_t i = 0; i < image.size(); ++i) out[i] = std::pow(image[i], t.gamma);
  return out;
}

}  // namespace alpnet
