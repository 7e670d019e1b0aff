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

#include "alpnet/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "alpnet/error.hpp"
#include "alpnet/kernels.hpp"

namespace alpnet {

namespace {

struct OrganPose {
  double cz, cy, cx;
  double rz, ry, rx;
  double phi;        // in-plane rotation
  double intensity;  // band center
};

}  // namespace

std::vector<Volume> make_phantom_dataset(int n_volumes, int n_slices, int size,
                                         int n_classes, Rng& rng) {
  if (n_classes < 2) throw ValidationError("phantom: n_classes must be >= 2");
  if (size < 32) throw ValidationError("phantom: size must be >= 32");
  if (n_volumes < 1 || n_slices < 8) {
    throw ValidationError("phantom: need >= 1 volume and >= 8 slices");
  }

  std::vector<Volume> out;
  out.reserve(static_cast<size_t>(n_volumes));
  const double half = size / 2.0;

  for (int v = 0; v < n_volumes; ++v) {
    Volume vol;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "phantom%02d", v);
    vol.id = buf;
    vol.modality = "synthetic";
    vol.intensities = Tensor({n_slices, size, size});

    // Background: per-slice smoothed noise around a per-volume base level.
    const double base = rng.uniform(0.15, 0.30);
    const double amp = rng.uniform(0.05, 0.09);
    for (int s = 0; s < n_slices; ++s) {
      Tensor noise({size, size});
      for (int64_t i = 0; i < noise.size(); ++i) noise[i] = rng.normal();
      Tensor smooth;
      kernels::gaussian_blur(noise, 6.0, smooth);
      double var = 0.0;
      for (int64_t i = 0; i < smooth.size(); ++i) var += smooth[i] * smooth[i];
      const double sd = std::sqrt(var / static_cast<double>(smooth.size()));
      for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
          const double tex = sd > 1e-12 ? smooth.at(y, x) / sd * amp : 0.0;
          vol.intensities.at(s, y, x) = std::clamp(base + tex, 0.02, 0.48);
        }
      }
    }

    // Organ poses around a ring; radii capped so organs cannot collide.
    std::vector<OrganPose> poses;
    const double ring = 0.25 * size + rng.uniform(-2.0, 2.0);
    const double sep_cap =
        0.8 * ring * std::sin(std::numbers::pi / std::max(2, n_classes));
    for (int j = 1; j <= n_classes; ++j) {
      OrganPose p;
      const double theta = 2.0 * std::numbers::pi * (j - 1) / n_classes +
                           rng.uniform(-0.2, 0.2);
      p.cy = half + ring * std::sin(theta) + rng.uniform(-1.5, 1.5);
      p.cx = half + ring * std::cos(theta) + rng.uniform(-1.5, 1.5);
      const double rmax = std::min(0.16 * size, sep_cap);
      const double rmin = std::min(0.10 * size, 0.8 * rmax);
      p.ry = rng.uniform(rmin, rmax);
      p.rx = rng.uniform(rmin, rmax);
      p.rz = rng.uniform(0.22, 0.33) * n_slices;
      p.cz = 0.5 * n_slices + rng.uniform(-0.1, 0.1) * n_slices;
      p.phi = rng.uniform(0.0, std::numbers::pi);
      const double band =
          0.55 + 0.35 * (j - 1) / std::max(1, n_classes - 1);
      p.intensity = band + rng.uniform(-0.02, 0.02);
      poses.push_back(p);
    }

    Tensor occupied({n_slices, size, size});
    for (int j = 1; j <= n_classes; ++j) {
      const OrganPose& p = poses[static_cast<size_t>(j - 1)];
      Tensor grid({n_slices, size, size});
      const double c = std::cos(p.phi), sn = std::sin(p.phi);
      for (int s = 0; s < n_slices; ++s) {
        const double dz = (s - p.cz) / p.rz;
        if (dz * dz > 1.0) continue;
        for (int y = 0; y < size; ++y) {
          for (int x = 0; x < size; ++x) {
            if (occupied.at(s, y, x) != 0.0) continue;  // first organ wins
            const double dy = y - p.cy, dx = x - p.cx;
            const double u = (c * dy + sn * dx) / p.ry;
            const double w = (-sn * dy + c * dx) / p.rx;
            if (dz * dz + u * u + w * w <= 1.0) {
              grid.at(s, y, x) = 1.0;
              occupied.at(s, y, x) = 1.0;
              vol.intensities.at(s, y, x) = std::clamp(
                  p.intensity + rng.uniform(-0.015, 0.015), 0.5, 0.98);
            }
          }
        }
      }
      vol.labels[j] = std::move(grid);
    }
    out.push_back(std::move(vol));
  }
  return out;
}

}  // namespace alpnet
