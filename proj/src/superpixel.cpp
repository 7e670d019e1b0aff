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

#include "alpnet/superpixel.hpp"

#include <algorithm>
#include <cmath>

#include "alpnet/error.hpp"
#include "alpnet/kernels.hpp"

namespace alpnet {

namespace {

struct Edge {
  int a, b;  // pixel indices, a < b by construction
  double w;
};

// Union-find with the adaptive merge threshold tau(C) = scale / |C|.
struct SegmentForest {
  std::vector<int> parent;
  std::vector<int> rank;
  std::vector<int> size;
  std::vector<double> threshold;

  SegmentForest(int n, double scale)
      : parent(static_cast<size_t>(n)),
        rank(static_cast<size_t>(n), 0),
        size(static_cast<size_t>(n), 1),
        threshold(static_cast<size_t>(n), scale) {
    for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  }

  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }

  int unite(int a, int b) {
    if (rank[static_cast<size_t>(a)] < rank[static_cast<size_t>(b)]) std::swap(a, b);
    parent[static_cast<size_t>(b)] = a;
    size[static_cast<size_t>(a)] += size[static_cast<size_t>(b)];
    if (rank[static_cast<size_t>(a)] == rank[static_cast<size_t>(b)]) rank[static_cast<size_t>(a)]++;
    return a;
  }
};

std::vector<Edge> build_edges(const Tensor& smoothed, int connectivity) {
  const int h = smoothed.dim(0), w = smoothed.dim(1);
  std::vector<Edge> edges;
  const size_t per_pixel = connectivity == 8 ? 4 : 2;
  edges.reserve(static_cast<size_t>(h) * w * per_pixel);
  auto weight = [&](int y0, int x0, int y1, int x1) {
    return std::fabs(smoothed.at(y0, x0) - smoothed.at(y1, x1)) * 255.0;
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      if (x + 1 < w) edges.push_back({p, p + 1, weight(y, x, y, x + 1)});
      if (y + 1 < h) edges.push_back({p, p + w, weight(y, x, y + 1, x)});
      if (connectivity == 8) {
        if (y + 1 < h && x + 1 < w) {
          edges.push_back({p, p + w + 1, weight(y, x, y + 1, x + 1)});
        }
        if (y + 1 < h && x > 0) {
          edges.push_back({p, p + w - 1, weight(y, x, y + 1, x - 1)});
        }
      }
    }
  }
  return edges;
}

}  // namespace

void SuperpixelConfig::validate() const {
  if (!(scale > 0.0)) throw ValidationError("superpixel: scale must be > 0");
  if (min_size < 1) throw ValidationError("superpixel: min_size must be >= 1");
  if (connectivity != 4 && connectivity != 8) {
    throw ValidationError("superpixel: connectivity must be 4 or 8");
  }
  if (smooth_sigma < 0.0) {
    throw ValidationError("superpixel: smooth_sigma must be >= 0");
  }
}

LabelMap segment_slice(const Tensor& image, const SuperpixelConfig& config) {
  config.validate();
  if (image.ndim() != 2 || image.dim(0) < 2 || image.dim(1) < 2) {
    throw ValidationError("segment_slice: image must be at least 2x2");
  }
  if (!tensor_all_finite(image)) {
    throw ValidationError("segment_slice: non-finite pixel values");
  }
  const int h = image.dim(0), w = image.dim(1);
  const int n = h * w;

  Tensor smoothed;
  kernels::gaussian_blur(image, config.smooth_sigma, smoothed);

  std::vector<Edge> edges = build_edges(smoothed, config.connectivity);
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    if (l.w != r.w) return l.w < r.w;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  });

  SegmentForest forest(n, config.scale);
  for (const Edge& e : edges) {
    const int ra = forest.find(e.a);
    const int rb = forest.find(e.b);
    if (ra == rb) continue;
    if (e.w <= forest.threshold[static_cast<size_t>(ra)] &&
        e.w <= forest.threshold[static_cast<size_t>(rb)]) {
      const int root = forest.unite(ra, rb);
      forest.threshold[static_cast<size_t>(root)] =
          e.w + config.scale / forest.size[static_cast<size_t>(root)];
    }
  }

  // Absorb undersized segments along the same edge order.
  for (const Edge& e : edges) {
    const int ra = forest.find(e.a);
    const int rb = forest.find(e.b);
    if (ra == rb) continue;
    if (forest.size[static_cast<size_t>(ra)] < config.min_size ||
        forest.size[static_cast<size_t>(rb)] < config.min_size) {
      forest.unite(ra, rb);
    }
  }

  LabelMap lm;
  lm.height = h;
  lm.width = w;
  lm.labels.assign(static_cast<size_t>(n), -1);
  std::vector<int> root_label(static_cast<size_t>(n), -1);
  int next = 0;
  for (int p = 0; p < n; ++p) {
    const int r = forest.find(p);
    if (root_label[static_cast<size_t>(r)] < 0) root_label[static_cast<size_t>(r)] = next++;
    lm.labels[static_cast<size_t>(p)] = root_label[static_cast<size_t>(r)];
  }
  lm.n_segments = next;
  return lm;
}

std::vector<Tensor> labelmap_to_masks(const LabelMap& lm) {
  std::vector<Tensor> masks;
  masks.reserve(static_cast<size_t>(lm.n_segments));
  for (int i = 0; i < lm.n_segments; ++i) {
    masks.emplace_back(std::vector<int>{lm.height, lm.width});
  }
  for (int y = 0; y < lm.height; ++y) {
    for (int x = 0; x < lm.width; ++x) {
      masks[static_cast<size_t>(lm.at(y, x))].at(y, x) = 1.0;
    }
  }
  return masks;
}

}  // namespace alpnet
