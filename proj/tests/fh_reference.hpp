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

// Test-only reference for the graph segmentation: no union-find tricks,
// components are flat id arrays rewritten on every merge, the internal
// difference is tracked explicitly as the max merged edge weight. Kept
// deliberately independent of the production implementation.

#ifndef ALPNET_TESTS_FH_REFERENCE_HPP_
#define ALPNET_TESTS_FH_REFERENCE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "alpnet/superpixel.hpp"
#include "alpnet/tensor.hpp"

namespace alpnet::testref {

struct RefEdge {
  int a, b;
  double w;
};

/// Canonical partition: one sorted pixel list per segment, segments ordered
/// by their smallest pixel.
using Partition = std::vector<std::vector<int>>;

inline Partition fh_reference_segment(const Tensor& img, double scale,
                                      int min_size, int connectivity = 4) {
  const int h = img.dim(0), w = img.dim(1), n = h * w;
  auto weight = [&](int pa, int pb) {
    return std::fabs(img[pa] - img[pb]) * 255.0;
  };

  // Lexicographic (a,b) construction order; stable sort keeps it on ties.
  std::vector<RefEdge> edges;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int p = y * w + x;
      if (x + 1 < w) edges.push_back({p, p + 1, weight(p, p + 1)});
      if (connectivity == 8 && y + 1 < h && x > 0) {
        edges.push_back({p, p + w - 1, weight(p, p + w - 1)});
      }
      if (y + 1 < h) edges.push_back({p, p + w, weight(p, p + w)});
      if (connectivity == 8 && y + 1 < h && x + 1 < w) {
        edges.push_back({p, p + w + 1, weight(p, p + w + 1)});
      }
    }
  }
  std::stable_sort(edges.begin(), edges.end(),
                   [](const RefEdge& l, const RefEdge& r) { return l.w < r.w; });

  std::vector<int> comp(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) comp[static_cast<size_t>(i)] = i;
  std::vector<double> internal(static_cast<size_t>(n), 0.0);
  std::vector<int> size(static_cast<size_t>(n), 1);

  auto merge = [&](int ca, int cb, double ew) {
    for (int i = 0; i < n; ++i) {
      if (comp[static_cast<size_t>(i)] == cb) comp[static_cast<size_t>(i)] = ca;
    }
    size[static_cast<size_t>(ca)] += size[static_cast<size_t>(cb)];
    internal[static_cast<size_t>(ca)] = std::max(
        {internal[static_cast<size_t>(ca)], internal[static_cast<size_t>(cb)], ew});
  };

  for (const RefEdge& e : edges) {
    const int ca = comp[static_cast<size_t>(e.a)];
    const int cb = comp[static_cast<size_t>(e.b)];
    if (ca == cb) continue;
    const double ta = internal[static_cast<size_t>(ca)] + scale / size[static_cast<size_t>(ca)];
    const double tb = internal[static_cast<size_t>(cb)] + scale / size[static_cast<size_t>(cb)];
    if (e.w <= ta && e.w <= tb) merge(ca, cb, e.w);
  }
  for (const RefEdge& e : edges) {
    const int ca = comp[static_cast<size_t>(e.a)];
    const int cb = comp[static_cast<size_t>(e.b)];
    if (ca == cb) continue;
    if (size[static_cast<size_t>(ca)] < min_size ||
        size[static_cast<size_t>(cb)] < min_size) {
      merge(ca, cb, e.w);
    }
  }

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[comp[static_cast<size_t>(i)]].push_back(i);
  Partition parts;
  for (auto& [cid, pixels] : groups) {
    (void)cid;
    parts.push_back(std::move(pixels));
  }
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return parts;
}

inline Partition partition_of(const LabelMap& lm) {
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < lm.height * lm.width; ++i) {
    groups[lm.labels[static_cast<size_t>(i)]].push_back(i);
  }
  Partition parts;
  for (auto& [cid, pixels] : groups) {
    (void)cid;
    parts.push_back(std::move(pixels));
  }
  std::sort(parts.begin(), parts.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return parts;
}

}  // namespace alpnet::testref

#endif  // ALPNET_TESTS_FH_REFERENCE_HPP_
