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

#include <doctest.h>

#include <cmath>
#include <set>

#include "alpnet/error.hpp"
#include "alpnet/rng.hpp"
#include "alpnet/superpixel.hpp"
#include "fh_reference.hpp"

using namespace alpnet;

namespace {

SuperpixelConfig plain(double scale, int min_size, int connectivity = 4) {
  SuperpixelConfig c;
  c.scale = scale;
  c.smooth_sigma = 0.0;
  c.min_size = min_size;
  c.connectivity = connectivity;
  return c;
}

Tensor half_split_4x4() {
  Tensor img({4, 4});
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) img.at(y, x) = x < 2 ? 0.0 : 1.0;
  }
  return img;
}

void check_partition(const LabelMap& lm) {
  std::set<int> seen;
  for (int v : lm.labels) {
    CHECK(v >= 0);
    CHECK(v < lm.n_segments);
    seen.insert(v);
  }
  CHECK(static_cast<int>(seen.size()) == lm.n_segments);
}

}  // namespace

TEST_CASE("constant image collapses to a single segment") {
  const Tensor img = Tensor::full({4, 4}, 0.42);
  for (double scale : {0.01, 1.0, 500.0}) {
    const LabelMap lm = segment_slice(img, plain(scale, 1));
    CHECK(lm.n_segments == 1);
    CHECK(lm.labels[0] == 0);
  }
}

TEST_CASE("half/half image at small scale yields the two halves") {
  const Tensor img = half_split_4x4();
  const LabelMap lm = segment_slice(img, plain(0.1, 1));
  REQUIRE(lm.n_segments == 2);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      CHECK(lm.at(y, x) == (x < 2 ? 0 : 1));
    }
  }
}

TEST_CASE("min_size forces the two halves to merge") {
  const Tensor img = half_split_4x4();
  const LabelMap lm = segment_slice(img, plain(0.1, 16));
  CHECK(lm.n_segments == 1);
}

TEST_CASE("invalid inputs are rejected") {
  Tensor bad({4, 4});
  bad.at(1, 1) = std::nan("");
  CHECK_THROWS_AS(segment_slice(bad, plain(1.0, 1)), ValidationError);
  CHECK_THROWS_AS(segment_slice(Tensor({1, 5}), plain(1.0, 1)), ValidationError);
  CHECK_THROWS_AS(segment_slice(Tensor({4, 4}), plain(-1.0, 1)), ValidationError);
  CHECK_THROWS_AS(segment_slice(Tensor({4, 4}), plain(1.0, 0)), ValidationError);
  SuperpixelConfig c = plain(1.0, 1);
  c.connectivity = 6;
  CHECK_THROWS_AS(segment_slice(Tensor({4, 4}), c), ValidationError);
}

TEST_CASE("label ids are contiguous and assigned in raster order") {
  Rng rng(31);
  Tensor img({8, 8});
  for (int64_t i = 0; i < img.size(); ++i) img[i] = rng.uniform01();
  const LabelMap lm = segment_slice(img, plain(30.0, 2));
  check_partition(lm);
  CHECK(lm.labels[0] == 0);
  int max_seen = -1;
  for (int v : lm.labels) {
    CHECK(v <= max_seen + 1);  // first occurrences appear in increasing order
    max_seen = std::max(max_seen, v);
  }
  CHECK(max_seen + 1 == lm.n_segments);
}

TEST_CASE("size floor holds once min_size is enforced") {
  Rng rng(32);
  Tensor img({8, 8});
  for (int64_t i = 0; i < img.size(); ++i) img[i] = rng.uniform01();
  const LabelMap lm = segment_slice(img, plain(20.0, 5));
  std::vector<int> areas(static_cast<size_t>(lm.n_segments), 0);
  for (int v : lm.labels) areas[static_cast<size_t>(v)]++;
  for (int a : areas) CHECK(a >= 5);
}

TEST_CASE("increasing min_size never increases the segment count") {
  Rng rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    Tensor img({10, 10});
    for (int64_t i = 0; i < img.size(); ++i) img[i] = rng.uniform01();
    int prev = 1 << 30;
    for (int ms : {1, 3, 9, 25, 100}) {
      const LabelMap lm = segment_slice(img, plain(40.0, ms));
      CHECK(lm.n_segments <= prev);
      prev = lm.n_segments;
    }
  }
}

TEST_CASE("deterministic: identical inputs give identical label maps") {
  Rng rng(34);
  Tensor img({16, 16});
  for (int64_t i = 0; i < img.size(); ++i) img[i] = rng.uniform01();
  SuperpixelConfig c;
  c.scale = 60.0;
  c.smooth_sigma = 0.8;
  c.min_size = 4;
  const LabelMap a = segment_slice(img, c);
  const LabelMap b = segment_slice(img, c);
  CHECK(a.labels == b.labels);
  CHECK(a.n_segments == b.n_segments);
}

TEST_CASE("matches the exhaustive reference on all 2x2 three-level images") {
  const double levels[3] = {0.0, 0.5, 1.0};
  for (const auto& [scale, min_size] :
       {std::pair{10.0, 1}, std::pair{150.0, 1}, std::pair{50.0, 2}}) {
    for (int code = 0; code < 81; ++code) {
      int c = code;
      Tensor img({2, 2});
      for (int i = 0; i < 4; ++i) {
        img[i] = levels[c % 3];
        c /= 3;
      }
      const LabelMap lm = segment_slice(img, plain(scale, min_size));
      const auto got = testref::partition_of(lm);
      const auto want =
          testref::fh_reference_segment(img, scale, min_size, 4);
      CHECK(got == want);
    }
  }
}

TEST_CASE("matches the reference on random 5x5 images, both connectivities") {
  Rng rng(35);
  for (int conn : {4, 8}) {
    for (int trial = 0; trial < 50; ++trial) {
      Tensor img({5, 5});
      for (int64_t i = 0; i < img.size(); ++i) {
        img[i] = 0.5 * rng.uniform_int(0, 2);
      }
      const double scale = rng.uniform(5.0, 200.0);
      const int min_size = static_cast<int>(rng.uniform_int(1, 4));
      const LabelMap lm = segment_slice(img, plain(scale, min_size, conn));
      check_partition(lm);
      const auto got = testref::partition_of(lm);
      const auto want =
          testref::fh_reference_segment(img, scale, min_size, conn);
      CHECK(got == want);
    }
  }
}

TEST_CASE("labelmap_to_masks produces a disjoint cover ordered by label") {
  Rng rng(36);
  Tensor img({8, 8});
  for (int64_t i = 0; i < img.size(); ++i) img[i] = rng.uniform01();
  const LabelMap lm = segment_slice(img, plain(30.0, 2));
  const auto masks = labelmap_to_masks(lm);
  REQUIRE(static_cast<int>(masks.size()) == lm.n_segments);
  double area = 0.0;
  for (const Tensor& m : masks) {
    CHECK(tensor_is_binary(m));
    area += tensor_sum(m);
  }
  CHECK(area == 64.0);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      CHECK(masks[static_cast<size_t>(lm.at(y, x))].at(y, x) == 1.0);
    }
  }

  const LabelMap single = segment_slice(Tensor::full({4, 4}, 0.3), plain(10, 1));
  const auto one = labelmap_to_masks(single);
  REQUIRE(one.size() == 1);
  CHECK(tensor_sum(one[0]) == 16.0);
}
