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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "alpnet/error.hpp"
#include "alpnet/pseudolabel.hpp"
#include "alpnet/rle.hpp"
#include "alpnet/rng.hpp"

using namespace alpnet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Volume structured_volume(int slices, int size) {
  Volume v;
  v.id = "vol_test";
  v.intensities = Tensor({slices, size, size});
  for (int s = 0; s < slices; ++s) {
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        // quadrant pattern with per-slice shift gives a few clean segments
        const double base = (y < size / 2 ? 0.2 : 0.6) + (x < size / 2 ? 0.0 : 0.3);
        v.intensities.at(s, y, x) = base + 0.01 * ((s + y + x) % 3);
      }
    }
  }
  return v;
}

}  // namespace

TEST_CASE("rle encodes leading-zero convention and round-trips") {
  Tensor m({2, 3});
  m.at(0, 1) = 1.0;
  m.at(0, 2) = 1.0;
  m.at(1, 2) = 1.0;
  const auto runs = rle_encode(m);
  CHECK(runs == std::vector<int64_t>{1, 2, 2, 1});
  CHECK(rle_decode(runs, 2, 3) == m);

  const Tensor ones = Tensor::full({2, 2}, 1.0);
  CHECK(rle_encode(ones) == std::vector<int64_t>{0, 4});
  CHECK(rle_encode(Tensor({2, 2})) == std::vector<int64_t>{4});
}

TEST_CASE("rle round-trip holds on random masks") {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int h = 1 + static_cast<int>(rng.uniform_int(0, 12));
    const int w = 1 + static_cast<int>(rng.uniform_int(0, 12));
    Tensor m({h, w});
    for (int64_t i = 0; i < m.size(); ++i) m[i] = rng.uniform01() < 0.5 ? 1.0 : 0.0;
    const auto runs = rle_encode(m);
    int64_t total = 0;
    for (int64_t r : runs) total += r;
    CHECK(total == m.size());
    CHECK(rle_decode(runs, h, w) == m);
  }
}

TEST_CASE("rle rejects malformed input") {
  Tensor not_binary({2, 2});
  not_binary[0] = 0.25;
  CHECK_THROWS_AS(rle_encode(not_binary), ValidationError);
  CHECK_THROWS_AS(rle_decode({3}, 2, 2), IoError);
  CHECK_THROWS_AS(rle_decode({5}, 2, 2), IoError);
}

TEST_CASE("build_pseudolabel_set: one candidate list per slice") {
  const Volume v = structured_volume(3, 16);
  SuperpixelConfig cfg;
  cfg.scale = 30.0;
  cfg.smooth_sigma = 0.0;
  cfg.min_size = 4;
  const PseudolabelSet set = build_pseudolabel_set(v, cfg);
  REQUIRE(set.slices.size() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(set.slices[static_cast<size_t>(s)].slice_index == s);
    CHECK(!set.slices[static_cast<size_t>(s)].degenerate);
    CHECK(set.slices[static_cast<size_t>(s)].masks.size() >= 2);
  }
}

TEST_CASE("constant slice is degenerate: one whole-image mask, flagged") {
  Volume v;
  v.id = "flat";
  v.intensities = Tensor({1, 8, 8});
  v.intensities.fill(0.5);
  SuperpixelConfig cfg;
  cfg.scale = 30.0;
  cfg.min_size = 1;
  const PseudolabelSet set = build_pseudolabel_set(v, cfg);
  REQUIRE(set.slices.size() == 1);
  CHECK(set.slices[0].degenerate);
  REQUIRE(set.slices[0].masks.size() == 1);
  CHECK(tensor_sum(set.slices[0].masks[0]) == 64.0);

  Volume empty;
  empty.id = "empty";
  CHECK_THROWS_AS(build_pseudolabel_set(empty, cfg), ValidationError);
}

TEST_CASE("store round-trips and rebuilds are byte-identical") {
  const Volume v = structured_volume(4, 16);
  SuperpixelConfig cfg;
  cfg.scale = 30.0;
  cfg.smooth_sigma = 0.8;
  cfg.min_size = 4;

  const fs::path root_a = fs::temp_directory_path() / "alpnet_store_a";
  const fs::path root_b = fs::temp_directory_path() / "alpnet_store_b";
  fs::remove_all(root_a);
  fs::remove_all(root_b);

  const std::string hash = pseudolabel_input_hash(v, cfg);
  const PseudolabelSet set_a = build_pseudolabel_set(v, cfg);
  write_pseudolabel_store(set_a, root_a.string(), hash);
  const PseudolabelSet set_b = build_pseudolabel_set(v, cfg);
  write_pseudolabel_store(set_b, root_b.string(), hash);

  for (const auto& entry : fs::recursive_directory_iterator(root_a / v.id)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root_a);
    CHECK(slurp(entry.path()) == slurp(root_b / rel));
  }

  const PseudolabelSet loaded = read_pseudolabel_store(root_a.string(), v.id);
  REQUIRE(loaded.slices.size() == set_a.slices.size());
  CHECK(loaded.height == 16);
  CHECK(loaded.config.min_size == 4);
  for (size_t s = 0; s < loaded.slices.size(); ++s) {
    REQUIRE(loaded.slices[s].masks.size() == set_a.slices[s].masks.size());
    for (size_t m = 0; m < loaded.slices[s].masks.size(); ++m) {
      CHECK(loaded.slices[s].masks[m] == set_a.slices[s].masks[m]);
    }
  }

  CHECK(stored_input_hash(root_a.string(), v.id) == hash);
  CHECK(stored_input_hash(root_a.string(), "nope").empty());

  // config change invalidates the input hash
  SuperpixelConfig cfg2 = cfg;
  cfg2.min_size = 9;
  CHECK(pseudolabel_input_hash(v, cfg2) != hash);

  fs::remove_all(root_a);
  fs::remove_all(root_b);
}

TEST_CASE("store masks partition every slice") {
  const Volume v = structured_volume(2, 16);
  SuperpixelConfig cfg;
  cfg.scale = 30.0;
  cfg.min_size = 2;
  const PseudolabelSet set = build_pseudolabel_set(v, cfg);
  for (const auto& sp : set.slices) {
    Tensor cover({16, 16});
    for (const Tensor& m : sp.masks) {
      for (int64_t i = 0; i < m.size(); ++i) {
        if (m[i] != 0.0) {
          CHECK(cover[i] == 0.0);  // disjoint
          cover[i] = 1.0;
        }
      }
    }
    CHECK(tensor_sum(cover) == 256.0);  // full cover
  }
}
