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
#include <vector>

#include "alpnet/alp.hpp"
#include "alpnet/encoder.hpp"
#include "alpnet/error.hpp"
#include "alpnet/rng.hpp"
#include "classifier_oracle.hpp"

using namespace alpnet;
using testref::oracle_pixel_probs;

namespace {

Tensor random_feat(int d, int h, int w, Rng& rng) {
  Tensor t({d, h, w});
  for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
  return t;
}

AlpConfig window(int lh, int lw, AlpConfig::Mode mode = AlpConfig::Mode::kAlpnet) {
  AlpConfig c;
  c.window_h = lh;
  c.window_w = lw;
  c.mode = mode;
  return c;
}

}  // namespace

TEST_CASE("encoder shape contract") {
  Rng rng(101);
  EncoderSpec desk;  // defaults: stride 4, depth 64
  CHECK(desk.total_stride() == 4);
  CHECK(desk.depth() == 64);
  ConvEncoder enc(desk);
  enc.init_params(rng);
  Tensor img({3, 64, 64});
  for (int64_t i = 0; i < img.size(); ++i) img[i] = rng.uniform01();
  const Tensor f = enc.forward(img);
  CHECK(f.dim(0) == 64);
  CHECK(f.dim(1) == 16);
  CHECK(f.dim(2) == 16);

  // paper-scale configuration: stride 8, depth 256 on 256x256 inputs
  EncoderSpec big;
  big.channels = {8, 16, 32, 256};
  big.strides = {2, 2, 2, 1};
  ConvEncoder enc_big(big);
  enc_big.init_params(rng);
  Tensor img_big({3, 256, 256});
  const Tensor fb = enc_big.forward(img_big);
  CHECK(fb.dim(0) == 256);
  CHECK(fb.dim(1) == 32);
  CHECK(fb.dim(2) == 32);

  // deterministic: same input twice gives identical features
  CHECK(enc.forward(img) == enc.forward(img));

  CHECK_THROWS_AS(enc.forward(Tensor({3, 30, 30})), ValidationError);
  CHECK_THROWS_AS(enc.forward(Tensor({1, 64, 64})), ValidationError);
}

TEST_CASE("local prototypes: constant features, count, class threshold") {
  Rng rng(102);
  const Tensor feat = Tensor::full({3, 4, 4}, 2.5);
  Tensor mask({4, 4});
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 4; ++x) mask.at(y, x) = 1.0;  // top half foreground
  }
  const auto protos = local_prototypes(feat, mask, window(2, 2), 1);
  REQUIRE(protos.size() == 4);  // ceil(4/2)*ceil(4/2)
  for (const Prototype& p : protos) {
    for (double v : p.v) CHECK(v == doctest::Approx(2.5));
  }
  // windows fully inside the foreground have pooled mask 1 >= 0.95
  CHECK(protos[0].class_id == 1);
  CHECK(protos[1].class_id == 1);
  CHECK(protos[2].class_id == kBackgroundClass);
  CHECK(protos[3].class_id == kBackgroundClass);

  // padded windows count missing cells as zeros
  const Tensor feat5 = random_feat(2, 5, 5, rng);
  const auto protos5 = local_prototypes(feat5, Tensor({5, 5}), window(2, 2), 1);
  CHECK(protos5.size() == 9);  // ceil(5/2)^2
  // the bottom-right window covers one real cell out of four
  const Prototype& corner = protos5.back();
  CHECK(corner.win_m == 2);
  CHECK(corner.win_n == 2);
  CHECK(corner.v[0] == doctest::Approx(feat5.at(0, 4, 4) / 4.0));
}

TEST_CASE("window class assignment sits exactly at the 0.95 threshold") {
  const Tensor feat = Tensor::full({1, 4, 4}, 1.0);
  // pooled window value: 15/16 < 0.95, 16/16 >= 0.95
  Tensor mask = Tensor::full({4, 4}, 1.0);
  auto protos = local_prototypes(feat, mask, window(4, 4), 1);
  REQUIRE(protos.size() == 1);
  CHECK(protos[0].class_id == 1);
  mask.at(3, 3) = 0.0;
  protos = local_prototypes(feat, mask, window(4, 4), 1);
  CHECK(protos[0].class_id == kBackgroundClass);
}

TEST_CASE("class prototype: masked average pooling") {
  Rng rng(103);
  const Tensor feat = random_feat(4, 3, 3, rng);
  const Tensor all = Tensor::full({3, 3}, 1.0);
  const auto global = class_prototype(feat, all, 1);
  REQUIRE(global.has_value());
  for (int d = 0; d < 4; ++d) {
    double mean = 0;
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) mean += feat.at(d, y, x);
    }
    CHECK(global->v[static_cast<size_t>(d)] == doctest::Approx(mean / 9.0));
  }

  Tensor one({3, 3});
  one.at(1, 2) = 1.0;
  const auto single = class_prototype(feat, one, 1);
  REQUIRE(single.has_value());
  for (int d = 0; d < 4; ++d) {
    CHECK(single->v[static_cast<size_t>(d)] == doctest::Approx(feat.at(d, 1, 2)));
  }

  // two-position mask on hand-set vectors (1,0) and (0,1) -> (0.5, 0.5)
  Tensor f2({2, 1, 2});
  f2.at(0, 0, 0) = 1.0;
  f2.at(1, 0, 1) = 1.0;
  Tensor m2 = Tensor::full({1, 2}, 1.0);
  const auto mid = class_prototype(f2, m2, 1);
  REQUIRE(mid.has_value());
  CHECK(mid->v[0] == doctest::Approx(0.5));
  CHECK(mid->v[1] == doctest::Approx(0.5));

  CHECK(!class_prototype(feat, Tensor({3, 3}), 1).has_value());
}

TEST_CASE("ensemble counts: 32x32 grid with 2x2 windows gives 257") {
  Rng rng(104);
  const Tensor feat = random_feat(8, 32, 32, rng);
  Tensor mask({32, 32});
  for (int y = 8; y < 20; ++y) {
    for (int x = 8; x < 20; ++x) mask.at(y, x) = 1.0;
  }
  const auto ens = build_ensemble({feat}, {mask}, 1, window(2, 2), 1);
  CHECK(ens.prototypes.size() == 257);  // 16*16 local + 1 class-level
  CHECK(ens.count(1) >= 1);
  CHECK(ens.count(kBackgroundClass) >= 1);
}

TEST_CASE("prototype count formula holds for random shapes") {
  Rng rng(105);
  for (int trial = 0; trial < 10; ++trial) {
    const int h = 2 + static_cast<int>(rng.uniform_int(0, 30));
    const int w = 2 + static_cast<int>(rng.uniform_int(0, 30));
    const int lh = 1 + static_cast<int>(rng.uniform_int(0, 5));
    const int lw = 1 + static_cast<int>(rng.uniform_int(0, 5));
    const Tensor feat = random_feat(3, h, w, rng);
    Tensor mask({h, w});
    const auto protos = local_prototypes(feat, mask, window(lh, lw), 1);
    const auto expected = ((h + lh - 1) / lh) * ((w + lw - 1) / lw);
    CHECK(static_cast<int>(protos.size()) == expected);
  }
}

TEST_CASE("class_prototype_only mode yields exactly two prototypes for K=1") {
  Rng rng(106);
  const Tensor feat = random_feat(6, 8, 8, rng);
  Tensor mask({8, 8});
  for (int y = 2; y < 5; ++y) {
    for (int x = 2; x < 5; ++x) mask.at(y, x) = 1.0;
  }
  const auto ens = build_ensemble(
      {feat}, {mask}, 1, window(2, 2, AlpConfig::Mode::kClassPrototypeOnly), 1);
  CHECK(ens.prototypes.size() == 2);
  CHECK(ens.count(1) == 1);
  CHECK(ens.count(kBackgroundClass) == 1);
  for (const Prototype& p : ens.prototypes) {
    CHECK(p.kind == PrototypeKind::kClassLevel);
  }
}

TEST_CASE("small foreground below the window threshold still gets a prototype") {
  Rng rng(107);
  const Tensor feat = random_feat(4, 8, 8, rng);
  Tensor mask({8, 8});
  mask.at(3, 3) = 1.0;  // single pixel, every window stays below T
  const auto ens = build_ensemble({feat}, {mask}, 1, window(4, 4), 1);
  CHECK(ens.count(1) == 1);  // the class-level prototype
  bool has_local_fg = false;
  for (const Prototype& p : ens.prototypes) {
    if (p.class_id == 1 && p.kind == PrototypeKind::kLocal) has_local_fg = true;
  }
  CHECK(!has_local_fg);

  CHECK_THROWS_AS(build_ensemble({feat}, {Tensor({8, 8})}, 1, window(2, 2), 1),
                  ValidationError);
}

TEST_CASE("near-full-frame mask falls back to a masked-average background") {
  Rng rng(108);
  // 8x8 grid, one 8x8 window, one background pixel: the window pools to
  // 63/64 >= 0.95 so no local prototype is background, which forces the
  // class-level fallback.
  const Tensor feat = random_feat(4, 8, 8, rng);
  Tensor mask = Tensor::full({8, 8}, 1.0);
  mask.at(7, 7) = 0.0;
  const auto ens = build_ensemble({feat}, {mask}, 1, window(8, 8), 1);
  REQUIRE(ens.count(kBackgroundClass) == 1);
  const Prototype& bg =
      ens.prototypes[static_cast<size_t>(ens.by_class.at(kBackgroundClass)[0])];
  CHECK(bg.kind == PrototypeKind::kClassLevel);
  for (int d = 0; d < 4; ++d) {
    CHECK(bg.v[static_cast<size_t>(d)] == doctest::Approx(feat.at(d, 7, 7)));
  }
}

TEST_CASE("similarity map: aligned, opposite, orthogonal") {
  Tensor feat({2, 1, 3});
  feat.at(0, 0, 0) = 0.6;   // parallel to p
  feat.at(0, 0, 1) = -0.8;  // anti-parallel
  feat.at(1, 0, 2) = 1.7;   // orthogonal
  Prototype p;
  p.v = {2.0, 0.0};
  const Tensor s = similarity_map(p, feat, 20.0);
  CHECK(s.at(0, 0) == doctest::Approx(20.0));
  CHECK(s.at(0, 1) == doctest::Approx(-20.0));
  CHECK(s.at(0, 2) == doctest::Approx(0.0));
}

TEST_CASE("fusion: identity for one map, exact for equal maps, 20/0 case") {
  Tensor s1({2, 2});
  s1.at(0, 0) = 3.25;
  s1.at(1, 1) = -7.5;
  CHECK(fuse_class({s1}) == s1);  // softmax of a singleton is 1

  const Tensor s2 = s1;
  const Tensor fused_eq = fuse_class({s1, s2, s1});
  CHECK(tensor_max_abs_diff(fused_eq, s1) < 1e-12);

  Tensor a = Tensor::full({1, 1}, 20.0);
  Tensor b = Tensor::full({1, 1}, 0.0);
  const Tensor f = fuse_class({a, b});
  const double sigma = std::exp(20.0) / (std::exp(20.0) + 1.0);
  CHECK(f.at(0, 0) == doctest::Approx(20.0 * sigma).epsilon(1e-12));
  CHECK(std::fabs(f.at(0, 0) - 20.0) < 1e-7);
}

TEST_CASE("predict matches an independently coded softmax-of-cosines oracle") {
  Rng rng(109);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + static_cast<int>(rng.uniform_int(0, 2));  // D <= 4
    const Tensor qfeat = random_feat(d, 2, 2, rng);
    PrototypeEnsemble ens;
    std::vector<std::vector<double>> pv;
    std::vector<int> pc;
    const int n_bg = 1 + static_cast<int>(rng.uniform_int(0, 2));
    const int n_fg = 1 + static_cast<int>(rng.uniform_int(0, 2));
    for (int k = 0; k < n_bg + n_fg; ++k) {
      Prototype p;
      p.class_id = k < n_bg ? kBackgroundClass : 1;
      for (int i = 0; i < d; ++i) p.v.push_back(rng.uniform(-1.0, 1.0));
      pv.push_back(p.v);
      pc.push_back(p.class_id);
      ens.by_class[p.class_id].push_back(static_cast<int>(ens.prototypes.size()));
      ens.prototypes.push_back(std::move(p));
    }
    const Prediction pred = predict(ens, qfeat, 2, 2, 20.0);
    REQUIRE(pred.class_ids == std::vector<int>{0, 1});
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        std::vector<double> fvec;
        for (int i = 0; i < d; ++i) fvec.push_back(qfeat.at(i, y, x));
        const auto want = oracle_pixel_probs(pv, pc, fvec, 20.0, {0, 1});
        CHECK(pred.probs.at(0, y, x) == doctest::Approx(want[0]).epsilon(1e-9));
        CHECK(pred.probs.at(1, y, x) == doctest::Approx(want[1]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("prediction is a per-pixel simplex after upsampling") {
  Rng rng(110);
  const Tensor feat = random_feat(6, 8, 8, rng);
  const Tensor qfeat = random_feat(6, 8, 8, rng);
  Tensor mask({8, 8});
  for (int y = 2; y < 6; ++y) {
    for (int x = 1; x < 7; ++x) mask.at(y, x) = 1.0;
  }
  const auto ens = build_ensemble({feat}, {mask}, 1, window(2, 2), 1);
  const Prediction pred = predict(ens, qfeat, 33, 29, 20.0);
  for (int y = 0; y < 33; ++y) {
    for (int x = 0; x < 29; ++x) {
      const double sum = pred.probs.at(0, y, x) + pred.probs.at(1, y, x);
      CHECK(std::fabs(sum - 1.0) < 1e-6);
    }
  }

  PrototypeEnsemble missing_bg;
  Prototype p;
  p.class_id = 1;
  p.v = {1.0};
  missing_bg.by_class[1].push_back(0);
  missing_bg.prototypes.push_back(p);
  CHECK_THROWS_AS(predict(missing_bg, random_feat(1, 2, 2, rng), 2, 2, 20.0),
                  ValidationError);
}

TEST_CASE("equal fused scores give 0.5 probability everywhere") {
  // two identical prototypes, one per class: S'(fg) == S'(bg) at every pixel
  Rng rng(111);
  const Tensor qfeat = random_feat(3, 4, 4, rng);
  PrototypeEnsemble ens;
  for (int cid : {0, 1}) {
    Prototype p;
    p.class_id = cid;
    p.v = {0.3, -0.2, 0.9};
    ens.by_class[cid].push_back(static_cast<int>(ens.prototypes.size()));
    ens.prototypes.push_back(std::move(p));
  }
  const Prediction pred = predict(ens, qfeat, 4, 4, 20.0);
  for (int64_t i = 0; i < pred.probs.size(); ++i) {
    CHECK(pred.probs[i] == doctest::Approx(0.5));
  }
}

TEST_CASE("full-foreground mask with whole-map window reduces to Eq.-3 mean") {
  Rng rng(112);
  const Tensor feat = random_feat(5, 6, 6, rng);
  const Tensor ones = Tensor::full({6, 6}, 1.0);
  const auto locals = local_prototypes(feat, ones, window(6, 6), 1);
  REQUIRE(locals.size() == 1);
  const auto global = class_prototype(feat, ones, 1);
  REQUIRE(global.has_value());
  for (int d = 0; d < 5; ++d) {
    CHECK(locals[0].v[static_cast<size_t>(d)] ==
          doctest::Approx(global->v[static_cast<size_t>(d)]).epsilon(1e-12));
  }
}

TEST_CASE("alp_forward/alp_backward agree with finite differences") {
  Rng rng(113);
  const int d = 3, hf = 4, wf = 4, stride = 2, h = 8, w = 8;
  Tensor fs = random_feat(d, hf, wf, rng);
  Tensor fq = random_feat(d, hf, wf, rng);
  Tensor mask({h, w});
  for (int y = 2; y < 6; ++y) {
    for (int x = 2; x < 6; ++x) mask.at(y, x) = 1.0;
  }
  const Tensor dloss = [&] {
    Tensor t({2, h, w});
    for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
    return t;
  }();
  AlpConfig cfg = window(2, 2);

  auto loss = [&]() {
    const AlpTrace tr = alp_forward(fs, mask, fq, stride, cfg, h, w);
    double acc = 0;
    for (int64_t i = 0; i < tr.probs_up.size(); ++i) acc += tr.probs_up[i] * dloss[i];
    return acc;
  };

  const AlpTrace tr = alp_forward(fs, mask, fq, stride, cfg, h, w);
  Tensor dfs(fs.shape()), dfq(fq.shape());
  alp_backward(tr, dloss, dfs, dfq);

  const double eps = 1e-6;
  for (int64_t i = 0; i < fs.size(); i += 5) {
    const double save = fs[i];
    fs[i] = save + eps;
    const double up = loss();
    fs[i] = save - eps;
    const double dn = loss();
    fs[i] = save;
    CHECK(dfs[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(2e-4));
  }
  for (int64_t i = 0; i < fq.size(); i += 5) {
    const double save = fq[i];
    fq[i] = save + eps;
    const double up = loss();
    fq[i] = save - eps;
    const double dn = loss();
    fq[i] = save;
    CHECK(dfq[i] == doctest::Approx((up - dn) / (2 * eps)).epsilon(2e-4));
  }
}
