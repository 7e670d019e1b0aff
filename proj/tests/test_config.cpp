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

#include "alpnet/config.hpp"
#include "alpnet/error.hpp"

using namespace alpnet;
using nlohmann::json;

TEST_CASE("defaults parse and validate") {
  const RunConfig cfg = parse_run_config(json::object());
  CHECK(cfg.target_size == 256);
  CHECK(cfg.mode == "alpnet");
  CHECK(cfg.window_train == std::vector<int>{4, 4});
  CHECK(cfg.window_infer == std::vector<int>{2, 2});
  CHECK(cfg.alpha == 20.0);
  CHECK(cfg.threshold == 0.95);
  CHECK(cfg.loss.bg_weight == 0.05);
  CHECK(cfg.loss.fg_weight == 1.0);
  CHECK(cfg.train.lr0 == 0.001);
  CHECK(cfg.train.decay == 0.98);
  CHECK(cfg.train.decay_every == 1000);
  CHECK(cfg.train.batch_size == 1);
  CHECK(cfg.superpixel.min_size == 100);
  CHECK(cfg.chunks == 3);
}

TEST_CASE("round-trip through JSON preserves every field") {
  RunConfig cfg;
  cfg.seed = 99;
  cfg.data_root = "/tmp/x";
  cfg.data_format = "nifti";
  cfg.target_size = 64;
  cfg.superpixel.min_size = 31;
  cfg.transforms.rotation_deg = 12.5;
  cfg.transforms.enable_intensity = false;
  cfg.encoder.channels = {8, 8};
  cfg.encoder.strides = {2, 2};
  cfg.window_train = {8, 8};
  cfg.mode = "class_prototype_only";
  cfg.loss.lambda_reg = 0.5;
  cfg.train.iterations = 123;
  cfg.setting = 2;
  cfg.fold = 3;
  cfg.test_group = {1, 2};
  cfg.eval_classes = {2};
  cfg.overlays = true;

  const RunConfig back = parse_run_config(run_config_to_json(cfg));
  CHECK(run_config_to_json(back) == run_config_to_json(cfg));
  CHECK(back.mode == "class_prototype_only");
  CHECK(back.transforms.enable_intensity == false);
  CHECK(back.test_group == std::vector<int>{1, 2});
}

TEST_CASE("unknown keys are rejected at any depth") {
  CHECK_THROWS_AS(parse_run_config(json{{"bogus", 1}}), ValidationError);
  CHECK_THROWS_AS(parse_run_config(json{{"data", {{"rooot", "/x"}}}}),
                  ValidationError);
  CHECK_THROWS_AS(parse_run_config(json{{"model", {{"windows", {4, 4}}}}}),
                  ValidationError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"train", {{"lr", 0.1}}}}),
      ValidationError);
  CHECK_THROWS_AS(
      parse_run_config(json{{"superpixel", {{"min_size", 10}, {"x", 1}}}}),
      ValidationError);
}

TEST_CASE("invalid values are rejected with validation errors") {
  CHECK_THROWS_AS(parse_run_config(json{{"model", {{"mode", "banana"}}}}),
                  ValidationError);
  CHECK_THROWS_AS(parse_run_config(json{{"eval", {{"setting", 3}}}}),
                  ValidationError);
  CHECK_THROWS_AS(parse_run_config(json{{"superpixel", {{"scale", -2.0}}}}),
                  ValidationError);
  CHECK_THROWS_AS(parse_run_config(json{{"train", {{"iterations", 0}}}}),
                  ValidationError);
  CHECK_THROWS_AS(parse_run_config(json{{"model", {{"window_train", {4}}}}}),
                  ValidationError);
  CHECK_THROWS_AS(parse_run_config(json{{"data", {{"format", "dicom"}}}}),
                  ValidationError);
}

TEST_CASE("config hash is stable and sensitive") {
  RunConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  b.train.iterations = 999;
  CHECK(config_hash(a) != config_hash(b));
  RunConfig c;
  c.mode = "class_prototype_only";
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("alp config projections pick the right windows") {
  RunConfig cfg;
  cfg.window_train = {4, 4};
  cfg.window_infer = {2, 2};
  cfg.mode = "class_prototype_only";
  const AlpConfig t = cfg.alp_train();
  const AlpConfig i = cfg.alp_infer();
  CHECK(t.window_h == 4);
  CHECK(i.window_h == 2);
  CHECK(t.mode == AlpConfig::Mode::kClassPrototypeOnly);
  CHECK(i.alpha == 20.0);
}
