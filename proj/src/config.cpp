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

#include "alpnet/config.hpp"

#include <fstream>
#include <set>

#include "alpnet/error.hpp"
#include "alpnet/hash.hpp"
#include "alpnet/serialization.hpp"

using nlohmann::json;

namespace alpnet {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& path) {
  if (!j.is_object()) {
    throw ValidationError("config: expected an object at " + path);
  }
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (allowed.count(key) == 0) {
      throw ValidationError("config: unknown key '" + path + key + "'");
    }
  }
}

std::vector<int> window_from(const json& j, const char* key,
                             const std::vector<int>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto w = j.at(key).get<std::vector<int>>();
  if (w.size() != 2) {
    throw ValidationError(std::string("config: ") + key + " must be [h,w]");
  }
  return w;
}

}  // namespace

AlpConfig RunConfig::alp_train() const {
  AlpConfig a;
  a.window_h = window_train[0];
  a.window_w = window_train[1];
  a.threshold = threshold;
  a.alpha = alpha;
  a.mode = mode == "alpnet" ? AlpConfig::Mode::kAlpnet
                            : AlpConfig::Mode::kClassPrototypeOnly;
  return a;
}

AlpConfig RunConfig::alp_infer() const {
  AlpConfig a = alp_train();
  a.window_h = window_infer[0];
  a.window_w = window_infer[1];
  return a;
}

void RunConfig::validate() const {
  if (data_format != "raw" && data_format != "nifti") {
    throw ValidationError("config: data.format must be raw or nifti");
  }
  if (target_size < 8) throw ValidationError("config: data.target_size too small");
  if (mode != "alpnet" && mode != "class_prototype_only") {
    throw ValidationError("config: model.mode must be alpnet or class_prototype_only");
  }
  if (window_train.size() != 2 || window_infer.size() != 2) {
    throw ValidationError("config: windows must be [h,w]");
  }
  if (setting != 1 && setting != 2) {
    throw ValidationError("config: eval.setting must be 1 or 2");
  }
  if (n_folds < 2 || fold < 0 || fold >= n_folds) {
    throw ValidationError("config: eval.fold out of range");
  }
  if (chunks < 1) throw ValidationError("config: eval.chunks must be >= 1");
  superpixel.validate();
  transforms.validate();
  encoder.validate();
  alp_train().validate();
  alp_infer().validate();
  loss.validate();
  train.validate();
}

RunConfig parse_run_config(const json& j) {
  check_keys(j, {"seed", "data", "superpixel", "transforms", "model", "loss",
                 "train", "eval"},
             "");
  RunConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);

  if (j.contains("data")) {
    const json& d = j.at("data");
    check_keys(d, {"root", "format", "target_size", "normalization"}, "data.");
    cfg.data_root = d.value("root", cfg.data_root);
    cfg.data_format = d.value("format", cfg.data_format);
    cfg.target_size = d.value("target_size", cfg.target_size);
    if (d.contains("normalization")) {
      check_keys(d.at("normalization"),
                 {"mode", "pct_lo", "pct_hi", "hu_min", "hu_max"},
                 "data.normalization.");
      cfg.preprocess = d.at("normalization").get<PreprocessOptions>();
    }
  }
  if (j.contains("superpixel")) {
    check_keys(j.at("superpixel"),
               {"scale", "smooth_sigma", "min_size", "connectivity"},
               "superpixel.");
    cfg.superpixel = j.at("superpixel").get<SuperpixelConfig>();
  }
  if (j.contains("transforms")) {
    check_keys(j.at("transforms"),
               {"rotation_deg", "scale_min", "scale_max", "shear_deg",
                "translate_frac", "elastic_alpha", "elastic_sigma",
                "gamma_log_range", "enable_geometric", "enable_intensity"},
               "transforms.");
    cfg.transforms = j.at("transforms").get<TransformConfig>();
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m,
               {"encoder", "window_train", "window_infer", "threshold", "alpha",
                "mode"},
               "model.");
    if (m.contains("encoder")) {
      check_keys(m.at("encoder"), {"in_channels", "channels", "strides"},
                 "model.encoder.");
      cfg.encoder = m.at("encoder").get<EncoderSpec>();
    }
    cfg.window_train = window_from(m, "window_train", cfg.window_train);
    cfg.window_infer = window_from(m, "window_infer", cfg.window_infer);
    cfg.threshold = m.value("threshold", cfg.threshold);
    cfg.alpha = m.value("alpha", cfg.alpha);
    cfg.mode = m.value("mode", cfg.mode);
  }
  if (j.contains("loss")) {
    check_keys(j.at("loss"), {"bg_weight", "fg_weight", "lambda_reg"}, "loss.");
    cfg.loss = j.at("loss").get<LossConfig>();
  }
  if (j.contains("train")) {
    check_keys(j.at("train"),
               {"iterations", "lr0", "decay", "decay_every", "batch_size",
                "momentum", "seed", "checkpoint_every"},
               "train.");
    cfg.train = j.at("train").get<TrainConfig>();
  }
  if (j.contains("eval")) {
    const json& e = j.at("eval");
    check_keys(e,
               {"setting", "fold", "n_folds", "test_group", "classes", "chunks",
                "overlays"},
               "eval.");
    cfg.setting = e.value("setting", cfg.setting);
    cfg.fold = e.value("fold", cfg.fold);
    cfg.n_folds = e.value("n_folds", cfg.n_folds);
    if (e.contains("test_group")) {
      cfg.test_group = e.at("test_group").get<std::vector<int>>();
    }
    if (e.contains("classes")) {
      cfg.eval_classes = e.at("classes").get<std::vector<int>>();
    }
    cfg.chunks = e.value("chunks", cfg.chunks);
    cfg.overlays = e.value("overlays", cfg.overlays);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config: invalid JSON in " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

json run_config_to_json(const RunConfig& cfg) {
  return json{
      {"seed", cfg.seed},
      {"data",
       {{"root", cfg.data_root},
        {"format", cfg.data_format},
        {"target_size", cfg.target_size},
        {"normalization", cfg.preprocess}}},
      {"superpixel", cfg.superpixel},
      {"transforms", cfg.transforms},
      {"model",
       {{"encoder", cfg.encoder},
        {"window_train", cfg.window_train},
        {"window_infer", cfg.window_infer},
        {"threshold", cfg.threshold},
        {"alpha", cfg.alpha},
        {"mode", cfg.mode}}},
      {"loss", cfg.loss},
      {"train", cfg.train},
      {"eval",
       {{"setting", cfg.setting},
        {"fold", cfg.fold},
        {"n_folds", cfg.n_folds},
        {"test_group", cfg.test_group},
        {"classes", cfg.eval_classes},
        {"chunks", cfg.chunks},
        {"overlays", cfg.overlays}}}};
}

std::string config_hash(const RunConfig& cfg) {
  return fnv1a_hex(run_config_to_json(cfg).dump());
}

}  // namespace alpnet
