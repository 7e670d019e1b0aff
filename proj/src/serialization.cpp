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

#include "alpnet/serialization.hpp"

#include "alpnet/error.hpp"

using nlohmann::json;

namespace alpnet {

void to_json(json& j, const SuperpixelConfig& c) {
  j = json{{"scale", c.scale},
           {"smooth_sigma", c.smooth_sigma},
           {"min_size", c.min_size},
           {"connectivity", c.connectivity}};
}

void from_json(const json& j, SuperpixelConfig& c) {
  c.scale = j.value("scale", c.scale);
  c.smooth_sigma = j.value("smooth_sigma", c.smooth_sigma);
  c.min_size = j.value("min_size", c.min_size);
  c.connectivity = j.value("connectivity", c.connectivity);
}

void to_json(json& j, const TransformConfig& c) {
  j = json{{"rotation_deg", c.rotation_deg},
           {"scale_min", c.scale_min},
           {"scale_max", c.scale_max},
           {"shear_deg", c.shear_deg},
           {"translate_frac", c.translate_frac},
           {"elastic_alpha", c.elastic_alpha},
           {"elastic_sigma", c.elastic_sigma},
           {"gamma_log_range", c.gamma_log_range},
           {"enable_geometric", c.enable_geometric},
           {"enable_intensity", c.enable_intensity}};
}

void from_json(const json& j, TransformConfig& c) {
  c.rotation_deg = j.value("rotation_deg", c.rotation_deg);
  c.scale_min = j.value("scale_min", c.scale_min);
  c.scale_max = j.value("scale_max", c.scale_max);
  c.shear_deg = j.value("shear_deg", c.shear_deg);
  c.translate_frac = j.value("translate_frac", c.translate_frac);
  c.elastic_alpha = j.value("elastic_alpha", c.elastic_alpha);
  c.elastic_sigma = j.value("elastic_sigma", c.elastic_sigma);
  c.gamma_log_range = j.value("gamma_log_range", c.gamma_log_range);
  c.enable_geometric = j.value("enable_geometric", c.enable_geometric);
  c.enable_intensity = j.value("enable_intensity", c.enable_intensity);
}

void to_json(json& j, const AlpConfig& c) {
  j = json{{"window", {c.window_h, c.window_w}},
           {"threshold", c.threshold},
           {"alpha", c.alpha},
           {"mode", c.mode == AlpConfig::Mode::kAlpnet ? "alpnet"
                                                       : "class_prototype_only"}};
}

void from_json(const json& j, AlpConfig& c) {
  if (j.contains("window")) {
    const auto w = j.at("window").get<std::vector<int>>();
    if (w.size() != 2) throw ValidationError("alp config: window must be [h,w]");
    c.window_h = w[0];
    c.window_w = w[1];
  }
  c.threshold = j.value("threshold", c.threshold);
  c.alpha = j.value("alpha", c.alpha);
  const std::string mode = j.value("mode", "alpnet");
  if (mode == "alpnet") {
    c.mode = AlpConfig::Mode::kAlpnet;
  } else if (mode == "class_prototype_only") {
    c.mode = AlpConfig::Mode::kClassPrototypeOnly;
  } else {
    throw ValidationError("alp config: unknown mode '" + mode + "'");
  }
}

void to_json(json& j, const LossConfig& c) {
  j = json{{"bg_weight", c.bg_weight},
           {"fg_weight", c.fg_weight},
           {"lambda_reg", c.lambda_reg}};
}

void from_json(const json& j, LossConfig& c) {
  c.bg_weight = j.value("bg_weight", c.bg_weight);
  c.fg_weight = j.value("fg_weight", c.fg_weight);
  c.lambda_reg = j.value("lambda_reg", c.lambda_reg);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"iterations", c.iterations},
           {"lr0", c.lr0},
           {"decay", c.decay},
           {"decay_every", c.decay_every},
           {"batch_size", c.batch_size},
           {"momentum", c.momentum},
           {"seed", c.seed},
           {"checkpoint_every", c.checkpoint_every}};
}

void from_json(const json& j, TrainConfig& c) {
  c.iterations = j.value("iterations", c.iterations);
  c.lr0 = j.value("lr0", c.lr0);
  c.decay = j.value("decay", c.decay);
  c.decay_every = j.value("decay_every", c.decay_every);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.momentum = j.value("momentum", c.momentum);
  c.seed = j.value("seed", c.seed);
  c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
}

void to_json(json& j, const EncoderSpec& c) {
  j = json{{"in_channels", c.in_channels},
           {"channels", c.channels},
           {"strides", c.strides}};
}

void from_json(const json& j, EncoderSpec& c) {
  c.in_channels = j.value("in_channels", c.in_channels);
  if (j.contains("channels")) c.channels = j.at("channels").get<std::vector<int>>();
  if (j.contains("strides")) c.strides = j.at("strides").get<std::vector<int>>();
}

void to_json(json& j, const PreprocessOptions& c) {
  j = json{{"mode", c.mode == PreprocessOptions::Mode::kPercentile ? "percentile"
                                                                   : "hu_window"},
           {"pct_lo", c.pct_lo},
           {"pct_hi", c.pct_hi},
           {"hu_min", c.hu_min},
           {"hu_max", c.hu_max}};
}

void from_json(const json& j, PreprocessOptions& c) {
  const std::string mode = j.value("mode", "percentile");
  if (mode == "percentile") {
    c.mode = PreprocessOptions::Mode::kPercentile;
  } else if (mode == "hu_window") {
    c.mode = PreprocessOptions::Mode::kHuWindow;
  } else {
    throw ValidationError("preprocess config: unknown mode '" + mode + "'");
  }
  c.pct_lo = j.value("pct_lo", c.pct_lo);
  c.pct_hi = j.value("pct_hi", c.pct_hi);
  c.hu_min = j.value("hu_min", c.hu_min);
  c.hu_max = j.value("hu_max", c.hu_max);
}

}  // namespace alpnet
