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

#ifndef ALPNET_CONFIG_HPP_
#define ALPNET_CONFIG_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "alpnet/alp.hpp"
#include "alpnet/encoder.hpp"
#include "alpnet/superpixel.hpp"
#include "alpnet/train.hpp"
#include "alpnet/transforms.hpp"
#include "alpnet/volume.hpp"

namespace alpnet {

/// Whole-run configuration, serialized as one JSON document. Parsing is
/// strict: unknown keys anywhere in the document are rejected.
struct RunConfig {
  uint64_t seed = 1234;

  std::string data_root;
  std::string data_format = "raw";  // raw | nifti
  int target_size = 256;
  PreprocessOptions preprocess;

  SuperpixelConfig superpixel;
  TransformConfig transforms;

  EncoderSpec encoder;
  std::vector<int> window_train = {4, 4};
  std::vector<int> window_infer = {2, 2};
  double threshold = 0.95;
  double alpha = 20.0;
  std::string mode = "alpnet";  // alpnet | class_prototype_only

  LossConfig loss;
  TrainConfig train;

  int setting = 1;
  int fold = 0;
  int n_folds = 5;
  std::vector<int> test_group;
  std::vector<int> eval_classes;
  int chunks = 3;
  bool overlays = false;

  AlpConfig alp_train() const;
  AlpConfig alp_infer() const;
  void validate() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json run_config_to_json(const RunConfig& cfg);

/// FNV-1a of the canonical JSON form; embedded in artifacts so stale
/// checkpoint/report/config pairings are detectable.
std::string config_hash(const RunConfig& cfg);

}  // namespace alpnet

#endif  // ALPNET_CONFIG_HPP_
