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

#ifndef ALPNET_DEMO_HPP_
#define ALPNET_DEMO_HPP_

#include <string>

#include "alpnet/config.hpp"
#include "alpnet/evaluation.hpp"

namespace alpnet {

/// Desk-scale end-to-end run: generate phantoms, build pseudolabel stores,
/// train with SSL, evaluate the held-out class (setting-2 semantics).
struct DemoConfig {
  uint64_t seed = 1234;
  int n_volumes = 20;
  int n_slices = 24;
  int size = 64;
  int n_classes = 3;
  int held_out_class = 3;
  int fold = 0;
  int chunks = 3;
  int64_t iterations = 10000;
  std::string mode = "alpnet";
  bool enable_geometric = true;
  bool enable_intensity = true;
  SuperpixelConfig superpixel{150.0, 0.8, 40, 4};
  std::string out_dir;
  bool quiet = false;
};

struct DemoResult {
  double mean_dice = 0.0;
  EvalReport report;
  std::string checkpoint_path;
  std::string report_path;
  std::string log_path;
  std::string store_root;
  std::string data_root;
};

DemoResult run_synthetic_demo(const DemoConfig& cfg);

}  // namespace alpnet

#endif  // ALPNET_DEMO_HPP_
