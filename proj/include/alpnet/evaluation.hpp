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

#ifndef ALPNET_EVALUATION_HPP_
#define ALPNET_EVALUATION_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "alpnet/alp.hpp"
#include "alpnet/encoder.hpp"
#include "alpnet/split.hpp"
#include "alpnet/volume.hpp"

namespace alpnet {

/// Dice overlap on 0-100. Both masks empty scores 100, exactly one empty
/// scores 0.
double dice(const Tensor& pred, const Tensor& gt);

/// Volumetric support/query pairing: both class extents are split into C
/// contiguous near-equal chunks (remainder to the earliest chunks); the
/// middle support slice of chunk c segments every query slice of chunk c.
struct ChunkAssignment {
  int class_id = 0;
  std::string support_id, query_id;
  int chunks = 0;
  int support_lo = 0, support_hi = 0;  // inclusive class extent
  int query_lo = 0, query_hi = 0;
  std::vector<int> support_slices;                  // one per chunk
  std::vector<std::pair<int, int>> query_ranges;    // inclusive per chunk
};

ChunkAssignment assign_chunks(const Volume& support_vol, const Volume& query_vol,
                              int class_id, int chunks = 3,
                              bool allow_same_volume = false);

struct ClassEval {
  double dice_score = 0.0;
  int extent_lo = 0, extent_hi = 0;
  Tensor pred;  // {extent_len,H,W} binary prediction over the query extent
};

/// Runs the chunk protocol for one (support, query, class) triple and
/// scores the stacked 2D predictions against ground truth over the query
/// class extent in 3D.
ClassEval evaluate_class(const Encoder& enc, const AlpConfig& alp,
                         const Volume& support_vol, const Volume& query_vol,
                         int class_id, int chunks = 3,
                         bool allow_same_volume = false);

struct EvalReport {
  // class id -> (query volume id -> mean Dice over supports)
  std::map<int, std::map<std::string, double>> per_query;
  std::map<int, double> class_mean;
  double global_mean = 0.0;
  int chunks = 3;
  int fold = 0;
  int setting = 1;
  uint64_t seed = 0;
  bool extent_from_query_labels = true;  // protocol uses gt extent only
  nlohmann::json config_snapshot;
  std::string config_hash;

  nlohmann::json to_json() const;
};

using PairCallback = std::function<void(
    int class_id, const std::string& support_id, const std::string& query_id,
    const ClassEval& eval)>;

/// All ordered (support, query) pairs of test-fold volumes per class; Dice
/// averaged per query volume, then per class. on_pair (when set) observes
/// every evaluated pair, e.g. to render overlays.
EvalReport run_evaluation(const Encoder& enc, const AlpConfig& alp,
                          const std::vector<Volume>& dataset,
                          const DatasetSplit& split,
                          const std::vector<int>& classes, int chunks = 3,
                          const PairCallback& on_pair = {});

}  // namespace alpnet

#endif  // ALPNET_EVALUATION_HPP_
