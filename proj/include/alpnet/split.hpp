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

#ifndef ALPNET_SPLIT_HPP_
#define ALPNET_SPLIT_HPP_

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "alpnet/volume.hpp"

namespace alpnet {

/// Cross-validation fold with class partitioning. In setting 2 every
/// training slice containing any testing-class voxel is excluded from the
/// SSL sampling pool.
struct DatasetSplit {
  int fold = 0;
  int setting = 1;
  std::vector<std::string> train_ids;
  std::vector<std::string> test_ids;
  std::set<int> train_classes;
  std::set<int> test_classes;
  std::set<std::pair<std::string, int>> excluded_slices;  // (volume, slice)

  bool is_excluded(const std::string& volume_id, int slice) const {
    return excluded_slices.count({volume_id, slice}) > 0;
  }
};

/// Fold f takes every n_folds-th volume (by sorted id) for testing.
DatasetSplit partition(const std::vector<Volume>& dataset, int fold,
                       int setting, const std::set<int>& test_group,
                       int n_folds = 5);

}  // namespace alpnet

#endif  // ALPNET_SPLIT_HPP_
