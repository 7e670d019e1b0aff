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

#include "alpnet/split.hpp"

#include <algorithm>

#include "alpnet/error.hpp"

namespace alpnet {

DatasetSplit partition(const std::vector<Volume>& dataset, int fold,
                       int setting, const std::set<int>& test_group,
                       int n_folds) {
  if (dataset.empty()) throw ValidationError("partition: empty dataset");
  if (n_folds < 2 || fold < 0 || fold >= n_folds) {
    throw ValidationError("partition: fold out of range");
  }
  if (setting != 1 && setting != 2) {
    throw ValidationError("partition: setting must be 1 or 2");
  }

  std::set<int> all_classes;
  for (const Volume& v : dataset) {
    for (const auto& [cid, grid] : v.labels) {
      (void)grid;
      all_classes.insert(cid);
    }
  }
  for (int cid : test_group) {
    if (all_classes.count(cid) == 0) {
      throw ValidationError("partition: unknown class id " + std::to_string(cid) +
                            " in test group");
    }
  }

  std::vector<const Volume*> sorted;
  sorted.reserve(dataset.size());
  for (const Volume& v : dataset) sorted.push_back(&v);
  std::sort(sorted.begin(), sorted.end(),
            [](const Volume* a, const Volume* b) { return a->id < b->id; });

  DatasetSplit split;
  split.fold = fold;
  split.setting = setting;
  split.test_classes = test_group;
  for (int cid : all_classes) {
    if (test_group.count(cid) == 0) split.train_classes.insert(cid);
  }

  for (size_t i = 0; i < sorted.size(); ++i) {
    if (static_cast<int>(i % static_cast<size_t>(n_folds)) == fold) {
      split.test_ids.push_back(sorted[i]->id);
    } else {
      split.train_ids.push_back(sorted[i]->id);
    }
  }

  if (setting == 2) {
    for (const Volume* vp : sorted) {
      const bool in_train =
          std::find(split.train_ids.begin(), split.train_ids.end(), vp->id) !=
          split.train_ids.end();
      if (!in_train) continue;
      for (int s = 0; s < vp->n_slices(); ++s) {
        for (int cid : test_group) {
          if (vp->slice_contains_class(cid, s)) {
            split.excluded_slices.insert({vp->id, s});
            break;
          }
        }
      }
    }
  }
  return split;
}

}  // namespace alpnet
