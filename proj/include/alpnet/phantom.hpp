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

#ifndef ALPNET_PHANTOM_HPP_
#define ALPNET_PHANTOM_HPP_

#include <vector>

#include "alpnet/rng.hpp"
#include "alpnet/volume.hpp"

namespace alpnet {

/// Synthetic desk-scale dataset: textured smooth background plus one
/// ellipsoidal "organ" per class with a distinct intensity band and a
/// randomized pose per volume. Labels are exact and each organ occupies a
/// contiguous slice range. Classes are ids 1..n_classes.
std::vector<Volume> make_phantom_dataset(int n_volumes, int n_slices, int size,
                                         int n_classes, Rng& rng);

}  // namespace alpnet

#endif  // ALPNET_PHANTOM_HPP_
