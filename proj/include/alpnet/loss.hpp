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

#ifndef ALPNET_LOSS_HPP_
#define ALPNET_LOSS_HPP_

#include "alpnet/tensor.hpp"

namespace alpnet {

inline constexpr double kLogClamp = 1e-12;

struct LossConfig {
  double bg_weight = 0.05;
  double fg_weight = 1.0;
  double lambda_reg = 1.0;

  void validate() const;
};

/// Pixel-averaged weighted cross entropy. probs is a {2,H,W} per-pixel
/// simplex (plane 0 background, plane 1 foreground); target_fg is the
/// binary foreground mask (background target is its complement). Logs are
/// clamped at kLogClamp.
double seg_loss(const Tensor& probs, const Tensor& target_fg,
                const LossConfig& cfg);

/// Same value plus d(loss)/d(probs) accumulated into dprobs (caller
/// zero-initializes). Clamped probabilities get zero gradient.
double seg_loss_backward(const Tensor& probs, const Tensor& target_fg,
                         const LossConfig& cfg, Tensor& dprobs);

/// seg + lambda * reg; rejects non-finite terms.
double total_loss(double seg, double reg, const LossConfig& cfg);

}  // namespace alpnet

#endif  // ALPNET_LOSS_HPP_
