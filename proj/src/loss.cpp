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

#include "alpnet/loss.hpp"

#include <cmath>

#include "alpnet/error.hpp"

namespace alpnet {

void LossConfig::validate() const {
  if (bg_weight < 0.0 || fg_weight < 0.0) {
    throw ValidationError("loss: class weights must be >= 0");
  }
  if (lambda_reg < 0.0) {
    throw ValidationError("loss: lambda_reg must be >= 0");
  }
}

namespace {

void check_shapes(const Tensor& probs, const Tensor& target_fg) {
  if (probs.ndim() != 3 || probs.dim(0) != 2 || target_fg.ndim() != 2 ||
      probs.dim(1) != target_fg.dim(0) || probs.dim(2) != target_fg.dim(1)) {
    throw ValidationError("seg_loss: probs {2,H,W} and target {H,W} required");
  }
}

}  // namespace

double seg_loss(const Tensor& probs, const Tensor& target_fg,
                const LossConfig& cfg) {
  cfg.validate();
  check_shapes(probs, target_fg);
  const int h = target_fg.dim(0), w = target_fg.dim(1);
  double acc = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = target_fg.at(y, x);
      acc += cfg.fg_weight * t * std::log(std::max(probs.at(1, y, x), kLogClamp));
      acc += cfg.bg_weight * (1.0 - t) *
             std::log(std::max(probs.at(0, y, x), kLogClamp));
    }
  }
  return -acc / (static_cast<double>(h) * w);
}

double seg_loss_backward(const Tensor& probs, const Tensor& target_fg,
                         const LossConfig& cfg, Tensor& dprobs) {
  cfg.validate();
  check_shapes(probs, target_fg);
  const int h = target_fg.dim(0), w = target_fg.dim(1);
  const double norm = 1.0 / (static_cast<double>(h) * w);
  double acc = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = target_fg.at(y, x);
      const double p1 = probs.at(1, y, x);
      const double p0 = probs.at(0, y, x);
      acc += cfg.fg_weight * t * std::log(std::max(p1, kLogClamp));
      acc += cfg.bg_weight * (1.0 - t) * std::log(std::max(p0, kLogClamp));
      if (t != 0.0 && p1 > kLogClamp) {
        dprobs.at(1, y, x) -= cfg.fg_weight * t * norm / p1;
      }
      if (t != 1.0 && p0 > kLogClamp) {
        dprobs.at(0, y, x) -= cfg.bg_weight * (1.0 - t) * norm / p0;
      }
    }
  }
  return -acc * norm;
}

double total_loss(double seg, double reg, const LossConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(seg) || !std::isfinite(reg)) {
    throw ValidationError("total_loss: non-finite loss terms");
  }
  return seg + cfg.lambda_reg * reg;
}

}  // namespace alpnet
