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

#ifndef ALPNET_ALP_HPP_
#define ALPNET_ALP_HPP_

#include <map>
#include <optional>
#include <vector>

#include "alpnet/tensor.hpp"

namespace alpnet {

inline constexpr int kBackgroundClass = 0;

struct AlpConfig {
  enum class Mode { kAlpnet, kClassPrototypeOnly };
  int window_h = 4;
  int window_w = 4;
  double threshold = 0.95;  // foreground lower bound on the pooled mask
  double alpha = 20.0;      // cosine similarity multiplier
  Mode mode = Mode::kAlpnet;

  void validate() const;
};

enum class PrototypeKind { kLocal, kClassLevel };

struct Prototype {
  std::vector<double> v;
  int class_id = kBackgroundClass;
  PrototypeKind kind = PrototypeKind::kLocal;
  int shot = 0;
  int win_m = -1, win_n = -1;  // source window for kLocal
  Tensor weights;              // pooling weights over the grid for kClassLevel
  double weight_sum = 0.0;
};

struct PrototypeEnsemble {
  std::vector<Prototype> prototypes;
  std::map<int, std::vector<int>> by_class;  // class id -> prototype indices

  int count(int class_id) const {
    auto it = by_class.find(class_id);
    return it == by_class.end() ? 0 : static_cast<int>(it->second.size());
  }
};

/// Support mask average-pooled to the feature grid by the encoder stride.
Tensor pool_mask_to_grid(const Tensor& mask, int stride);

/// One prototype per pooling window (features and mask zero-padded on the
/// right/bottom to a whole number of windows). Window class is foreground
/// when the pooled-mask window mean reaches cfg.threshold.
std::vector<Prototype> local_prototypes(const Tensor& feat,
                                        const Tensor& mask_grid,
                                        const AlpConfig& cfg,
                                        int fg_class_id = 1, int shot = 0);

/// Masked average pooling over the feature grid with arbitrary
/// non-negative weights. nullopt when the weights are all zero.
std::optional<Prototype> class_prototype(const Tensor& feat,
                                         const Tensor& weights, int class_id,
                                         int shot = 0);

/// Assembles the prototype ensemble from K support shots (masks at input
/// resolution). kAlpnet: all local prototypes plus one foreground
/// class-level prototype per shot (background falls back to a class-level
/// prototype if no window classifies as background). kClassPrototypeOnly:
/// one class-level prototype per class per shot.
PrototypeEnsemble build_ensemble(const std::vector<Tensor>& support_feats,
                                 const std::vector<Tensor>& support_masks,
                                 int stride, const AlpConfig& cfg,
                                 int fg_class_id = 1);

/// alpha-scaled cosine similarity between one prototype and every feature
/// grid position.
Tensor similarity_map(const Prototype& p, const Tensor& feat, double alpha);

/// Softmax-weighted fusion over one class's similarity maps:
/// fused(h,w) = sum_k S_k(h,w) * softmax_k[S_k(h,w)].
Tensor fuse_class(const std::vector<Tensor>& sims);

struct Prediction {
  Tensor probs;                // {C,out_h,out_w}, per-pixel simplex
  std::vector<int> class_ids;  // plane order (ascending; background first)
};

/// Full similarity classifier: per-class fusion, softmax across classes,
/// bilinear upsampling of the probabilities to out_h x out_w.
Prediction predict(const PrototypeEnsemble& ens, const Tensor& qfeat,
                   int out_h, int out_w, double alpha);

// --------------------------------------------------------------------------
// Differentiable single-shot pass used by episodic training.
// --------------------------------------------------------------------------
struct AlpTrace {
  Tensor fs, fq;      // support/query feature maps {D,Hf,Wf}
  Tensor mask_grid;   // pooled support mask (constant wrt parameters)
  AlpConfig cfg;
  PrototypeEnsemble ens;
  std::vector<int> proto_order;  // row k of protos_mat -> ensemble index
  Tensor protos_mat;  // {K,D}
  Tensor sims;        // {K,Hf,Wf}
  Tensor fused;       // {2,Hf,Wf}: plane 0 bg, plane 1 fg
  Tensor probs_grid;  // {2,Hf,Wf}
  Tensor probs_up;    // {2,H,W}
};

AlpTrace alp_forward(const Tensor& fs, const Tensor& support_mask,
                     const Tensor& fq, int stride, const AlpConfig& cfg,
                     int out_h, int out_w);

/// Routes d(loss)/d(probs_up) back to the support and query feature maps
/// (accumulated into dfs/dfq, which must be feature-map shaped and
/// caller-initialized).
void alp_backward(const AlpTrace& trace, const Tensor& dprobs_up, Tensor& dfs,
                  Tensor& dfq);

}  // namespace alpnet

#endif  // ALPNET_ALP_HPP_
