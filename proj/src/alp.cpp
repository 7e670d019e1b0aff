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

#include "alpnet/alp.hpp"

#include <algorithm>
#include <cmath>

#include "alpnet/error.hpp"
#include "alpnet/kernels.hpp"

namespace alpnet {

namespace {

inline int ceil_div(int a, int b) { return (a + b - 1) / b; }

Tensor binarize(const Tensor& t, double thr) {
  Tensor out(t.shape());
  for (int64_t i = 0; i < t.size(); ++i) out[i] = t[i] >= thr ? 1.0 : 0.0;
  return out;
}

Tensor complement(const Tensor& t) {
  Tensor out(t.shape());
  for (int64_t i = 0; i < t.size(); ++i) out[i] = 1.0 - t[i];
  return out;
}

Tensor stack_prototypes(const PrototypeEnsemble& ens) {
  const int k = static_cast<int>(ens.prototypes.size());
  const int d = static_cast<int>(ens.prototypes.front().v.size());
  Tensor mat({k, d});
  for (int i = 0; i < k; ++i) {
    const auto& v = ens.prototypes[static_cast<size_t>(i)].v;
    std::copy(v.begin(), v.end(), mat.data() + static_cast<size_t>(i) * d);
  }
  return mat;
}

// fused(h,w) = sum_k S_k * softmax_k(S_k) over the selected sims planes.
Tensor fuse_from_stack(const Tensor& sims, const std::vector<int>& indices) {
  const int h = sims.dim(1), w = sims.dim(2);
  Tensor fused({h, w});
  std::vector<double> vals(indices.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double m = -1e300;
      for (size_t i = 0; i < indices.size(); ++i) {
        vals[i] = sims.at(indices[i], y, x);
        m = std::max(m, vals[i]);
      }
      double z = 0.0, acc = 0.0;
      for (double v : vals) z += std::exp(v - m);
      for (double v : vals) acc += v * std::exp(v - m) / z;
      fused.at(y, x) = acc;
    }
  }
  return fused;
}

// Per-pixel softmax across class planes of a {C,H,W} tensor.
Tensor softmax_planes(const Tensor& scores) {
  const int c = scores.dim(0), h = scores.dim(1), w = scores.dim(2);
  Tensor probs(scores.shape());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double m = -1e300;
      for (int j = 0; j < c; ++j) m = std::max(m, scores.at(j, y, x));
      double z = 0.0;
      for (int j = 0; j < c; ++j) z += std::exp(scores.at(j, y, x) - m);
      for (int j = 0; j < c; ++j) {
        probs.at(j, y, x) = std::exp(scores.at(j, y, x) - m) / z;
      }
    }
  }
  return probs;
}

}  // namespace

void AlpConfig::validate() const {
  if (window_h < 1 || window_w < 1) {
    throw ValidationError("alp: pooling window must be positive");
  }
  if (!(threshold > 0.0) || threshold > 1.0) {
    throw ValidationError("alp: threshold must lie in (0,1]");
  }
  if (!(alpha > 0.0)) throw ValidationError("alp: alpha must be > 0");
}

Tensor pool_mask_to_grid(const Tensor& mask, int stride) {
  if (stride == 1) return mask;
  Tensor out;
  kernels::avg_pool_factor(mask, stride, out);
  return out;
}

std::vector<Prototype> local_prototypes(const Tensor& feat,
                                        const Tensor& mask_grid,
                                        const AlpConfig& cfg, int fg_class_id,
                                        int shot) {
  cfg.validate();
  if (feat.ndim() != 3 || mask_grid.ndim() != 2 ||
      feat.dim(1) != mask_grid.dim(0) || feat.dim(2) != mask_grid.dim(1)) {
    throw ValidationError("local_prototypes: feature/mask grid mismatch");
  }
  const int d = feat.dim(0), h = feat.dim(1), w = feat.dim(2);
  const int lh = cfg.window_h, lw = cfg.window_w;
  const int mh = ceil_div(h, lh), mw = ceil_div(w, lw);
  const double inv = 1.0 / (lh * lw);  // padded cells count as zeros

  std::vector<Prototype> out;
  out.reserve(static_cast<size_t>(mh) * mw);
  for (int m = 0; m < mh; ++m) {
    const int y0 = m * lh, y1 = std::min((m + 1) * lh, h);
    for (int n = 0; n < mw; ++n) {
      const int x0 = n * lw, x1 = std::min((n + 1) * lw, w);
      Prototype p;
      p.kind = PrototypeKind::kLocal;
      p.shot = shot;
      p.win_m = m;
      p.win_n = n;
      p.v.assign(static_cast<size_t>(d), 0.0);
      for (int dd = 0; dd < d; ++dd) {
        double acc = 0.0;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) acc += feat.at(dd, y, x);
        }
        p.v[static_cast<size_t>(dd)] = acc * inv;
      }
      double ya = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) ya += mask_grid.at(y, x);
      }
      ya *= inv;
      p.class_id = ya >= cfg.threshold ? fg_class_id : kBackgroundClass;
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::optional<Prototype> class_prototype(const Tensor& feat,
                                         const Tensor& weights, int class_id,
                                         int shot) {
  if (feat.ndim() != 3 || weights.ndim() != 2 ||
      feat.dim(1) != weights.dim(0) || feat.dim(2) != weights.dim(1)) {
    throw ValidationError("class_prototype: feature/weights mismatch");
  }
  const double total = tensor_sum(weights);
  if (!(total > 0.0)) return std::nullopt;  // no-foreground signal
  const int d = feat.dim(0), h = feat.dim(1), w = feat.dim(2);
  Prototype p;
  p.kind = PrototypeKind::kClassLevel;
  p.class_id = class_id;
  p.shot = shot;
  p.weights = weights;
  p.weight_sum = total;
  p.v.assign(static_cast<size_t>(d), 0.0);
  for (int dd = 0; dd < d; ++dd) {
    double acc = 0.0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) acc += weights.at(y, x) * feat.at(dd, y, x);
    }
    p.v[static_cast<size_t>(dd)] = acc / total;
  }
  return p;
}

PrototypeEnsemble build_ensemble(const std::vector<Tensor>& support_feats,
                                 const std::vector<Tensor>& support_masks,
                                 int stride, const AlpConfig& cfg,
                                 int fg_class_id) {
  cfg.validate();
  if (support_feats.empty() || support_feats.size() != support_masks.size()) {
    throw ValidationError("build_ensemble: need matching support shots");
  }
  double total_fg = 0.0;
  for (const Tensor& m : support_masks) total_fg += tensor_sum(m);
  if (!(total_fg > 0.0)) {
    throw ValidationError("build_ensemble: support has no foreground");
  }

  PrototypeEnsemble ens;
  std::vector<Tensor> grids, bins;
  for (size_t k = 0; k < support_feats.size(); ++k) {
    const Tensor grid = pool_mask_to_grid(support_masks[k], stride);
    if (grid.dim(0) != support_feats[k].dim(1) ||
        grid.dim(1) != support_feats[k].dim(2)) {
      throw ValidationError("build_ensemble: mask/feature resolution mismatch");
    }
    bins.push_back(binarize(grid, 0.5));
    grids.push_back(grid);
  }

  auto fg_weights_for = [&](size_t k) -> Tensor {
    return tensor_sum(bins[k]) > 0.0 ? bins[k] : grids[k];
  };
  auto bg_weights_for = [&](size_t k) -> Tensor {
    Tensor w = complement(bins[k]);
    if (tensor_sum(w) > 0.0) return w;
    return complement(grids[k]);
  };

  for (size_t k = 0; k < support_feats.size(); ++k) {
    const int shot = static_cast<int>(k);
    if (cfg.mode == AlpConfig::Mode::kAlpnet) {
      for (Prototype& p :
           local_prototypes(support_feats[k], grids[k], cfg, fg_class_id, shot)) {
        ens.prototypes.push_back(std::move(p));
      }
      if (auto p = class_prototype(support_feats[k], fg_weights_for(k),
                                   fg_class_id, shot)) {
        ens.prototypes.push_back(std::move(*p));
      }
    } else {
      if (auto p = class_prototype(support_feats[k], fg_weights_for(k),
                                   fg_class_id, shot)) {
        ens.prototypes.push_back(std::move(*p));
      }
      if (auto p = class_prototype(support_feats[k], bg_weights_for(k),
                                   kBackgroundClass, shot)) {
        ens.prototypes.push_back(std::move(*p));
      }
    }
  }

  if (cfg.mode == AlpConfig::Mode::kAlpnet) {
    // Degenerate-background policy: a near-full-frame mask can leave no
    // window below the threshold; fall back to masked-average pooling.
    bool has_bg = false;
    for (const Prototype& p : ens.prototypes) {
      if (p.class_id == kBackgroundClass) has_bg = true;
    }
    if (!has_bg) {
      for (size_t k = 0; k < support_feats.size(); ++k) {
        if (auto p = class_prototype(support_feats[k], bg_weights_for(k),
                                     kBackgroundClass, static_cast<int>(k))) {
          ens.prototypes.push_back(std::move(*p));
        }
      }
    }
  }

  for (size_t i = 0; i < ens.prototypes.size(); ++i) {
    ens.by_class[ens.prototypes[i].class_id].push_back(static_cast<int>(i));
  }
  return ens;
}

Tensor similarity_map(const Prototype& p, const Tensor& feat, double alpha) {
  const int d = static_cast<int>(p.v.size());
  Tensor mat({1, d});
  std::copy(p.v.begin(), p.v.end(), mat.data());
  Tensor sims;
  kernels::cosine_similarity_stack(mat, feat, alpha, sims);
  Tensor out({feat.dim(1), feat.dim(2)});
  std::copy(sims.data(), sims.data() + out.size(), out.data());
  return out;
}

Tensor fuse_class(const std::vector<Tensor>& sims) {
  if (sims.empty()) throw ValidationError("fuse_class: empty similarity list");
  const int h = sims.front().dim(0), w = sims.front().dim(1);
  Tensor stack({static_cast<int>(sims.size()), h, w});
  std::vector<int> indices;
  for (size_t i = 0; i < sims.size(); ++i) {
    if (!sims[i].same_shape(sims.front())) {
      throw ValidationError("fuse_class: similarity shape mismatch");
    }
    std::copy(sims[i].data(), sims[i].data() + sims[i].size(),
              stack.data() + static_cast<size_t>(i) * h * w);
    indices.push_back(static_cast<int>(i));
  }
  return fuse_from_stack(stack, indices);
}

Prediction predict(const PrototypeEnsemble& ens, const Tensor& qfeat,
                   int out_h, int out_w, double alpha) {
  if (ens.prototypes.empty()) {
    throw ValidationError("predict: empty prototype ensemble");
  }
  if (ens.count(kBackgroundClass) == 0 || ens.by_class.size() < 2) {
    throw ValidationError(
        "predict: ensemble must cover background and a foreground class");
  }
  const Tensor protos = stack_prototypes(ens);
  if (protos.dim(1) != qfeat.dim(0)) {
    throw ValidationError("predict: feature depth mismatch");
  }
  Tensor sims;
  kernels::cosine_similarity_stack(protos, qfeat, alpha, sims);

  Prediction pred;
  for (const auto& [cid, idx] : ens.by_class) {
    (void)idx;
    pred.class_ids.push_back(cid);
  }
  const int c = static_cast<int>(pred.class_ids.size());
  Tensor fused({c, qfeat.dim(1), qfeat.dim(2)});
  for (int j = 0; j < c; ++j) {
    const Tensor f = fuse_from_stack(sims, ens.by_class.at(pred.class_ids[static_cast<size_t>(j)]));
    std::copy(f.data(), f.data() + f.size(),
              fused.data() + static_cast<size_t>(j) * f.size());
  }
  const Tensor probs_grid = softmax_planes(fused);
  kernels::bilinear_resize(probs_grid, out_h, out_w, pred.probs);
  return pred;
}

AlpTrace alp_forward(const Tensor& fs, const Tensor& support_mask,
                     const Tensor& fq, int stride, const AlpConfig& cfg,
                     int out_h, int out_w) {
  AlpTrace tr;
  tr.fs = fs;
  tr.fq = fq;
  tr.cfg = cfg;
  tr.mask_grid = pool_mask_to_grid(support_mask, stride);
  tr.ens = build_ensemble({fs}, {support_mask}, stride, cfg);
  if (tr.ens.count(kBackgroundClass) == 0) {
    throw ValidationError("alp_forward: support mask covers the whole frame");
  }

  tr.proto_order.resize(tr.ens.prototypes.size());
  for (size_t i = 0; i < tr.proto_order.size(); ++i) {
    tr.proto_order[i] = static_cast<int>(i);
  }
  tr.protos_mat = stack_prototypes(tr.ens);
  kernels::cosine_similarity_stack(tr.protos_mat, fq, cfg.alpha, tr.sims);

  const int fg_class = [&] {
    for (const auto& [cid, idx] : tr.ens.by_class) {
      (void)idx;
      if (cid != kBackgroundClass) return cid;
    }
    throw ValidationError("alp_forward: no foreground prototypes");
  }();

  const int h = fq.dim(1), w = fq.dim(2);
  tr.fused = Tensor({2, h, w});
  const Tensor fused_bg = fuse_from_stack(tr.sims, tr.ens.by_class.at(kBackgroundClass));
  const Tensor fused_fg = fuse_from_stack(tr.sims, tr.ens.by_class.at(fg_class));
  std::copy(fused_bg.data(), fused_bg.data() + fused_bg.size(), tr.fused.data());
  std::copy(fused_fg.data(), fused_fg.data() + fused_fg.size(),
            tr.fused.data() + fused_fg.size());

  tr.probs_grid = softmax_planes(tr.fused);
  kernels::bilinear_resize(tr.probs_grid, out_h, out_w, tr.probs_up);
  return tr;
}

void alp_backward(const AlpTrace& tr, const Tensor& dprobs_up, Tensor& dfs,
                  Tensor& dfq) {
  const int h = tr.fq.dim(1), w = tr.fq.dim(2);

  Tensor dprobs_grid;
  kernels::bilinear_resize_backward(dprobs_up, h, w, dprobs_grid);

  // Softmax across the two class planes.
  Tensor dfused({2, h, w});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double p0 = tr.probs_grid.at(0, y, x);
      const double p1 = tr.probs_grid.at(1, y, x);
      const double g0 = dprobs_grid.at(0, y, x);
      const double g1 = dprobs_grid.at(1, y, x);
      const double dot = g0 * p0 + g1 * p1;
      dfused.at(0, y, x) = p0 * (g0 - dot);
      dfused.at(1, y, x) = p1 * (g1 - dot);
    }
  }

  // Fusion backward: dS_k = dF * sigma_k * (1 + S_k - F).
  const int kn = tr.protos_mat.dim(0);
  Tensor dsims({kn, h, w});
  int fg_class = -1;
  for (const auto& [cid, idx] : tr.ens.by_class) {
    (void)idx;
    if (cid != kBackgroundClass) fg_class = cid;
  }
  for (int plane = 0; plane < 2; ++plane) {
    const auto& indices =
        tr.ens.by_class.at(plane == 0 ? kBackgroundClass : fg_class);
    std::vector<double> vals(indices.size());
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double gf = dfused.at(plane, y, x);
        if (gf == 0.0) continue;
        double m = -1e300;
        for (size_t i = 0; i < indices.size(); ++i) {
          vals[i] = tr.sims.at(indices[i], y, x);
          m = std::max(m, vals[i]);
        }
        double z = 0.0;
        for (double v : vals) z += std::exp(v - m);
        const double fused = tr.fused.at(plane, y, x);
        for (size_t i = 0; i < indices.size(); ++i) {
          const double sigma = std::exp(vals[i] - m) / z;
          dsims.at(indices[i], y, x) = gf * sigma * (1.0 + vals[i] - fused);
        }
      }
    }
  }

  Tensor dprotos({kn, tr.protos_mat.dim(1)});
  kernels::cosine_similarity_stack_backward(tr.protos_mat, tr.fq, tr.cfg.alpha,
                                            dsims, dprotos, dfq);

  // Route prototype gradients back into the support feature map.
  const int d = tr.fs.dim(0), hf = tr.fs.dim(1), wf = tr.fs.dim(2);
  const int lh = tr.cfg.window_h, lw = tr.cfg.window_w;
  const double inv = 1.0 / (lh * lw);
  for (int k = 0; k < kn; ++k) {
    const Prototype& p =
        tr.ens.prototypes[static_cast<size_t>(tr.proto_order[static_cast<size_t>(k)])];
    const double* dp = dprotos.data() + static_cast<size_t>(k) * d;
    if (p.kind == PrototypeKind::kLocal) {
      const int y0 = p.win_m * lh, y1 = std::min((p.win_m + 1) * lh, hf);
      const int x0 = p.win_n * lw, x1 = std::min((p.win_n + 1) * lw, wf);
      for (int dd = 0; dd < d; ++dd) {
        const double g = dp[dd] * inv;
        if (g == 0.0) continue;
        for (int y = y0; y < y1; ++y) {
          for (int x = x0; x < x1; ++x) dfs.at(dd, y, x) += g;
        }
      }
    } else {
      for (int dd = 0; dd < d; ++dd) {
        const double g = dp[dd] / p.weight_sum;
        if (g == 0.0) continue;
        for (int y = 0; y < hf; ++y) {
          for (int x = 0; x < wf; ++x) {
            const double wv = p.weights.at(y, x);
            if (wv != 0.0) dfs.at(dd, y, x) += g * wv;
          }
        }
      }
    }
  }
}

}  // namespace alpnet
