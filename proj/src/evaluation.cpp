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

#include "alpnet/evaluation.hpp"

#include <algorithm>

#include "alpnet/episode.hpp"
#include "alpnet/error.hpp"

using nlohmann::json;

namespace alpnet {

double dice(const Tensor& pred, const Tensor& gt) {
  if (!pred.same_shape(gt)) throw ValidationError("dice: shape mismatch");
  if (!tensor_is_binary(pred) || !tensor_is_binary(gt)) {
    throw ValidationError("dice: masks must be binary");
  }
  double inter = 0.0, a = 0.0, b = 0.0;
  for (int64_t i = 0; i < pred.size(); ++i) {
    inter += pred[i] * gt[i];
    a += pred[i];
    b += gt[i];
  }
  if (a + b == 0.0) return 100.0;  // both empty
  return 100.0 * 2.0 * inter / (a + b);
}

namespace {

// Inclusive slice extent [lo, hi] of a class; throws when absent.
void class_extent(const Volume& vol, int class_id, int& lo, int& hi) {
  lo = -1;
  hi = -1;
  for (int s = 0; s < vol.n_slices(); ++s) {
    if (vol.slice_contains_class(class_id, s)) {
      if (lo < 0) lo = s;
      hi = s;
    }
  }
  if (lo < 0) {
    throw ValidationError("chunk protocol: class " + std::to_string(class_id) +
                          " absent from volume " + vol.id);
  }
}

// Splits [lo, hi] into n contiguous ranges, longer ones first.
std::vector<std::pair<int, int>> split_extent(int lo, int hi, int n) {
  const int len = hi - lo + 1;
  const int base = len / n, rem = len % n;
  std::vector<std::pair<int, int>> out;
  int start = lo;
  for (int c = 0; c < n; ++c) {
    const int sz = base + (c < rem ? 1 : 0);
    out.emplace_back(start, start + sz - 1);
    start += sz;
  }
  return out;
}

}  // namespace

ChunkAssignment assign_chunks(const Volume& support_vol, const Volume& query_vol,
                              int class_id, int chunks,
                              bool allow_same_volume) {
  if (chunks < 1) throw ValidationError("assign_chunks: chunks must be >= 1");
  if (!allow_same_volume && support_vol.id == query_vol.id) {
    throw ValidationError(
        "assign_chunks: support and query must come from different volumes");
  }
  ChunkAssignment ca;
  ca.class_id = class_id;
  ca.support_id = support_vol.id;
  ca.query_id = query_vol.id;
  ca.chunks = chunks;
  class_extent(support_vol, class_id, ca.support_lo, ca.support_hi);
  class_extent(query_vol, class_id, ca.query_lo, ca.query_hi);
  const int s_len = ca.support_hi - ca.support_lo + 1;
  const int q_len = ca.query_hi - ca.query_lo + 1;
  if (chunks > s_len || chunks > q_len) {
    throw ValidationError("assign_chunks: C exceeds the class extent length");
  }
  for (const auto& [a, b] : split_extent(ca.support_lo, ca.support_hi, chunks)) {
    ca.support_slices.push_back((a + b) / 2);
  }
  ca.query_ranges = split_extent(ca.query_lo, ca.query_hi, chunks);
  return ca;
}

ClassEval evaluate_class(const Encoder& enc, const AlpConfig& alp,
                         const Volume& support_vol, const Volume& query_vol,
                         int class_id, int chunks, bool allow_same_volume) {
  const ChunkAssignment ca =
      assign_chunks(support_vol, query_vol, class_id, chunks, allow_same_volume);
  const int h = query_vol.height(), w = query_vol.width();
  const int extent_len = ca.query_hi - ca.query_lo + 1;

  ClassEval eval;
  eval.extent_lo = ca.query_lo;
  eval.extent_hi = ca.query_hi;
  eval.pred = Tensor({extent_len, h, w});

  for (int c = 0; c < chunks; ++c) {
    const int s_slice = ca.support_slices[static_cast<size_t>(c)];
    const SliceSample s_sample = make_slice_sample(support_vol, s_slice);
    const Tensor s_mask = support_vol.label_slice(class_id, s_slice);

    std::vector<Tensor> query_images;
    const auto [q_lo, q_hi] = ca.query_ranges[static_cast<size_t>(c)];
    for (int q = q_lo; q <= q_hi; ++q) {
      query_images.push_back(make_slice_sample(query_vol, q).image);
    }
    const Episode ep = compose_inference_episode({{s_sample.image, s_mask}},
                                                 query_images, class_id);

    const Tensor sf = enc.encode(ep.support.front().image);
    const PrototypeEnsemble ens =
        build_ensemble({sf}, {ep.support.front().fg}, enc.stride(), alp, class_id);

    for (int q = q_lo; q <= q_hi; ++q) {
      const Tensor qf = enc.encode(ep.query[static_cast<size_t>(q - q_lo)].image);
      const Prediction pred = predict(ens, qf, h, w, alp.alpha);
      // plane order is ascending class id; background (0) is plane 0
      const int fg_plane = static_cast<int>(
          std::find(pred.class_ids.begin(), pred.class_ids.end(), class_id) -
          pred.class_ids.begin());
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double p_fg = pred.probs.at(fg_plane, y, x);
          const double p_bg = pred.probs.at(1 - fg_plane, y, x);
          eval.pred.at(q - ca.query_lo, y, x) = p_fg > p_bg ? 1.0 : 0.0;
        }
      }
    }
  }

  Tensor gt({extent_len, h, w});
  for (int q = ca.query_lo; q <= ca.query_hi; ++q) {
    const Tensor plane = query_vol.label_slice(class_id, q);
    std::copy(plane.data(), plane.data() + plane.size(),
              gt.data() + static_cast<size_t>(q - ca.query_lo) * h * w);
  }
  eval.dice_score = dice(eval.pred, gt);
  return eval;
}

json EvalReport::to_json() const {
  json classes = json::object();
  for (const auto& [cid, queries] : per_query) {
    json q = json::object();
    for (const auto& [qid, d] : queries) q[qid] = d;
    classes[std::to_string(cid)] = json{{"per_query", q},
                                        {"mean", class_mean.at(cid)}};
  }
  return json{{"format", "alpnet-eval-report-v1"},
              {"classes", classes},
              {"global_mean", global_mean},
              {"chunks", chunks},
              {"fold", fold},
              {"setting", setting},
              {"seed", seed},
              {"extent_from_query_labels", extent_from_query_labels},
              {"config", config_snapshot},
              {"config_hash", config_hash}};
}

EvalReport run_evaluation(const Encoder& enc, const AlpConfig& alp,
                          const std::vector<Volume>& dataset,
                          const DatasetSplit& split,
                          const std::vector<int>& classes, int chunks,
                          const PairCallback& on_pair) {
  std::vector<const Volume*> test_vols;
  for (const std::string& id : split.test_ids) {
    for (const Volume& v : dataset) {
      if (v.id == id) test_vols.push_back(&v);
    }
  }
  if (test_vols.size() < 2) {
    throw ValidationError("run_evaluation: need >= 2 test volumes for pairing");
  }

  EvalReport report;
  report.chunks = chunks;
  report.fold = split.fold;
  report.setting = split.setting;

  double global_acc = 0.0;
  int global_n = 0;
  for (int cid : classes) {
    for (const Volume* query : test_vols) {
      if (query->labels.count(cid) == 0) continue;
      double acc = 0.0;
      int n = 0;
      for (const Volume* support : test_vols) {
        if (support == query || support->labels.count(cid) == 0) continue;
        const ClassEval ev = evaluate_class(enc, alp, *support, *query, cid, chunks);
        if (on_pair) on_pair(cid, support->id, query->id, ev);
        acc += ev.dice_score;
        ++n;
      }
      if (n > 0) report.per_query[cid][query->id] = acc / n;
    }
    const auto it = report.per_query.find(cid);
    if (it == report.per_query.end() || it->second.empty()) {
      throw ValidationError("run_evaluation: class " + std::to_string(cid) +
                            " has no evaluable volume pairs");
    }
    double acc = 0.0;
    for (const auto& [qid, d] : it->second) {
      (void)qid;
      acc += d;
    }
    report.class_mean[cid] = acc / static_cast<double>(it->second.size());
    global_acc += report.class_mean[cid];
    ++global_n;
  }
  report.global_mean = global_n > 0 ? global_acc / global_n : 0.0;
  return report;
}

}  // namespace alpnet
