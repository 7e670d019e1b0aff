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

#include "alpnet/train.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "alpnet/error.hpp"
#include "alpnet/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace alpnet {

void TrainConfig::validate() const {
  if (iterations < 1) throw ValidationError("train: iterations must be >= 1");
  if (!(lr0 > 0.0)) throw ValidationError("train: lr0 must be > 0");
  if (!(decay > 0.0) || decay > 1.0) {
    throw ValidationError("train: decay must lie in (0,1]");
  }
  if (decay_every < 1) throw ValidationError("train: decay_every must be >= 1");
  if (batch_size < 1) throw ValidationError("train: batch_size must be >= 1");
  if (momentum < 0.0 || momentum >= 1.0) {
    throw ValidationError("train: momentum must lie in [0,1)");
  }
  if (checkpoint_every < 1) {
    throw ValidationError("train: checkpoint_every must be >= 1");
  }
}

double lr_at(const TrainConfig& cfg, int64_t step) {
  return cfg.lr0 * std::pow(cfg.decay, static_cast<double>(step / cfg.decay_every));
}

EpisodeLosses episode_loss_and_grads(const ConvEncoder& enc, const Episode& ep,
                                     const AlpConfig& alp,
                                     const LossConfig& loss_cfg,
                                     ModelGrads* grads) {
  if (ep.support.size() != 1 || ep.query.size() != 1) {
    throw ValidationError("episode_loss_and_grads: expects a 1-shot episode");
  }
  const SupportEntry& sup = ep.support.front();
  const QueryEntry& qry = ep.query.front();
  if (!qry.target_fg) {
    throw ValidationError("episode_loss_and_grads: query target missing");
  }
  const int h = sup.image.dim(1), w = sup.image.dim(2);
  const int stride = enc.stride();

  EncoderTrace trace_s, trace_q;
  const Tensor fs = enc.forward(sup.image, grads ? &trace_s : nullptr);
  const Tensor fq = enc.forward(qry.image, grads ? &trace_q : nullptr);

  const AlpTrace pass_a = alp_forward(fs, sup.fg, fq, stride, alp, h, w);

  EpisodeLosses out;
  Tensor dprobs_a({2, h, w});
  out.seg = grads
                ? seg_loss_backward(pass_a.probs_up, *qry.target_fg, loss_cfg,
                                    dprobs_a)
                : seg_loss(pass_a.probs_up, *qry.target_fg, loss_cfg);

  // Reverse task: the hard query prediction becomes the support mask and
  // the original support image the query.
  Tensor yhat({h, w});
  double yhat_sum = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v =
          pass_a.probs_up.at(1, y, x) > pass_a.probs_up.at(0, y, x) ? 1.0 : 0.0;
      yhat.at(y, x) = v;
      yhat_sum += v;
    }
  }
  const bool degenerate_reverse =
      yhat_sum == 0.0 || yhat_sum == static_cast<double>(h) * w;

  AlpTrace pass_b;
  Tensor dprobs_b({2, h, w});
  if (!degenerate_reverse) {
    pass_b = alp_forward(fq, yhat, fs, stride, alp, h, w);
    out.reg = grads ? seg_loss_backward(pass_b.probs_up, sup.fg, loss_cfg,
                                        dprobs_b)
                    : seg_loss(pass_b.probs_up, sup.fg, loss_cfg);
  } else {
    out.reg = 0.0;
    out.reg_skipped = true;
  }
  out.total = total_loss(out.seg, out.reg, loss_cfg);

  if (grads) {
    Tensor dfs(fs.shape()), dfq(fq.shape());
    alp_backward(pass_a, dprobs_a, dfs, dfq);
    if (!out.reg_skipped && loss_cfg.lambda_reg != 0.0) {
      for (int64_t i = 0; i < dprobs_b.size(); ++i) {
        dprobs_b[i] *= loss_cfg.lambda_reg;
      }
      // pass_b swaps roles: its support features are fq, its query is fs.
      alp_backward(pass_b, dprobs_b, dfq, dfs);
    }
    enc.backward(trace_s, dfs, grads->dw, grads->db);
    enc.backward(trace_q, dfq, grads->dw, grads->db);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint I/O
// ---------------------------------------------------------------------------

namespace {

constexpr char kCkptMagic[8] = {'A', 'L', 'P', 'C', 'K', 'P', 'T', '1'};

void write_blob(const std::string& path, const std::vector<double>& params,
                const std::vector<double>& momentum) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("checkpoint: cannot write " + path);
  out.write(kCkptMagic, 8);
  const uint64_t np = params.size(), nm = momentum.size();
  out.write(reinterpret_cast<const char*>(&np), 8);
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(np * sizeof(double)));
  out.write(reinterpret_cast<const char*>(&nm), 8);
  out.write(reinterpret_cast<const char*>(momentum.data()),
            static_cast<std::streamsize>(nm * sizeof(double)));
  if (!out) throw IoError("checkpoint: short write to " + path);
}

void read_blob(const std::string& path, std::vector<double>& params,
               std::vector<double>& momentum) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot read " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kCkptMagic, 8) != 0) {
    throw IoError("checkpoint: bad magic in " + path);
  }
  uint64_t np = 0, nm = 0;
  in.read(reinterpret_cast<char*>(&np), 8);
  params.resize(np);
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(np * sizeof(double)));
  in.read(reinterpret_cast<char*>(&nm), 8);
  momentum.resize(nm);
  in.read(reinterpret_cast<char*>(momentum.data()),
          static_cast<std::streamsize>(nm * sizeof(double)));
  if (!in) throw IoError("checkpoint: truncated blob " + path);
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::string& base_path) {
  const std::string bin = base_path + ".bin";
  write_blob(bin, ck.params, ck.momentum);
  json meta{{"format", "alpnet-checkpoint-v1"},
            {"encoder", ck.encoder_spec},
            {"alp_train", ck.alp_train},
            {"alp_infer", ck.alp_infer},
            {"iteration", ck.iteration},
            {"rng_state", ck.rng_state},
            {"config_hash", ck.config_hash},
            {"class_vocabulary", ck.class_vocab},
            {"n_params", ck.params.size()},
            {"params_file", fs::path(bin).filename().string()}};
  std::ofstream out(base_path + ".json");
  if (!out) throw IoError("checkpoint: cannot write " + base_path + ".json");
  out << meta.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::string base = path;
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json") {
    base = base.substr(0, base.size() - 5);
  }
  std::ifstream in(base + ".json");
  if (!in) throw IoError("checkpoint: cannot open " + base + ".json");
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw IoError("checkpoint: bad metadata: " + std::string(e.what()));
  }
  Checkpoint ck;
  ck.encoder_spec = meta.at("encoder").get<EncoderSpec>();
  ck.alp_train = meta.at("alp_train").get<AlpConfig>();
  ck.alp_infer = meta.at("alp_infer").get<AlpConfig>();
  ck.iteration = meta.at("iteration").get<int64_t>();
  ck.rng_state = meta.value("rng_state", "");
  ck.config_hash = meta.value("config_hash", "");
  if (meta.contains("class_vocabulary")) {
    ck.class_vocab = meta.at("class_vocabulary").get<std::map<std::string, int>>();
  }
  const std::string blob =
      (fs::path(base).parent_path() / meta.at("params_file").get<std::string>())
          .string();
  read_blob(blob, ck.params, ck.momentum);
  return ck;
}

// ---------------------------------------------------------------------------
// Episodic training loop
// ---------------------------------------------------------------------------

namespace {

struct EligibleSlice {
  const Volume* volume;
  const SlicePseudolabels* labels;
  int slice;
};

std::vector<EligibleSlice> collect_eligible(const TrainData& data) {
  std::vector<EligibleSlice> out;
  for (const std::string& id : data.split->train_ids) {
    const Volume* vol = nullptr;
    for (const Volume& v : *data.dataset) {
      if (v.id == id) vol = &v;
    }
    if (vol == nullptr) {
      throw ValidationError("train: split references unknown volume " + id);
    }
    auto it = data.stores->find(id);
    if (it == data.stores->end()) {
      throw ValidationError("train: pseudolabel store missing for volume " + id +
                            " (run gen-superpixels first)");
    }
    const PseudolabelSet& set = it->second;
    if (static_cast<int>(set.slices.size()) != vol->n_slices()) {
      throw ValidationError("train: store slice count mismatch for " + id);
    }
    for (int s = 0; s < vol->n_slices(); ++s) {
      const SlicePseudolabels& sp = set.slices[static_cast<size_t>(s)];
      if (sp.degenerate || sp.masks.empty()) continue;
      if (data.split->is_excluded(id, s)) continue;
      out.push_back({vol, &sp, s});
    }
  }
  return out;
}

}  // namespace

TrainResult train_ssl(ConvEncoder& enc, const TrainData& data,
                      const TrainOptions& opts) {
  opts.train.validate();
  opts.alp_train.validate();
  opts.loss.validate();
  opts.transforms.validate();
  if (data.dataset == nullptr || data.split == nullptr || data.stores == nullptr) {
    throw ValidationError("train: missing dataset/split/stores");
  }

  const std::vector<EligibleSlice> eligible = collect_eligible(data);
  if (eligible.empty()) {
    throw ValidationError("train: no eligible slices to sample from");
  }

  fs::create_directories(opts.out_dir);
  const std::string ckpt_base = (fs::path(opts.out_dir) / "checkpoint").string();
  const std::string log_path = (fs::path(opts.out_dir) / "train_log.jsonl").string();

  Rng rng(opts.train.seed);
  int64_t start_step = 0;
  std::vector<Tensor> vel_w, vel_b;
  enc.make_like_params(vel_w, vel_b);

  if (!opts.resume_from.empty()) {
    const Checkpoint ck = load_checkpoint(opts.resume_from);
    std::vector<double> flat = ck.params;
    enc.load_flat_params(flat);
    // Momentum shares the flat layout: weights first, then biases.
    size_t pos = 0;
    for (Tensor& v : vel_w) {
      std::copy(ck.momentum.begin() + static_cast<long>(pos),
                ck.momentum.begin() + static_cast<long>(pos + static_cast<size_t>(v.size())),
                v.data());
      pos += static_cast<size_t>(v.size());
    }
    for (Tensor& v : vel_b) {
      std::copy(ck.momentum.begin() + static_cast<long>(pos),
                ck.momentum.begin() + static_cast<long>(pos + static_cast<size_t>(v.size())),
                v.data());
      pos += static_cast<size_t>(v.size());
    }
    rng.load_state(ck.rng_state);
    start_step = ck.iteration;
  }

  std::ofstream log(log_path, start_step > 0 ? std::ios::app : std::ios::trunc);
  if (!log) throw IoError("train: cannot open log " + log_path);

  auto write_checkpoint = [&](int64_t step) {
    Checkpoint ck;
    ck.encoder_spec = enc.spec();
    ck.params = enc.flatten_params();
    ck.momentum.clear();
    for (const Tensor& v : vel_w) {
      ck.momentum.insert(ck.momentum.end(), v.data(), v.data() + v.size());
    }
    for (const Tensor& v : vel_b) {
      ck.momentum.insert(ck.momentum.end(), v.data(), v.data() + v.size());
    }
    ck.iteration = step;
    ck.rng_state = rng.save_state();
    ck.alp_train = opts.alp_train;
    ck.alp_infer = opts.alp_infer;
    ck.config_hash = opts.config_hash;
    ck.class_vocab = opts.class_vocab;
    save_checkpoint(ck, ckpt_base);
  };

  TrainResult result;
  ModelGrads grads;
  enc.make_like_params(grads.dw, grads.db);

  for (int64_t step = start_step; step < opts.train.iterations; ++step) {
    const double lr = lr_at(opts.train, step);
    for (Tensor& g : grads.dw) g.fill(0.0);
    for (Tensor& g : grads.db) g.fill(0.0);

    double seg_sum = 0.0, reg_sum = 0.0, total_sum = 0.0;
    for (int b = 0; b < opts.train.batch_size; ++b) {
      std::optional<Episode> ep;
      for (int attempt = 0; attempt < opts.train.max_episode_retries; ++attempt) {
        const auto& pick = eligible[static_cast<size_t>(
            rng.uniform_int(0, static_cast<int64_t>(eligible.size()) - 1))];
        const SliceSample sample = make_slice_sample(*pick.volume, pick.slice);
        ep = compose_ssl_episode(sample, *pick.labels, opts.transforms, rng);
        if (ep) break;
      }
      if (!ep) {
        throw std::runtime_error(
            "train: failed to compose an episode after retries");
      }
      const EpisodeLosses losses =
          episode_loss_and_grads(enc, *ep, opts.alp_train, opts.loss, &grads);
      if (!std::isfinite(losses.total)) {
        json dump{{"iteration", step + 1},
                  {"loss_seg", losses.seg},
                  {"loss_reg", losses.reg},
                  {"lr", lr}};
        std::ofstream d(fs::path(opts.out_dir) / "divergence_dump.json");
        d << dump.dump(2) << "\n";
        throw std::runtime_error("train: non-finite loss at iteration " +
                                 std::to_string(step + 1));
      }
      seg_sum += losses.seg;
      reg_sum += losses.reg;
      total_sum += losses.total;
    }

    const double inv_b = 1.0 / opts.train.batch_size;
    for (size_t l = 0; l < grads.dw.size(); ++l) {
      Tensor& vw = vel_w[l];
      Tensor& w = enc.weights()[l];
      for (int64_t i = 0; i < vw.size(); ++i) {
        vw[i] = opts.train.momentum * vw[i] + grads.dw[l][i] * inv_b;
        w[i] -= lr * vw[i];
      }
      Tensor& vb = vel_b[l];
      Tensor& bb = enc.biases()[l];
      for (int64_t i = 0; i < vb.size(); ++i) {
        vb[i] = opts.train.momentum * vb[i] + grads.db[l][i] * inv_b;
        bb[i] -= lr * vb[i];
      }
    }

    const json line{{"iter", step + 1},
                    {"lr", lr},
                    {"loss_seg", seg_sum * inv_b},
                    {"loss_reg", reg_sum * inv_b},
                    {"loss_total", total_sum * inv_b},
                    {"episode_provenance", "ssl"}};
    log << line.dump() << "\n";
    result.loss_trace.push_back(total_sum * inv_b);

    if ((step + 1) % opts.train.checkpoint_every == 0 ||
        step + 1 == opts.train.iterations) {
      write_checkpoint(step + 1);
    }
    if (!opts.quiet && ((step + 1) % 500 == 0 || step == start_step)) {
      std::cout << "[train] iter " << (step + 1) << "/" << opts.train.iterations
                << " lr " << lr << " loss " << total_sum * inv_b << "\n";
    }
  }
  log.flush();

  result.checkpoint_path = ckpt_base + ".json";
  result.log_path = log_path;
  result.iterations_run = opts.train.iterations - start_step;
  return result;
}

}  // namespace alpnet
