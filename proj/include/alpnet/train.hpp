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

#ifndef ALPNET_TRAIN_HPP_
#define ALPNET_TRAIN_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "alpnet/alp.hpp"
#include "alpnet/encoder.hpp"
#include "alpnet/episode.hpp"
#include "alpnet/loss.hpp"
#include "alpnet/split.hpp"

namespace alpnet {

struct TrainConfig {
  int64_t iterations = 10000;
  double lr0 = 0.001;
  double decay = 0.98;
  int64_t decay_every = 1000;
  int batch_size = 1;
  double momentum = 0.9;
  uint64_t seed = 1234;
  int64_t checkpoint_every = 1000;
  int max_episode_retries = 100;

  void validate() const;
};

/// Stepped schedule: lr0 * decay^floor(step / decay_every), step 0-based.
double lr_at(const TrainConfig& cfg, int64_t step);

struct EpisodeLosses {
  double seg = 0.0;
  double reg = 0.0;
  double total = 0.0;
  bool reg_skipped = false;  // reverse-support foreground was empty
};

struct ModelGrads {
  std::vector<Tensor> dw, db;
};

/// Segmentation loss plus the alignment term for one 1-shot episode
/// (prediction-as-support re-segmentation of the original support).
/// When grads is non-null, parameter gradients of the total loss are
/// accumulated into it.
EpisodeLosses episode_loss_and_grads(const ConvEncoder& enc, const Episode& ep,
                                     const AlpConfig& alp,
                                     const LossConfig& loss_cfg,
                                     ModelGrads* grads);

// --------------------------------------------------------------------------
// Checkpoints: <base>.json metadata + <base>.bin params/momentum payload.
// --------------------------------------------------------------------------
struct Checkpoint {
  EncoderSpec encoder_spec;
  std::vector<double> params;
  std::vector<double> momentum;
  int64_t iteration = 0;
  std::string rng_state;
  AlpConfig alp_train;
  AlpConfig alp_infer;
  std::string config_hash;
  std::map<std::string, int> class_vocab;
};

void save_checkpoint(const Checkpoint& ck, const std::string& base_path);
Checkpoint load_checkpoint(const std::string& path);  // base or .json path

// --------------------------------------------------------------------------
// Episodic SSL training loop
// --------------------------------------------------------------------------
struct TrainData {
  const std::vector<Volume>* dataset = nullptr;
  const DatasetSplit* split = nullptr;
  const std::map<std::string, PseudolabelSet>* stores = nullptr;
};

struct TrainOptions {
  TransformConfig transforms;
  AlpConfig alp_train;
  AlpConfig alp_infer;
  LossConfig loss;
  TrainConfig train;
  std::string out_dir;
  std::string config_hash;
  std::map<std::string, int> class_vocab;
  std::string resume_from;  // checkpoint path; "" trains from scratch
  bool quiet = false;
};

struct TrainResult {
  std::string checkpoint_path;
  std::string log_path;
  std::vector<double> loss_trace;
  int64_t iterations_run = 0;
};

/// Runs the episodic loop: sample slice -> compose SSL episode -> forward ->
/// loss -> SGD step. Single-worker and bit-deterministic for a fixed seed.
/// Non-finite losses abort with a diagnostic dump.
TrainResult train_ssl(ConvEncoder& enc, const TrainData& data,
                      const TrainOptions& opts);

}  // namespace alpnet

#endif  // ALPNET_TRAIN_HPP_
