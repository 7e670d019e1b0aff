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

#ifndef ALPNET_ENCODER_HPP_
#define ALPNET_ENCODER_HPP_

#include <cstdint>
#include <vector>

#include "alpnet/rng.hpp"
#include "alpnet/tensor.hpp"

namespace alpnet {

/// Feature extractor interface: image {3,H,W} -> feature map {D,H/s,W/s}.
class Encoder {
public:
  virtual ~Encoder() = default;
  virtual Tensor encode(const Tensor& image) const = 0;
  virtual int stride() const = 0;
  virtual int depth() const = 0;
};

/// Stack of 3x3 convolutions; ReLU after every layer but the last.
struct EncoderSpec {
  int in_channels = 3;
  std::vector<int> channels = {16, 32, 64, 64};
  std::vector<int> strides = {2, 1, 2, 1};

  int total_stride() const;
  int depth() const { return channels.back(); }
  void validate() const;
};

struct EncoderTrace {
  std::vector<Tensor> inputs;   // conv input per layer
  std::vector<Tensor> outputs;  // post-activation output per layer
};

class ConvEncoder : public Encoder {
public:
  explicit ConvEncoder(EncoderSpec spec);

  /// He-uniform weights, zero biases.
  void init_params(Rng& rng);

  Tensor forward(const Tensor& image, EncoderTrace* trace = nullptr) const;
  Tensor encode(const Tensor& image) const override { return forward(image); }
  int stride() const override { return spec_.total_stride(); }
  int depth() const override { return spec_.depth(); }
  const EncoderSpec& spec() const { return spec_; }

  /// Backprop through the trace; dOut is the gradient at the feature map.
  /// dw/db are accumulated into (same layout as weights()/biases()).
  void backward(const EncoderTrace& trace, const Tensor& dout,
                std::vector<Tensor>& dw, std::vector<Tensor>& db) const;

  std::vector<Tensor>& weights() { return weights_; }
  std::vector<Tensor>& biases() { return biases_; }
  const std::vector<Tensor>& weights() const { return weights_; }
  const std::vector<Tensor>& biases() const { return biases_; }

  /// Zero-initialized gradient (or momentum) buffers matching the params.
  void make_like_params(std::vector<Tensor>& dw, std::vector<Tensor>& db) const;

  int64_t n_params() const;
  std::vector<double> flatten_params() const;
  void load_flat_params(const std::vector<double>& flat);

private:
  EncoderSpec spec_;
  std::vector<Tensor> weights_;  // {oc,ic,3,3} per layer
  std::vector<Tensor> biases_;   // {oc} per layer
};

}  // namespace alpnet

#endif  // ALPNET_ENCODER_HPP_
