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

#include "alpnet/encoder.hpp"

#include <cmath>

#include "alpnet/error.hpp"
#include "alpnet/kernels.hpp"

namespace alpnet {

int EncoderSpec::total_stride() const {
  int s = 1;
  for (int st : strides) s *= st;
  return s;
}

void EncoderSpec::validate() const {
  if (in_channels < 1) throw ValidationError("encoder: in_channels must be >= 1");
  if (channels.empty() || channels.size() != strides.size()) {
    throw ValidationError("encoder: channels and strides must align");
  }
  for (int c : channels) {
    if (c < 1) throw ValidationError("encoder: channel counts must be >= 1");
  }
  for (int s : strides) {
    if (s != 1 && s != 2) throw ValidationError("encoder: strides must be 1 or 2");
  }
}

ConvEncoder::ConvEncoder(EncoderSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  int ic = spec_.in_channels;
  for (size_t l = 0; l < spec_.channels.size(); ++l) {
    const int oc = spec_.channels[l];
    weights_.emplace_back(std::vector<int>{oc, ic, 3, 3});
    biases_.emplace_back(std::vector<int>{oc});
    ic = oc;
  }
}

void ConvEncoder::init_params(Rng& rng) {
  for (Tensor& w : weights_) {
    const int fan_in = w.dim(1) * 9;
    const double limit = std::sqrt(6.0 / fan_in);
    for (int64_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-limit, limit);
  }
  for (Tensor& b : biases_) b.fill(0.0);
}

Tensor ConvEncoder::forward(const Tensor& image, EncoderTrace* trace) const {
  if (image.ndim() != 3 || image.dim(0) != spec_.in_channels) {
    throw ValidationError("encoder: input must be {" +
                          std::to_string(spec_.in_channels) + ",H,W}");
  }
  const int total = spec_.total_stride();
  if (image.dim(1) % total != 0 || image.dim(2) % total != 0) {
    throw ValidationError("encoder: input dims must divide by stride " +
                          std::to_string(total));
  }
  if (trace) {
    trace->inputs.clear();
    trace->outputs.clear();
  }
  Tensor x = image;
  const size_t layers = spec_.channels.size();
  for (size_t l = 0; l < layers; ++l) {
    if (spec_.strides[l] == 2 && (x.dim(1) % 2 != 0 || x.dim(2) % 2 != 0)) {
      throw ValidationError("encoder: odd spatial dim before a stride-2 layer");
    }
    if (trace) trace->inputs.push_back(x);
    Tensor pre;
    kernels::conv2d_forward(x, weights_[l], biases_[l], spec_.strides[l], pre);
    Tensor out;
    if (l + 1 < layers) {
      kernels::relu_forward(pre, out);
    } else {
      out = std::move(pre);
    }
    if (trace) trace->outputs.push_back(out);
    x = std::move(out);
  }
  return x;
}

void ConvEncoder::backward(const EncoderTrace& trace, const Tensor& dout,
                           std::vector<Tensor>& dw,
                           std::vector<Tensor>& db) const {
  const size_t layers = spec_.channels.size();
  if (trace.inputs.size() != layers || trace.outputs.size() != layers) {
    throw ValidationError("encoder: trace does not match network depth");
  }
  Tensor g = dout;
  for (size_t l = layers; l-- > 0;) {
    Tensor gpre;
    if (l + 1 < layers) {
      kernels::relu_backward(trace.outputs[l], g, gpre);
    } else {
      gpre = std::move(g);
    }
    kernels::conv2d_backward_params(gpre, trace.inputs[l], spec_.strides[l],
                                    dw[l], db[l]);
    if (l > 0) {
      kernels::conv2d_backward_input(gpre, weights_[l], spec_.strides[l],
                                     trace.inputs[l].dim(1),
                                     trace.inputs[l].dim(2), g);
    }
  }
}

void ConvEncoder::make_like_params(std::vector<Tensor>& dw,
                                   std::vector<Tensor>& db) const {
  dw.clear();
  db.clear();
  for (const Tensor& w : weights_) dw.emplace_back(w.shape());
  for (const Tensor& b : biases_) db.emplace_back(b.shape());
}

int64_t ConvEncoder::n_params() const {
  int64_t n = 0;
  for (const Tensor& w : weights_) n += w.size();
  for (const Tensor& b : biases_) n += b.size();
  return n;
}

std::vector<double> ConvEncoder::flatten_params() const {
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(n_params()));
  for (const Tensor& w : weights_) {
    flat.insert(flat.end(), w.data(), w.data() + w.size());
  }
  for (const Tensor& b : biases_) {
    flat.insert(flat.end(), b.data(), b.data() + b.size());
  }
  return flat;
}

void ConvEncoder::load_flat_params(const std::vector<double>& flat) {
  if (static_cast<int64_t>(flat.size()) != n_params()) {
    throw ValidationError("encoder: parameter blob size mismatch");
  }
  size_t pos = 0;
  for (Tensor& w : weights_) {
    std::copy(flat.begin() + static_cast<long>(pos),
              flat.begin() + static_cast<long>(pos + static_cast<size_t>(w.size())),
              w.data());
    pos += static_cast<size_t>(w.size());
  }
  for (Tensor& b : biases_) {
    std::copy(flat.begin() + static_cast<long>(pos),
              flat.begin() + static_cast<long>(pos + static_cast<size_t>(b.size())),
              b.data());
    pos += static_cast<size_t>(b.size());
  }
}

}  // namespace alpnet
