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

#ifndef ALPNET_TENSOR_HPP_
#define ALPNET_TENSOR_HPP_

#include <cassert>
#include <cstdint>
#include <vector>

namespace alpnet {

/// Dense row-major tensor of doubles, rank 1-4. All numeric state in the
/// pipeline (slices, masks, feature maps, parameters) lives in these.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(count(shape_), 0.0);
  }
  static Tensor full(std::vector<int> shape, double value) {
    Tensor t(std::move(shape));
    for (double& v : t.data_) v = value;
    return t;
  }

  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  const std::vector<int>& shape() const { return shape_; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  double& at(int i) {
    assert(ndim() == 1);
    return data_[static_cast<size_t>(i)];
  }
  double at(int i) const {
    assert(ndim() == 1);
    return data_[static_cast<size_t>(i)];
  }
  double& at(int i, int j) {
    assert(ndim() == 2);
    return data_[static_cast<size_t>(i) * shape_[1] + j];
  }
  double at(int i, int j) const {
    assert(ndim() == 2);
    return data_[static_cast<size_t>(i) * shape_[1] + j];
  }
  double& at(int i, int j, int k) {
    assert(ndim() == 3);
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  double at(int i, int j, int k) const {
    assert(ndim() == 3);
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  double& at(int i, int j, int k, int l) {
    assert(ndim() == 4);
    return data_[((static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k) *
                     shape_[3] +
                 l];
  }
  double at(int i, int j, int k, int l) const {
    assert(ndim() == 4);
    return data_[((static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k) *
                     shape_[3] +
                 l];
  }

  void fill(double v) {
    for (double& x : data_) x = v;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool operator==(const Tensor& o) const {
    return shape_ == o.shape_ && data_ == o.data_;
  }

private:
  static size_t count(const std::vector<int>& shape) {
    size_t n = 1;
    for (int d : shape) {
      assert(d >= 0);
      n *= static_cast<size_t>(d);
    }
    return shape.empty() ? 0 : n;
  }

  std::vector<int> shape_;
  std::vector<double> data_;
};

/// Elementwise helpers used across modules.
double tensor_min(const Tensor& t);
double tensor_max(const Tensor& t);
double tensor_sum(const Tensor& t);
bool tensor_all_finite(const Tensor& t);
/// True when every element is exactly 0.0 or 1.0.
bool tensor_is_binary(const Tensor& t);
/// Max |a - b| over all elements; shapes must match.
double tensor_max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace alpnet

#endif  // ALPNET_TENSOR_HPP_
