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

#ifndef ALPNET_KERNELS_HPP_
#define ALPNET_KERNELS_HPP_

#include "alpnet/tensor.hpp"

namespace alpnet::kernels {

// All kernels are deterministic regardless of thread count: every output
// element is produced by exactly one thread as a sequential sum, so the
// OpenMP versions are bit-identical to the serial references.

/// Number of OpenMP threads the parallel kernels will use (1 without OpenMP).
int thread_count();

// ---------------------------------------------------------------------------
// Convolution, fixed 3x3 kernel, zero padding 1, stride 1 or 2.
// x: {IC,H,W}  w: {OC,IC,3,3}  b: {OC}  y: {OC,OH,OW},
// OH = (H-1)/stride + 1.
// ---------------------------------------------------------------------------
void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                    int stride, Tensor& y);
/// dx is overwritten.
void conv2d_backward_input(const Tensor& dy, const Tensor& w, int stride,
                           int in_h, int in_w, Tensor& dx);
/// dw/db are accumulated into (caller zero-initializes).
void conv2d_backward_params(const Tensor& dy, const Tensor& x, int stride,
                            Tensor& dw, Tensor& db);

void relu_forward(const Tensor& x, Tensor& y);
/// dx = dy where the post-activation y is positive, else 0.
void relu_backward(const Tensor& y, const Tensor& dy, Tensor& dx);

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

/// Exact block mean over factor x factor tiles; dims must divide.
void avg_pool_factor(const Tensor& x, int factor, Tensor& y);

/// Half-pixel-center bilinear resize of a {H,W} or {C,H,W} tensor, borders
/// clamped. Convex weights, so per-pixel simplexes survive resizing.
void bilinear_resize(const Tensor& x, int out_h, int out_w, Tensor& y);
/// Transpose of bilinear_resize; dx is overwritten.
void bilinear_resize_backward(const Tensor& dy, int in_h, int in_w,
                              Tensor& dx);

void nearest_resize(const Tensor& x, int out_h, int out_w, Tensor& y);

/// Separable Gaussian, radius ceil(4*sigma), clamp-to-edge. sigma <= 0 copies.
void gaussian_blur(const Tensor& x, double sigma, Tensor& y);

enum class Interp { kBilinear, kNearest };

/// Gather remap: y(r,c) = x(map_y(r,c), map_x(r,c)). Out-of-range samples
/// (bilinear taps or nearest centers) read as `fill`.
void remap(const Tensor& x, const Tensor& map_y, const Tensor& map_x,
           Interp interp, double fill, Tensor& y);

// ---------------------------------------------------------------------------
// Prototype similarity
// ---------------------------------------------------------------------------

/// sims(k,h,w) = alpha * cos(protos(k,:), feat(:,h,w)).
/// Either norm below kNormFloor yields similarity 0 (and zero gradient).
inline constexpr double kNormFloor = 1e-12;
void cosine_similarity_stack(const Tensor& protos, const Tensor& feat,
                             double alpha, Tensor& sims);
/// dprotos/dfeat are accumulated into (caller zero-initializes).
void cosine_similarity_stack_backward(const Tensor& protos, const Tensor& feat,
                                      double alpha, const Tensor& dsims,
                                      Tensor& dprotos, Tensor& dfeat);

// Straightforward single-thread implementations of the parallelized kernels.
// Kept as the correctness reference for tests and the benchmark baseline.
namespace reference {
void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                    int stride, Tensor& y);
void conv2d_backward_input(const Tensor& dy, const Tensor& w, int stride,
                           int in_h, int in_w, Tensor& dx);
void conv2d_backward_params(const Tensor& dy, const Tensor& x, int stride,
                            Tensor& dw, Tensor& db);
void remap(const Tensor& x, const Tensor& map_y, const Tensor& map_x,
           Interp interp, double fill, Tensor& y);
void cosine_similarity_stack(const Tensor& protos, const Tensor& feat,
                             double alpha, Tensor& sims);
void gaussian_blur(const Tensor& x, double sigma, Tensor& y);
}  // namespace reference

}  // namespace alpnet::kernels

#endif  // ALPNET_KERNELS_HPP_
