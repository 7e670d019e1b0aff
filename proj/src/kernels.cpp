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

#include "alpnet/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "alpnet/error.hpp"

namespace alpnet::kernels {

namespace {

void check_conv_args(const Tensor& x, const Tensor& w, int stride) {
  if (x.ndim() != 3 || w.ndim() != 4) {
    throw ValidationError("conv2d: x must be {IC,H,W}, w must be {OC,IC,3,3}");
  }
  if (w.dim(2) != 3 || w.dim(3) != 3) {
    throw ValidationError("conv2d: only 3x3 kernels supported");
  }
  if (w.dim(1) != x.dim(0)) throw ValidationError("conv2d: channel mismatch");
  if (stride != 1 && stride != 2) {
    throw ValidationError("conv2d: stride must be 1 or 2");
  }
}

inline int conv_out_dim(int in, int stride) { return (in - 1) / stride + 1; }

// Valid output-column range for tap kx: ix = ox*stride + kx - 1 in [0, w).
inline void tap_range(int kx, int stride, int in_w, int out_w, int& lo,
                      int& hi) {
  lo = (kx == 0) ? 1 : 0;
  hi = std::min(out_w, (in_w - kx) / stride + 1);
}

}  // namespace

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                    int stride, Tensor& y) {
  check_conv_args(x, w, stride);
  const int ic_n = x.dim(0), in_h = x.dim(1), in_w = x.dim(2);
  const int oc_n = w.dim(0);
  const int oh = conv_out_dim(in_h, stride), ow = conv_out_dim(in_w, stride);
  if (y.ndim() != 3 || y.dim(0) != oc_n || y.dim(1) != oh || y.dim(2) != ow) {
    y = Tensor({oc_n, oh, ow});
  }
  const double* xd = x.data();
  const double* wd = w.data();
  const double* bd = b.data();
  double* yd = y.data();
  const size_t xplane_n = static_cast<size_t>(in_h) * in_w;
  const size_t yplane_n = static_cast<size_t>(oh) * ow;

#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < oc_n; ++oc) {
    double* yplane = yd + static_cast<size_t>(oc) * yplane_n;
    std::fill(yplane, yplane + yplane_n, bd[oc]);
    for (int ic = 0; ic < ic_n; ++ic) {
      const double* xplane = xd + static_cast<size_t>(ic) * xplane_n;
      const double* wk = wd + (static_cast<size_t>(oc) * ic_n + ic) * 9;
      for (int oy = 0; oy < oh; ++oy) {
        double* yrow = yplane + static_cast<size_t>(oy) * ow;
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= in_h) continue;
          const double* xrow = xplane + static_cast<size_t>(iy) * in_w;
          for (int kx = 0; kx < 3; ++kx) {
            const double wv = wk[ky * 3 + kx];
            int lo, hi;
            tap_range(kx, stride, in_w, ow, lo, hi);
            const double* xoff = xrow + (kx - 1);
            if (stride == 1) {
              for (int ox = lo; ox < hi; ++ox) yrow[ox] += wv * xoff[ox];
            } else {
              for (int ox = lo; ox < hi; ++ox) yrow[ox] += wv * xoff[2 * ox];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward_input(const Tensor& dy, const Tensor& w, int stride,
                           int in_h, int in_w, Tensor& dx) {
  const int oc_n = w.dim(0), ic_n = w.dim(1);
  const int oh = dy.dim(1), ow = dy.dim(2);
  if (dx.ndim() != 3 || dx.dim(0) != ic_n || dx.dim(1) != in_h ||
      dx.dim(2) != in_w) {
    dx = Tensor({ic_n, in_h, in_w});
  }
  const double* dyd = dy.data();
  const double* wd = w.data();
  double* dxd = dx.data();
  const size_t dxplane_n = static_cast<size_t>(in_h) * in_w;
  const size_t dyplane_n = static_cast<size_t>(oh) * ow;

#pragma omp parallel for schedule(static)
  for (int ic = 0; ic < ic_n; ++ic) {
    double* dxplane = dxd + static_cast<size_t>(ic) * dxplane_n;
    std::fill(dxplane, dxplane + dxplane_n, 0.0);
    for (int oc = 0; oc < oc_n; ++oc) {
      const double* dyplane = dyd + static_cast<size_t>(oc) * dyplane_n;
      const double* wk = wd + (static_cast<size_t>(oc) * ic_n + ic) * 9;
      for (int oy = 0; oy < oh; ++oy) {
        const double* dyrow = dyplane + static_cast<size_t>(oy) * ow;
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= in_h) continue;
          double* dxrow = dxplane + static_cast<size_t>(iy) * in_w;
          for (int kx = 0; kx < 3; ++kx) {
            const double wv = wk[ky * 3 + kx];
            int lo, hi;
            tap_range(kx, stride, in_w, ow, lo, hi);
            double* dxoff = dxrow + (kx - 1);
            if (stride == 1) {
              for (int ox = lo; ox < hi; ++ox) dxoff[ox] += wv * dyrow[ox];
            } else {
              for (int ox = lo; ox < hi; ++ox) dxoff[2 * ox] += wv * dyrow[ox];
            }
          }
        }
      }
    }
  }
}

void conv2d_backward_params(const Tensor& dy, const Tensor& x, int stride,
                            Tensor& dw, Tensor& db) {
  const int ic_n = x.dim(0), in_h = x.dim(1), in_w = x.dim(2);
  const int oc_n = dy.dim(0), oh = dy.dim(1), ow = dy.dim(2);
  const double* dyd = dy.data();
  const double* xd = x.data();
  double* dwd = dw.data();
  double* dbd = db.data();
  const size_t xplane_n = static_cast<size_t>(in_h) * in_w;
  const size_t dyplane_n = static_cast<size_t>(oh) * ow;

#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < oc_n; ++oc) {
    const double* dyplane = dyd + static_cast<size_t>(oc) * dyplane_n;
    double bacc = 0.0;
    for (size_t i = 0; i < dyplane_n; ++i) bacc += dyplane[i];
    dbd[oc] += bacc;
    for (int ic = 0; ic < ic_n; ++ic) {
      const double* xplane = xd + static_cast<size_t>(ic) * xplane_n;
      double* dwk = dwd + (static_cast<size_t>(oc) * ic_n + ic) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          int lo, hi;
          tap_range(kx, stride, in_w, ow, lo, hi);
          double acc = 0.0;
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= in_h) continue;
            const double* dyrow = dyplane + static_cast<size_t>(oy) * ow;
            const double* xoff =
                xplane + static_cast<size_t>(iy) * in_w + (kx - 1);
            if (stride == 1) {
              for (int ox = lo; ox < hi; ++ox) acc += dyrow[ox] * xoff[ox];
            } else {
              for (int ox = lo; ox < hi; ++ox) acc += dyrow[ox] * xoff[2 * ox];
            }
          }
          dwk[ky * 3 + kx] += acc;
        }
      }
    }
  }
}

void relu_forward(const Tensor& x, Tensor& y) {
  if (!y.same_shape(x)) y = Tensor(x.shape());
  const int64_t n = x.size();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(const Tensor& y, const Tensor& dy, Tensor& dx) {
  if (!dx.same_shape(y)) dx = Tensor(y.shape());
  const int64_t n = y.size();
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < n; ++i) dx[i] = y[i] > 0.0 ? dy[i] : 0.0;
}

void avg_pool_factor(const Tensor& x, int factor, Tensor& y) {
  if (x.ndim() != 2) throw ValidationError("avg_pool_factor: expected {H,W}");
  const int h = x.dim(0), w = x.dim(1);
  if (factor < 1 || h % factor != 0 || w % factor != 0) {
    throw ValidationError("avg_pool_factor: dims must divide by factor");
  }
  const int oh = h / factor, ow = w / factor;
  y = Tensor({oh, ow});
  const double inv = 1.0 / (factor * factor);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      double acc = 0.0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) {
          acc += x.at(oy * factor + dy, ox * factor + dx);
        }
      }
      y.at(oy, ox) = acc * inv;
    }
  }
}

namespace {

struct LerpIdx {
  int i0, i1;
  double f;  // weight of i1
};

inline LerpIdx lerp_index(int out, int out_n, int in_n) {
  const double s = (out + 0.5) * static_cast<double>(in_n) / out_n - 0.5;
  if (s <= 0.0) return {0, 0, 0.0};
  if (s >= in_n - 1) return {in_n - 1, in_n - 1, 0.0};
  const int i0 = static_cast<int>(s);
  return {i0, i0 + 1, s - i0};
}

void bilinear_plane(const double* x, int h, int w, double* y, int oh, int ow) {
  std::vector<LerpIdx> cols(static_cast<size_t>(ow));
  for (int ox = 0; ox < ow; ++ox) cols[static_cast<size_t>(ox)] = lerp_index(ox, ow, w);
  for (int oy = 0; oy < oh; ++oy) {
    const LerpIdx ry = lerp_index(oy, oh, h);
    const double* r0 = x + static_cast<size_t>(ry.i0) * w;
    const double* r1 = x + static_cast<size_t>(ry.i1) * w;
    double* yrow = y + static_cast<size_t>(oy) * ow;
    for (int ox = 0; ox < ow; ++ox) {
      const LerpIdx& rx = cols[static_cast<size_t>(ox)];
      const double top = r0[rx.i0] * (1.0 - rx.f) + r0[rx.i1] * rx.f;
      const double bot = r1[rx.i0] * (1.0 - rx.f) + r1[rx.i1] * rx.f;
      yrow[ox] = top * (1.0 - ry.f) + bot * ry.f;
    }
  }
}

}  // namespace

void bilinear_resize(const Tensor& x, int out_h, int out_w, Tensor& y) {
  if (x.ndim() == 2) {
    if (x.dim(0) == out_h && x.dim(1) == out_w) {
      y = x;
      return;
    }
    y = Tensor({out_h, out_w});
    bilinear_plane(x.data(), x.dim(0), x.dim(1), y.data(), out_h, out_w);
  } else if (x.ndim() == 3) {
    if (x.dim(1) == out_h && x.dim(2) == out_w) {
      y = x;
      return;
    }
    const int c = x.dim(0), h = x.dim(1), w = x.dim(2);
    y = Tensor({c, out_h, out_w});
    for (int ch = 0; ch < c; ++ch) {
      bilinear_plane(x.data() + static_cast<size_t>(ch) * h * w, h, w,
                     y.data() + static_cast<size_t>(ch) * out_h * out_w, out_h,
                     out_w);
    }
  } else {
    throw ValidationError("bilinear_resize: expected {H,W} or {C,H,W}");
  }
}

void bilinear_resize_backward(const Tensor& dy, int in_h, int in_w,
                              Tensor& dx) {
  const bool chan = dy.ndim() == 3;
  const int c = chan ? dy.dim(0) : 1;
  const int oh = chan ? dy.dim(1) : dy.dim(0);
  const int ow = chan ? dy.dim(2) : dy.dim(1);
  dx = chan ? Tensor({c, in_h, in_w}) : Tensor({in_h, in_w});
  if (oh == in_h && ow == in_w) {
    dx = dy;
    return;
  }
  std::vector<LerpIdx> cols(static_cast<size_t>(ow));
  for (int ox = 0; ox < ow; ++ox) cols[static_cast<size_t>(ox)] = lerp_index(ox, ow, in_w);
  for (int ch = 0; ch < c; ++ch) {
    const double* dyp = dy.data() + static_cast<size_t>(ch) * oh * ow;
    double* dxp = dx.data() + static_cast<size_t>(ch) * in_h * in_w;
    for (int oy = 0; oy < oh; ++oy) {
      const LerpIdx ry = lerp_index(oy, oh, in_h);
      for (int ox = 0; ox < ow; ++ox) {
        const LerpIdx& rx = cols[static_cast<size_t>(ox)];
        const double g = dyp[static_cast<size_t>(oy) * ow + ox];
        dxp[static_cast<size_t>(ry.i0) * in_w + rx.i0] +=
            g * (1.0 - ry.f) * (1.0 - rx.f);
        dxp[static_cast<size_t>(ry.i0) * in_w + rx.i1] += g * (1.0 - ry.f) * rx.f;
        dxp[static_cast<size_t>(ry.i1) * in_w + rx.i0] += g * ry.f * (1.0 - rx.f);
        dxp[static_cast<size_t>(ry.i1) * in_w + rx.i1] += g * ry.f * rx.f;
      }
    }
  }
}

void nearest_resize(const Tensor& x, int out_h, int out_w, Tensor& y) {
  if (x.ndim() != 2) throw ValidationError("nearest_resize: expected {H,W}");
  const int h = x.dim(0), w = x.dim(1);
  y = Tensor({out_h, out_w});
  for (int oy = 0; oy < out_h; ++oy) {
    const double sy = (oy + 0.5) * static_cast<double>(h) / out_h - 0.5;
    const int iy = std::clamp(static_cast<int>(std::lround(sy)), 0, h - 1);
    for (int ox = 0; ox < out_w; ++ox) {
      const double sx = (ox + 0.5) * static_cast<double>(w) / out_w - 0.5;
      const int ix = std::clamp(static_cast<int>(std::lround(sx)), 0, w - 1);
      y.at(oy, ox) = x.at(iy, ix);
    }
  }
}

namespace {

std::vector<double> gauss_kernel(double sigma, int& radius) {
  radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

void gaussian_blur_impl(const Tensor& x, double sigma, Tensor& y,
                        bool parallel) {
  if (x.ndim() != 2) throw ValidationError("gaussian_blur: expected {H,W}");
  if (sigma <= 0.0) {
    y = x;
    return;
  }
  const int h = x.dim(0), w = x.dim(1);
  int radius = 0;
  const std::vector<double> k = gauss_kernel(sigma, radius);
  Tensor tmp({h, w});
  y = Tensor({h, w});
  // horizontal
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < h; ++r) {
    const double* xrow = x.data() + static_cast<size_t>(r) * w;
    double* trow = tmp.data() + static_cast<size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int cc = std::clamp(c + i, 0, w - 1);
        acc += k[static_cast<size_t>(i + radius)] * xrow[cc];
      }
      trow[c] = acc;
    }
  }
  // vertical
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < h; ++r) {
    double* yrow = y.data() + static_cast<size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int rr = std::clamp(r + i, 0, h - 1);
        acc += k[static_cast<size_t>(i + radius)] * tmp.at(rr, c);
      }
      yrow[c] = acc;
    }
  }
}

void remap_impl(const Tensor& x, const Tensor& map_y, const Tensor& map_x,
                Interp interp, double fill, Tensor& y, bool parallel) {
  if (x.ndim() != 2 || !map_y.same_shape(map_x)) {
    throw ValidationError("remap: x {H,W}, matching map shapes required");
  }
  const int h = x.dim(0), w = x.dim(1);
  const int oh = map_y.dim(0), ow = map_y.dim(1);
  y = Tensor({oh, ow});
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      const double sy = map_y.at(r, c);
      const double sx = map_x.at(r, c);
      double out;
      if (interp == Interp::kNearest) {
        const long iy = std::lround(sy);
        const long ix = std::lround(sx);
        out = (iy < 0 || iy >= h || ix < 0 || ix >= w)
                  ? fill
                  : x.at(static_cast<int>(iy), static_cast<int>(ix));
      } else {
        const int y0 = static_cast<int>(std::floor(sy));
        const int x0 = static_cast<int>(std::floor(sx));
        const double fy = sy - y0, fx = sx - x0;
        auto tap = [&](int yy, int xx) {
          return (yy < 0 || yy >= h || xx < 0 || xx >= w) ? fill : x.at(yy, xx);
        };
        const double top = tap(y0, x0) * (1.0 - fx) + tap(y0, x0 + 1) * fx;
        const double bot = tap(y0 + 1, x0) * (1.0 - fx) + tap(y0 + 1, x0 + 1) * fx;
        out = top * (1.0 - fy) + bot * fy;
      }
      y.at(r, c) = out;
    }
  }
}

void cosine_stack_impl(const Tensor& protos, const Tensor& feat, double alpha,
                       Tensor& sims, bool parallel) {
  if (protos.ndim() != 2 || feat.ndim() != 3 || protos.dim(1) != feat.dim(0)) {
    throw ValidationError("cosine_similarity_stack: protos {K,D}, feat {D,H,W}");
  }
  const int kn = protos.dim(0), d = protos.dim(1);
  const int h = feat.dim(1), w = feat.dim(2);
  const size_t hw = static_cast<size_t>(h) * w;
  sims = Tensor({kn, h, w});

  std::vector<double> fnorm(hw, 0.0);
  for (int dd = 0; dd < d; ++dd) {
    const double* fp = feat.data() + static_cast<size_t>(dd) * hw;
    for (size_t i = 0; i < hw; ++i) fnorm[i] += fp[i] * fp[i];
  }
  for (size_t i = 0; i < hw; ++i) fnorm[i] = std::sqrt(fnorm[i]);

#pragma omp parallel for schedule(static) if (parallel)
  for (int kk = 0; kk < kn; ++kk) {
    const double* pv = protos.data() + static_cast<size_t>(kk) * d;
    double pn = 0.0;
    for (int dd = 0; dd < d; ++dd) pn += pv[dd] * pv[dd];
    pn = std::sqrt(pn);
    double* srow = sims.data() + static_cast<size_t>(kk) * hw;
    std::fill(srow, srow + hw, 0.0);
    for (int dd = 0; dd < d; ++dd) {
      const double* fp = feat.data() + static_cast<size_t>(dd) * hw;
      const double p = pv[dd];
      for (size_t i = 0; i < hw; ++i) srow[i] += p * fp[i];
    }
    for (size_t i = 0; i < hw; ++i) {
      const double denom = pn * fnorm[i];
      srow[i] = (pn < kNormFloor || fnorm[i] < kNormFloor)
                    ? 0.0
                    : alpha * srow[i] / denom;
    }
  }
}

}  // namespace

void gaussian_blur(const Tensor& x, double sigma, Tensor& y) {
  gaussian_blur_impl(x, sigma, y, true);
}

void remap(const Tensor& x, const Tensor& map_y, const Tensor& map_x,
           Interp interp, double fill, Tensor& y) {
  remap_impl(x, map_y, map_x, interp, fill, y, true);
}

void cosine_similarity_stack(const Tensor& protos, const Tensor& feat,
                             double alpha, Tensor& sims) {
  cosine_stack_impl(protos, feat, alpha, sims, true);
}

void cosine_similarity_stack_backward(const Tensor& protos, const Tensor& feat,
                                      double alpha, const Tensor& dsims,
                                      Tensor& dprotos, Tensor& dfeat) {
  const int kn = protos.dim(0), d = protos.dim(1);
  const int h = feat.dim(1), w = feat.dim(2);
  const size_t hw = static_cast<size_t>(h) * w;

  std::vector<double> fnorm(hw, 0.0);
  for (int dd = 0; dd < d; ++dd) {
    const double* fp = feat.data() + static_cast<size_t>(dd) * hw;
    for (size_t i = 0; i < hw; ++i) fnorm[i] += fp[i] * fp[i];
  }
  for (size_t i = 0; i < hw; ++i) fnorm[i] = std::sqrt(fnorm[i]);

  std::vector<double> pnorm(static_cast<size_t>(kn), 0.0);
  for (int kk = 0; kk < kn; ++kk) {
    const double* pv = protos.data() + static_cast<size_t>(kk) * d;
    double pn = 0.0;
    for (int dd = 0; dd < d; ++dd) pn += pv[dd] * pv[dd];
    pnorm[static_cast<size_t>(kk)] = std::sqrt(pn);
  }

  // Pass 1: prototype gradients, one thread per prototype.
#pragma omp parallel for schedule(static)
  for (int kk = 0; kk < kn; ++kk) {
    const double* pv = protos.data() + static_cast<size_t>(kk) * d;
    const double pn = pnorm[static_cast<size_t>(kk)];
    if (pn < kNormFloor) continue;
    const double* ds = dsims.data() + static_cast<size_t>(kk) * hw;
    double* dp = dprotos.data() + static_cast<size_t>(kk) * d;
    // dp = sum_i a*ds_i/(pn*nf_i) * f_i  -  [sum_i a*ds_i*dot_i/(pn^3*nf_i)] * p
    double coef_p = 0.0;
    for (size_t i = 0; i < hw; ++i) {
      const double nf = fnorm[i];
      if (nf < kNormFloor || ds[i] == 0.0) continue;
      double dot = 0.0;
      for (int dd = 0; dd < d; ++dd) {
        dot += pv[dd] * feat.data()[static_cast<size_t>(dd) * hw + i];
      }
      const double c1 = alpha * ds[i] / (pn * nf);
      for (int dd = 0; dd < d; ++dd) {
        dp[dd] += c1 * feat.data()[static_cast<size_t>(dd) * hw + i];
      }
      coef_p += alpha * ds[i] * dot / (pn * pn * pn * nf);
    }
    for (int dd = 0; dd < d; ++dd) dp[dd] -= coef_p * pv[dd];
  }

  // Pass 2: feature gradients, one thread per pixel block.
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < static_cast<int64_t>(hw); ++i) {
    const double nf = fnorm[static_cast<size_t>(i)];
    if (nf < kNormFloor) continue;
    for (int kk = 0; kk < kn; ++kk) {
      const double pn = pnorm[static_cast<size_t>(kk)];
      const double ds = dsims.data()[static_cast<size_t>(kk) * hw + i];
      if (pn < kNormFloor || ds == 0.0) continue;
      const double* pv = protos.data() + static_cast<size_t>(kk) * d;
      double dot = 0.0;
      for (int dd = 0; dd < d; ++dd) {
        dot += pv[dd] * feat.data()[static_cast<size_t>(dd) * hw + i];
      }
      const double c1 = alpha * ds / (pn * nf);
      const double c2 = alpha * ds * dot / (pn * nf * nf * nf);
      for (int dd = 0; dd < d; ++dd) {
        dfeat.data()[static_cast<size_t>(dd) * hw + i] +=
            c1 * pv[dd] - c2 * feat.data()[static_cast<size_t>(dd) * hw + i];
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Serial references: naive per-output loops, no range trimming tricks.
// ---------------------------------------------------------------------------
namespace reference {

void conv2d_forward(const Tensor& x, const Tensor& w, const Tensor& b,
                    int stride, Tensor& y) {
  check_conv_args(x, w, stride);
  const int ic_n = x.dim(0), in_h = x.dim(1), in_w = x.dim(2);
  const int oc_n = w.dim(0);
  const int oh = conv_out_dim(in_h, stride), ow = conv_out_dim(in_w, stride);
  y = Tensor({oc_n, oh, ow});
  for (int oc = 0; oc < oc_n; ++oc) {
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) {
        double acc = b.at(oc);
        for (int ic = 0; ic < ic_n; ++ic) {
          for (int ky = 0; ky < 3; ++ky) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= in_h) continue;
            for (int kx = 0; kx < 3; ++kx) {
              const int ix = ox * stride + kx - 1;
              if (ix < 0 || ix >= in_w) continue;
              acc += w.at(oc, ic, ky, kx) * x.at(ic, iy, ix);
            }
          }
        }
        y.at(oc, oy, ox) = acc;
      }
    }
  }
}

void conv2d_backward_input(const Tensor& dy, const Tensor& w, int stride,
                           int in_h, int in_w, Tensor& dx) {
  const int oc_n = w.dim(0), ic_n = w.dim(1);
  const int oh = dy.dim(1), ow = dy.dim(2);
  dx = Tensor({ic_n, in_h, in_w});
  for (int ic = 0; ic < ic_n; ++ic) {
    for (int oc = 0; oc < oc_n; ++oc) {
      for (int oy = 0; oy < oh; ++oy) {
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= in_h) continue;
          for (int kx = 0; kx < 3; ++kx) {
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * stride + kx - 1;
              if (ix < 0 || ix >= in_w) continue;
              dx.at(ic, iy, ix) += w.at(oc, ic, ky, kx) * dy.at(oc, oy, ox);
            }
          }
        }
      }
    }
  }
}

void conv2d_backward_params(const Tensor& dy, const Tensor& x, int stride,
                            Tensor& dw, Tensor& db) {
  const int ic_n = x.dim(0), in_h = x.dim(1), in_w = x.dim(2);
  const int oc_n = dy.dim(0), oh = dy.dim(1), ow = dy.dim(2);
  for (int oc = 0; oc < oc_n; ++oc) {
    double bacc = 0.0;
    for (int oy = 0; oy < oh; ++oy) {
      for (int ox = 0; ox < ow; ++ox) bacc += dy.at(oc, oy, ox);
    }
    db.at(oc) += bacc;
    for (int ic = 0; ic < ic_n; ++ic) {
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          double acc = 0.0;
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= in_h) continue;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * stride + kx - 1;
              if (ix < 0 || ix >= in_w) continue;
              acc += dy.at(oc, oy, ox) * x.at(ic, iy, ix);
            }
          }
          dw.at(oc, ic, ky, kx) += acc;
        }
      }
    }
  }
}

void remap(const Tensor& x, const Tensor& map_y, const Tensor& map_x,
           Interp interp, double fill, Tensor& y) {
  remap_impl(x, map_y, map_x, interp, fill, y, false);
}

void cosine_similarity_stack(const Tensor& protos, const Tensor& feat,
                             double alpha, Tensor& sims) {
  const int kn = protos.dim(0), d = protos.dim(1);
  const int h = feat.dim(1), w = feat.dim(2);
  sims = Tensor({kn, h, w});
  for (int kk = 0; kk < kn; ++kk) {
    double pn = 0.0;
    for (int dd = 0; dd < d; ++dd) pn += protos.at(kk, dd) * protos.at(kk, dd);
    pn = std::sqrt(pn);
    for (int hh = 0; hh < h; ++hh) {
      for (int ww = 0; ww < w; ++ww) {
        double dot = 0.0, fn = 0.0;
        for (int dd = 0; dd < d; ++dd) {
          dot += protos.at(kk, dd) * feat.at(dd, hh, ww);
          fn += feat.at(dd, hh, ww) * feat.at(dd, hh, ww);
        }
        fn = std::sqrt(fn);
        sims.at(kk, hh, ww) = (pn < kNormFloor || fn < kNormFloor)
                                  ? 0.0
                                  : alpha * dot / (pn * fn);
      }
    }
  }
}

void gaussian_blur(const Tensor& x, double sigma, Tensor& y) {
  gaussian_blur_impl(x, sigma, y, false);
}

}  // namespace reference

}  // namespace alpnet::kernels
