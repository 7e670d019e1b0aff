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

// Compares the OpenMP kernels against their serial references: verifies
// bit-identical outputs, then reports timings.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

#include "alpnet/kernels.hpp"
#include "alpnet/rng.hpp"
#include "alpnet/tensor.hpp"

using namespace alpnet;
using Clock = std::chrono::steady_clock;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-1.0, 1.0);
  return t;
}

double time_ms(const std::function<void()>& fn, int reps) {
  fn();  // warm up
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

int failures = 0;

void report(const char* name, double serial_ms, double parallel_ms,
            double max_diff) {
  const bool ok = max_diff == 0.0;
  if (!ok) ++failures;
  std::printf("%-28s serial %8.3f ms   omp %8.3f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              ok ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int reps = quick ? 3 : 30;
  std::printf("threads: %d\n", kernels::thread_count());

  Rng rng(7);
  const Tensor x = random_tensor({32, 64, 64}, rng);
  const Tensor w = random_tensor({64, 32, 3, 3}, rng);
  const Tensor b = random_tensor({64}, rng);

  {
    Tensor ys, yp;
    const double ts = time_ms([&] { kernels::reference::conv2d_forward(x, w, b, 1, ys); }, reps);
    const double tp = time_ms([&] { kernels::conv2d_forward(x, w, b, 1, yp); }, reps);
    report("conv2d_forward s1", ts, tp, tensor_max_abs_diff(ys, yp));
  }
  {
    Tensor ys, yp;
    const double ts = time_ms([&] { kernels::reference::conv2d_forward(x, w, b, 2, ys); }, reps);
    const double tp = time_ms([&] { kernels::conv2d_forward(x, w, b, 2, yp); }, reps);
    report("conv2d_forward s2", ts, tp, tensor_max_abs_diff(ys, yp));
  }
  {
    Tensor dy = random_tensor({64, 64, 64}, rng);
    Tensor dxs, dxp;
    const double ts = time_ms(
        [&] { kernels::reference::conv2d_backward_input(dy, w, 1, 64, 64, dxs); }, reps);
    const double tp = time_ms(
        [&] { kernels::conv2d_backward_input(dy, w, 1, 64, 64, dxp); }, reps);
    report("conv2d_backward_input", ts, tp, tensor_max_abs_diff(dxs, dxp));
  }
  {
    Tensor dy = random_tensor({64, 64, 64}, rng);
    Tensor dws({64, 32, 3, 3}), dbs({64}), dwp({64, 32, 3, 3}), dbp({64});
    const double ts = time_ms(
        [&] {
          dws.fill(0.0);
          dbs.fill(0.0);
          kernels::reference::conv2d_backward_params(dy, x, 1, dws, dbs);
        },
        reps);
    const double tp = time_ms(
        [&] {
          dwp.fill(0.0);
          dbp.fill(0.0);
          kernels::conv2d_backward_params(dy, x, 1, dwp, dbp);
        },
        reps);
    report("conv2d_backward_params", ts, tp,
           std::max(tensor_max_abs_diff(dws, dwp), tensor_max_abs_diff(dbs, dbp)));
  }
  {
    const Tensor protos = random_tensor({64, 64}, rng);
    const Tensor feat = random_tensor({64, 32, 32}, rng);
    Tensor ss, sp;
    const double ts = time_ms(
        [&] { kernels::reference::cosine_similarity_stack(protos, feat, 20.0, ss); }, reps);
    const double tp = time_ms(
        [&] { kernels::cosine_similarity_stack(protos, feat, 20.0, sp); }, reps);
    report("cosine_similarity_stack", ts, tp, tensor_max_abs_diff(ss, sp));
  }
  {
    const Tensor img = random_tensor({256, 256}, rng);
    Tensor my({256, 256}), mx({256, 256});
    for (int r = 0; r < 256; ++r) {
      for (int c = 0; c < 256; ++c) {
        my.at(r, c) = r + 3.7 * std::sin(c / 17.0);
        mx.at(r, c) = c + 2.9 * std::cos(r / 23.0);
      }
    }
    Tensor ys, yp;
    const double ts = time_ms(
        [&] {
          kernels::reference::remap(img, my, mx, kernels::Interp::kBilinear, 0.0, ys);
        },
        reps);
    const double tp = time_ms(
        [&] { kernels::remap(img, my, mx, kernels::Interp::kBilinear, 0.0, yp); },
        reps);
    report("remap bilinear", ts, tp, tensor_max_abs_diff(ys, yp));
  }
  {
    const Tensor img = random_tensor({256, 256}, rng);
    Tensor ys, yp;
    const double ts =
        time_ms([&] { kernels::reference::gaussian_blur(img, 2.0, ys); }, reps);
    const double tp = time_ms([&] { kernels::gaussian_blur(img, 2.0, yp); }, reps);
    report("gaussian_blur", ts, tp, tensor_max_abs_diff(ys, yp));
  }

  if (failures > 0) {
    std::printf("%d kernel(s) diverged from the serial reference\n", failures);
    return 1;
  }
  return 0;
}
