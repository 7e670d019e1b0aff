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

// Test-only oracle for the similarity classifier: cosine similarities,
// per-class softmax-weighted fusion and the class softmax computed directly
// from their definitions, sharing no code with the production path.

#ifndef ALPNET_TESTS_CLASSIFIER_ORACLE_HPP_
#define ALPNET_TESTS_CLASSIFIER_ORACLE_HPP_

#include <cmath>
#include <vector>

namespace alpnet::testref {

inline std::vector<double> oracle_pixel_probs(
    const std::vector<std::vector<double>>& protos,
    const std::vector<int>& proto_classes, const std::vector<double>& feat,
    double alpha, const std::vector<int>& class_order) {
  auto cosine = [](const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      dot += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    if (std::sqrt(na) < 1e-12 || std::sqrt(nb) < 1e-12) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
  };
  std::vector<double> fused;
  for (int cid : class_order) {
    std::vector<double> sims;
    for (size_t k = 0; k < protos.size(); ++k) {
      if (proto_classes[k] == cid) sims.push_back(alpha * cosine(protos[k], feat));
    }
    double z = 0;
    for (double s : sims) z += std::exp(s);
    double f = 0;
    for (double s : sims) f += s * std::exp(s) / z;
    fused.push_back(f);
  }
  double z = 0;
  for (double f : fused) z += std::exp(f);
  std::vector<double> probs;
  probs.reserve(fused.size());
  for (double f : fused) probs.push_back(std::exp(f) / z);
  return probs;
}

}  // namespace alpnet::testref

#endif  // ALPNET_TESTS_CLASSIFIER_ORACLE_HPP_
