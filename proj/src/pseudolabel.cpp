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

#include "alpnet/pseudolabel.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "alpnet/error.hpp"
#include "alpnet/hash.hpp"
#include "alpnet/rle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace alpnet {

namespace {

json config_to_json(const SuperpixelConfig& c) {
  return json{{"scale", c.scale},
              {"smooth_sigma", c.smooth_sigma},
              {"min_size", c.min_size},
              {"connectivity", c.connectivity}};
}

SuperpixelConfig config_from_json(const json& j) {
  SuperpixelConfig c;
  c.scale = j.at("scale").get<double>();
  c.smooth_sigma = j.at("smooth_sigma").get<double>();
  c.min_size = j.at("min_size").get<int>();
  c.connectivity = j.at("connectivity").get<int>();
  return c;
}

std::string slice_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "slice_%04d.json", index);
  return buf;
}

json slice_to_json(const SlicePseudolabels& sp) {
  json masks = json::array();
  for (size_t m = 0; m < sp.masks.size(); ++m) {
    masks.push_back(json{{"mask_id", static_cast<int>(m)},
                         {"rle", rle_encode(sp.masks[m])},
                         {"area", static_cast<int64_t>(tensor_sum(sp.masks[m]))}});
  }
  return json{{"slice_index", sp.slice_index},
              {"degenerate", sp.degenerate},
              {"masks", masks}};
}

}  // namespace

PseudolabelSet build_pseudolabel_set(const Volume& volume,
                                     const SuperpixelConfig& config) {
  if (volume.n_slices() < 1) {
    throw ValidationError("build_pseudolabel_set: empty volume");
  }
  config.validate();
  PseudolabelSet set;
  set.volume_id = volume.id;
  set.height = volume.height();
  set.width = volume.width();
  set.config = config;
  set.slices.resize(static_cast<size_t>(volume.n_slices()));

#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < volume.n_slices(); ++s) {
    const LabelMap lm = segment_slice(volume.slice(s), config);
    SlicePseudolabels& sp = set.slices[static_cast<size_t>(s)];
    sp.slice_index = s;
    sp.masks = labelmap_to_masks(lm);
    sp.degenerate = lm.n_segments <= 1;
  }
  return set;
}

std::string pseudolabel_input_hash(const Volume& volume,
                                   const SuperpixelConfig& config) {
  Fnv1a h;
  h.update(volume.id);
  h.update_u64(static_cast<uint64_t>(volume.n_slices()));
  h.update_u64(static_cast<uint64_t>(volume.height()));
  h.update_u64(static_cast<uint64_t>(volume.width()));
  for (int64_t i = 0; i < volume.intensities.size(); ++i) {
    h.update_f64(volume.intensities[i]);
  }
  h.update(config_to_json(config).dump());
  return h.hex();
}

void write_pseudolabel_store(const PseudolabelSet& set, const std::string& root,
                             const std::string& input_hash) {
  const fs::path dir = fs::path(root) / set.volume_id;
  fs::create_directories(dir);

  Fnv1a content;
  json degenerate = json::array();
  for (const SlicePseudolabels& sp : set.slices) {
    const std::string body = slice_to_json(sp).dump();
    content.update(body);
    if (sp.degenerate) degenerate.push_back(sp.slice_index);
    std::ofstream out(dir / slice_filename(sp.slice_index));
    if (!out) throw IoError("pseudolabel store: cannot write slice file");
    out << body << "\n";
  }

  json manifest{{"format", "alpnet-pseudolabels-v1"},
                {"volume_id", set.volume_id},
                {"height", set.height},
                {"width", set.width},
                {"n_slices", static_cast<int>(set.slices.size())},
                {"config", config_to_json(set.config)},
                {"degenerate_slices", degenerate},
                {"input_hash", input_hash},
                {"content_hash", content.hex()}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("pseudolabel store: cannot write manifest");
  out << manifest.dump(2) << "\n";
}

PseudolabelSet read_pseudolabel_store(const std::string& root,
                                      const std::string& volume_id) {
  const fs::path dir = fs::path(root) / volume_id;
  std::ifstream min(dir / "manifest.json");
  if (!min) {
    throw IoError("pseudolabel store: missing manifest for " + volume_id +
                  " under " + root);
  }
  json manifest;
  try {
    min >> manifest;
  } catch (const json::exception& e) {
    throw IoError("pseudolabel store: bad manifest: " + std::string(e.what()));
  }

  PseudolabelSet set;
  set.volume_id = manifest.at("volume_id").get<std::string>();
  set.height = manifest.at("height").get<int>();
  set.width = manifest.at("width").get<int>();
  set.config = config_from_json(manifest.at("config"));
  const int n = manifest.at("n_slices").get<int>();
  set.slices.resize(static_cast<size_t>(n));

  for (int s = 0; s < n; ++s) {
    std::ifstream in(dir / slice_filename(s));
    if (!in) throw IoError("pseudolabel store: missing slice file " +
                           slice_filename(s));
    json body;
    in >> body;
    SlicePseudolabels& sp = set.slices[static_cast<size_t>(s)];
    sp.slice_index = body.at("slice_index").get<int>();
    sp.degenerate = body.at("degenerate").get<bool>();
    for (const json& m : body.at("masks")) {
      sp.masks.push_back(rle_decode(m.at("rle").get<std::vector<int64_t>>(),
                                    set.height, set.width));
    }
  }
  return set;
}

std::string stored_input_hash(const std::string& root,
                              const std::string& volume_id) {
  const fs::path manifest = fs::path(root) / volume_id / "manifest.json";
  std::ifstream in(manifest);
  if (!in) return "";
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    return "";
  }
  return j.value("input_hash", "");
}

}  // namespace alpnet
