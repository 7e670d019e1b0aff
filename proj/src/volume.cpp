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

#include "alpnet/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "alpnet/error.hpp"
#include "alpnet/kernels.hpp"
#include "alpnet/nifti.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace alpnet {

Tensor Volume::slice(int index) const {
  const int h = height(), w = width();
  Tensor out({h, w});
  const double* src = intensities.data() + static_cast<size_t>(index) * h * w;
  std::copy(src, src + static_cast<size_t>(h) * w, out.data());
  return out;
}

Tensor Volume::label_slice(int class_id, int index) const {
  const int h = height(), w = width();
  Tensor out({h, w});
  auto it = labels.find(class_id);
  if (it == labels.end()) return out;
  const double* src = it->second.data() + static_cast<size_t>(index) * h * w;
  std::copy(src, src + static_cast<size_t>(h) * w, out.data());
  return out;
}

bool Volume::slice_contains_class(int class_id, int index) const {
  auto it = labels.find(class_id);
  if (it == labels.end()) return false;
  const int h = height(), w = width();
  const double* src = it->second.data() + static_cast<size_t>(index) * h * w;
  for (size_t i = 0; i < static_cast<size_t>(h) * w; ++i) {
    if (src[i] != 0.0) return true;
  }
  return false;
}

SliceSample make_slice_sample(const Volume& vol, int slice_index) {
  if (slice_index < 0 || slice_index >= vol.n_slices()) {
    throw ValidationError("make_slice_sample: slice index out of range");
  }
  SliceSample s;
  s.volume_id = vol.id;
  s.slice_index = slice_index;
  const int h = vol.height(), w = vol.width();
  const Tensor plane = vol.slice(slice_index);
  s.image = Tensor({3, h, w});
  for (int c = 0; c < 3; ++c) {
    std::copy(plane.data(), plane.data() + plane.size(),
              s.image.data() + static_cast<size_t>(c) * h * w);
  }
  for (const auto& [cid, grid] : vol.labels) {
    (void)grid;
    s.masks[cid] = vol.label_slice(cid, slice_index);
  }
  return s;
}

namespace {

// Nearest-rank clip bounds; floor for the low rank, ceil for the high one,
// which makes clip+minmax an exact fixed point on its own output.
void percentile_bounds(const Tensor& t, double pct_lo, double pct_hi,
                       double& lo, double& hi) {
  std::vector<double> sorted(t.data(), t.data() + t.size());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  const size_t k_lo = static_cast<size_t>(
      std::floor(pct_lo / 100.0 * static_cast<double>(n - 1)));
  const size_t k_hi = static_cast<size_t>(
      std::ceil(pct_hi / 100.0 * static_cast<double>(n - 1)));
  lo = sorted[k_lo];
  hi = sorted[k_hi];
}

void clip_minmax(Tensor& t, double lo, double hi) {
  const double range = hi - lo;
  if (range < 1e-12) {
    t.fill(0.0);
    return;
  }
  for (int64_t i = 0; i < t.size(); ++i) {
    t[i] = (std::clamp(t[i], lo, hi) - lo) / range;
  }
}

Tensor resize_volume_grid(const Tensor& grid, int target, bool nearest) {
  const int s = grid.dim(0), h = grid.dim(1), w = grid.dim(2);
  if (h == target && w == target) return grid;
  Tensor out({s, target, target});
  for (int i = 0; i < s; ++i) {
    Tensor plane({h, w});
    std::copy(grid.data() + static_cast<size_t>(i) * h * w,
              grid.data() + static_cast<size_t>(i + 1) * h * w, plane.data());
    Tensor resized;
    if (nearest) {
      kernels::nearest_resize(plane, target, target, resized);
    } else {
      kernels::bilinear_resize(plane, target, target, resized);
    }
    std::copy(resized.data(), resized.data() + resized.size(),
              out.data() + static_cast<size_t>(i) * target * target);
  }
  return out;
}

void write_exact(std::ofstream& os, const void* data, size_t n) {
  os.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!os) throw IoError("short write");
}

}  // namespace

void preprocess_volume(Volume& vol, int target_size,
                       const PreprocessOptions& opts) {
  if (vol.intensities.ndim() != 3 || vol.n_slices() < 1) {
    throw ValidationError("preprocess_volume: empty volume");
  }
  if (!tensor_all_finite(vol.intensities)) {
    throw ValidationError("preprocess_volume: non-finite intensities");
  }
  for (const auto& [cid, grid] : vol.labels) {
    if (!grid.same_shape(vol.intensities)) {
      throw IoError("preprocess_volume: label shape mismatch for class " +
                    std::to_string(cid));
    }
  }

  double lo, hi;
  if (opts.mode == PreprocessOptions::Mode::kHuWindow) {
    lo = opts.hu_min;
    hi = opts.hu_max;
  } else {
    percentile_bounds(vol.intensities, opts.pct_lo, opts.pct_hi, lo, hi);
  }
  clip_minmax(vol.intensities, lo, hi);

  vol.intensities = resize_volume_grid(vol.intensities, target_size, false);
  for (auto& [cid, grid] : vol.labels) {
    (void)cid;
    grid = resize_volume_grid(grid, target_size, true);
  }
}

void save_volume_raw(const Volume& vol, const std::string& base_path,
                     const std::map<std::string, int>& class_names) {
  const int s = vol.n_slices(), h = vol.height(), w = vol.width();
  if (s == 0) throw ValidationError("save_volume_raw: empty volume");

  json header;
  header["shape"] = {s, h, w};
  header["dtype"] = "f32le";
  header["spacing"] = vol.spacing;
  header["modality"] = vol.modality;
  header["id"] = vol.id;
  json classes = json::object();
  if (!class_names.empty()) {
    for (const auto& [name, cid] : class_names) classes[name] = cid;
  } else {
    for (const auto& [cid, grid] : vol.labels) {
      (void)grid;
      classes["class_" + std::to_string(cid)] = cid;
    }
  }
  header["classes"] = classes;
  header["has_labels"] = !vol.labels.empty();
  if (!vol.labels.empty()) header["labels_dtype"] = "u8le";

  std::ofstream hout(base_path + ".json");
  if (!hout) throw IoError("save_volume_raw: cannot open " + base_path + ".json");
  hout << header.dump(2) << "\n";

  std::ofstream rout(base_path + ".raw", std::ios::binary);
  if (!rout) throw IoError("save_volume_raw: cannot open " + base_path + ".raw");
  std::vector<float> payload(static_cast<size_t>(vol.intensities.size()));
  for (int64_t i = 0; i < vol.intensities.size(); ++i) {
    payload[static_cast<size_t>(i)] = static_cast<float>(vol.intensities[i]);
  }
  write_exact(rout, payload.data(), payload.size() * sizeof(float));

  if (!vol.labels.empty()) {
    std::vector<uint8_t> ids(static_cast<size_t>(vol.intensities.size()), 0);
    for (const auto& [cid, grid] : vol.labels) {
      for (int64_t i = 0; i < grid.size(); ++i) {
        if (grid[i] != 0.0) {
          if (ids[static_cast<size_t>(i)] != 0) {
            throw ValidationError("save_volume_raw: overlapping class labels");
          }
          ids[static_cast<size_t>(i)] = static_cast<uint8_t>(cid);
        }
      }
    }
    std::ofstream lout(base_path + ".labels.raw", std::ios::binary);
    if (!lout) throw IoError("save_volume_raw: cannot open labels payload");
    write_exact(lout, ids.data(), ids.size());
  }
}

Volume load_volume_raw(const std::string& json_path) {
  std::ifstream hin(json_path);
  if (!hin) throw IoError("load_volume_raw: cannot open " + json_path);
  json header;
  try {
    hin >> header;
  } catch (const json::exception& e) {
    throw IoError("load_volume_raw: bad header JSON: " + std::string(e.what()));
  }
  if (!header.contains("shape") || !header.contains("dtype")) {
    throw IoError("load_volume_raw: header missing shape/dtype");
  }
  if (header["dtype"] != "f32le") {
    throw IoError("load_volume_raw: unsupported dtype");
  }
  const auto shape = header["shape"].get<std::vector<int>>();
  if (shape.size() != 3 || shape[0] < 1 || shape[1] < 1 || shape[2] < 1) {
    throw IoError("load_volume_raw: bad shape");
  }
  const size_t voxels =
      static_cast<size_t>(shape[0]) * shape[1] * static_cast<size_t>(shape[2]);

  std::string base = json_path;
  if (base.size() > 5 && base.substr(base.size() - 5) == ".json") {
    base = base.substr(0, base.size() - 5);
  }

  Volume vol;
  vol.id = header.value("id", fs::path(base).filename().string());
  vol.modality = header.value("modality", "unknown");
  if (header.contains("spacing")) {
    vol.spacing = header["spacing"].get<std::vector<double>>();
  }

  std::ifstream rin(base + ".raw", std::ios::binary);
  if (!rin) throw IoError("load_volume_raw: missing payload " + base + ".raw");
  std::vector<float> payload(voxels);
  rin.read(reinterpret_cast<char*>(payload.data()),
           static_cast<std::streamsize>(voxels * sizeof(float)));
  if (rin.gcount() != static_cast<std::streamsize>(voxels * sizeof(float))) {
    throw IoError("load_volume_raw: payload size does not match header shape");
  }
  vol.intensities = Tensor({shape[0], shape[1], shape[2]});
  for (size_t i = 0; i < voxels; ++i) {
    vol.intensities[static_cast<int64_t>(i)] = payload[i];
  }

  if (header.value("has_labels", false)) {
    std::ifstream lin(base + ".labels.raw", std::ios::binary);
    if (!lin) throw IoError("load_volume_raw: missing labels payload");
    std::vector<uint8_t> ids(voxels);
    lin.read(reinterpret_cast<char*>(ids.data()),
             static_cast<std::streamsize>(voxels));
    if (lin.gcount() != static_cast<std::streamsize>(voxels)) {
      throw IoError("load_volume_raw: labels payload size mismatch");
    }
    for (const auto& [name, cid] : header["classes"].items()) {
      (void)name;
      const int class_id = cid.get<int>();
      Tensor grid({shape[0], shape[1], shape[2]});
      bool any = false;
      for (size_t i = 0; i < voxels; ++i) {
        if (ids[i] == class_id) {
          grid[static_cast<int64_t>(i)] = 1.0;
          any = true;
        }
      }
      if (any) vol.labels[class_id] = std::move(grid);
    }
  }
  return vol;
}

Volume load_and_preprocess(const std::string& path, int target_size,
                           const PreprocessOptions& opts) {
  if (!fs::exists(path)) throw IoError("load_and_preprocess: no such file: " + path);
  Volume vol;
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    vol = load_volume_raw(path);
  } else if (path.ends_with(".nii") || path.ends_with(".nii.gz")) {
    vol = load_volume_nifti(path);
  } else {
    throw ValidationError("load_and_preprocess: unsupported format: " + path);
  }
  preprocess_volume(vol, target_size, opts);
  return vol;
}

std::vector<Volume> load_dataset(const std::string& root,
                                 const std::string& format, int target_size,
                                 const PreprocessOptions& opts) {
  if (!fs::is_directory(root)) {
    throw IoError("load_dataset: no such directory: " + root);
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (format == "raw" && name.ends_with(".json")) {
      paths.push_back(entry.path().string());
    } else if (format == "nifti" &&
               (name.ends_with("_img.nii") || name.ends_with("_img.nii.gz"))) {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw IoError("load_dataset: no " + format + " volumes under " + root);
  }
  std::vector<Volume> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    if (format == "nifti") {
      std::string lbl = p;
      const std::string img_tag = "_img.nii";
      const auto pos = lbl.rfind(img_tag);
      lbl.replace(pos, img_tag.size(), "_lbl.nii");
      Volume vol = load_volume_nifti(p, fs::exists(lbl) ? lbl : "");
      preprocess_volume(vol, target_size, opts);
      out.push_back(std::move(vol));
    } else {
      out.push_back(load_and_preprocess(p, target_size, opts));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Volume& a, const Volume& b) { return a.id < b.id; });
  return out;
}

}  // namespace alpnet
