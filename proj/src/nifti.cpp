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

#include "alpnet/nifti.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <set>
#include <vector>

#include "alpnet/error.hpp"

namespace alpnet {

namespace {

// gzread handles both gzip and plain files transparently.
std::vector<unsigned char> read_all(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (f == nullptr) throw IoError("nifti: cannot open " + path);
  std::vector<unsigned char> out;
  unsigned char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) {
    out.insert(out.end(), buf, buf + n);
  }
  const bool bad = n < 0;
  gzclose(f);
  if (bad) throw IoError("nifti: decompression error in " + path);
  return out;
}

template <typename T>
T read_le(const unsigned char* p, bool swap) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if (swap) {
    unsigned char* b = reinterpret_cast<unsigned char*>(&v);
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
  }
  return v;
}

struct NiftiData {
  int nx, ny, nz;
  std::vector<double> values;  // x fastest
  std::vector<double> spacing;  // sz, sy, sx
};

NiftiData read_nifti(const std::string& path) {
  const std::vector<unsigned char> bytes = read_all(path);
  if (bytes.size() < 352) throw IoError("nifti: truncated header in " + path);
  const unsigned char* p = bytes.data();

  bool swap = false;
  int32_t sizeof_hdr = read_le<int32_t>(p, false);
  if (sizeof_hdr != 348) {
    swap = true;
    sizeof_hdr = read_le<int32_t>(p, true);
    if (sizeof_hdr != 348) throw IoError("nifti: bad header magic in " + path);
  }
  if (std::memcmp(p + 344, "n+1", 3) != 0 && std::memcmp(p + 344, "ni1", 3) != 0) {
    throw IoError("nifti: unsupported magic in " + path);
  }

  int16_t dim[8];
  for (int i = 0; i < 8; ++i) dim[i] = read_le<int16_t>(p + 40 + 2 * i, swap);
  const int ndim = dim[0];
  if (ndim < 3 || ndim > 7) throw IoError("nifti: expected a 3D image");
  for (int i = 4; i <= ndim; ++i) {
    if (dim[i] > 1) throw IoError("nifti: multi-frame images unsupported");
  }
  const int nx = dim[1], ny = dim[2], nz = dim[3];
  if (nx < 1 || ny < 1 || nz < 1) throw IoError("nifti: bad dimensions");

  const int16_t datatype = read_le<int16_t>(p + 70, swap);
  float pixdim[4];
  for (int i = 0; i < 4; ++i) pixdim[i] = read_le<float>(p + 76 + 4 * i, swap);
  const float vox_offset = read_le<float>(p + 108, swap);
  float scl_slope = read_le<float>(p + 112, swap);
  const float scl_inter = read_le<float>(p + 116, swap);
  if (scl_slope == 0.0f) scl_slope = 1.0f;

  const size_t n = static_cast<size_t>(nx) * ny * static_cast<size_t>(nz);
  const size_t offset = static_cast<size_t>(vox_offset);
  NiftiData out;
  out.nx = nx;
  out.ny = ny;
  out.nz = nz;
  out.spacing = {pixdim[3], pixdim[2], pixdim[1]};
  out.values.resize(n);

  auto load = [&](auto tag, size_t elem_size) {
    using T = decltype(tag);
    if (bytes.size() < offset + n * elem_size) {
      throw IoError("nifti: truncated voxel data in " + path);
    }
    for (size_t i = 0; i < n; ++i) {
      const T raw = read_le<T>(p + offset + i * elem_size, swap);
      out.values[i] = static_cast<double>(raw) * scl_slope + scl_inter;
    }
  };

  switch (datatype) {
    case 2:   load(uint8_t{}, 1); break;
    case 256: load(int8_t{}, 1); break;
    case 4:   load(int16_t{}, 2); break;
    case 512: load(uint16_t{}, 2); break;
    case 8:   load(int32_t{}, 4); break;
    case 768: load(uint32_t{}, 4); break;
    case 16:  load(float{}, 4); break;
    case 64:  load(double{}, 8); break;
    default:
      throw IoError("nifti: unsupported datatype " + std::to_string(datatype));
  }
  return out;
}

Tensor to_volume_grid(const NiftiData& d) {
  Tensor grid({d.nz, d.ny, d.nx});
  size_t i = 0;
  for (int z = 0; z < d.nz; ++z) {
    for (int y = 0; y < d.ny; ++y) {
      for (int x = 0; x < d.nx; ++x) {
        grid.at(z, y, x) = d.values[i++];
      }
    }
  }
  return grid;
}

}  // namespace

Volume load_volume_nifti(const std::string& image_path,
                         const std::string& label_path) {
  const NiftiData img = read_nifti(image_path);
  Volume vol;
  vol.intensities = to_volume_grid(img);
  vol.spacing = img.spacing;

  std::string id = std::filesystem::path(image_path).filename().string();
  for (const char* suffix : {"_img.nii.gz", "_img.nii", ".nii.gz", ".nii"}) {
    const size_t len = std::strlen(suffix);
    if (id.size() > len && id.compare(id.size() - len, len, suffix) == 0) {
      id = id.substr(0, id.size() - len);
      break;
    }
  }
  vol.id = id;

  if (!label_path.empty()) {
    const NiftiData lbl = read_nifti(label_path);
    if (lbl.nx != img.nx || lbl.ny != img.ny || lbl.nz != img.nz) {
      throw IoError("nifti: label shape mismatch for " + image_path);
    }
    std::set<int> ids;
    for (double v : lbl.values) {
      const int c = static_cast<int>(std::lround(v));
      if (c != 0) ids.insert(c);
    }
    const Tensor lbl_grid = to_volume_grid(lbl);
    for (int c : ids) {
      Tensor grid(lbl_grid.shape());
      for (int64_t i = 0; i < lbl_grid.size(); ++i) {
        grid[i] = std::lround(lbl_grid[i]) == c ? 1.0 : 0.0;
      }
      vol.labels[c] = std::move(grid);
    }
  }
  return vol;
}

}  // namespace alpnet
