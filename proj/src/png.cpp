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

#include "alpnet/png.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>

#include "alpnet/error.hpp"

namespace alpnet {

namespace {

void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void write_chunk(std::ofstream& os, const char type[4],
                 const std::vector<uint8_t>& data) {
  std::vector<uint8_t> head;
  put_u32_be(head, static_cast<uint32_t>(data.size()));
  os.write(reinterpret_cast<const char*>(head.data()), 4);
  os.write(type, 4);
  if (!data.empty()) {
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size()));
  }
  uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
  if (!data.empty()) {
    crc = crc32(crc, data.data(), static_cast<uInt>(data.size()));
  }
  std::vector<uint8_t> tail;
  put_u32_be(tail, crc);
  os.write(reinterpret_cast<const char*>(tail.data()), 4);
}

}  // namespace

void write_png_rgb(const std::string& path, const std::vector<uint8_t>& rgb,
                   int width, int height) {
  if (static_cast<size_t>(width) * height * 3 != rgb.size()) {
    throw ValidationError("write_png_rgb: buffer size mismatch");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("write_png_rgb: cannot open " + path);

  static const uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  os.write(reinterpret_cast<const char*>(sig), 8);

  std::vector<uint8_t> ihdr;
  put_u32_be(ihdr, static_cast<uint32_t>(width));
  put_u32_be(ihdr, static_cast<uint32_t>(height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  write_chunk(os, "IHDR", ihdr);

  // filter byte 0 per scanline
  std::vector<uint8_t> raw;
  raw.reserve(static_cast<size_t>(height) * (1 + static_cast<size_t>(width) * 3));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    const uint8_t* row = rgb.data() + static_cast<size_t>(y) * width * 3;
    raw.insert(raw.end(), row, row + static_cast<size_t>(width) * 3);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> idat(bound);
  if (compress2(idat.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                6) != Z_OK) {
    throw IoError("write_png_rgb: deflate failed");
  }
  idat.resize(bound);
  write_chunk(os, "IDAT", idat);
  write_chunk(os, "IEND", {});
  if (!os) throw IoError("write_png_rgb: short write to " + path);
}

namespace {

bool on_contour(const Tensor& mask, int y, int x) {
  if (mask.at(y, x) == 0.0) return false;
  const int h = mask.dim(0), w = mask.dim(1);
  const int ny[4] = {y - 1, y + 1, y, y};
  const int nx[4] = {x, x, x - 1, x + 1};
  for (int i = 0; i < 4; ++i) {
    if (ny[i] < 0 || ny[i] >= h || nx[i] < 0 || nx[i] >= w) return true;
    if (mask.at(ny[i], nx[i]) == 0.0) return true;
  }
  return false;
}

}  // namespace

void write_overlay_png(const std::string& path, const Tensor& slice,
                       const Tensor& pred_mask, const Tensor* gt_mask) {
  const int h = slice.dim(0), w = slice.dim(1);
  std::vector<uint8_t> rgb(static_cast<size_t>(h) * w * 3);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto g = static_cast<uint8_t>(
          std::clamp(slice.at(y, x), 0.0, 1.0) * 255.0);
      uint8_t r = g, gg = g, b = g;
      if (gt_mask != nullptr && on_contour(*gt_mask, y, x)) {
        r = 0;
        gg = 255;
        b = 0;
      }
      if (on_contour(pred_mask, y, x)) {
        r = 255;
        gg = 0;
        b = 0;
      }
      const size_t o = (static_cast<size_t>(y) * w + x) * 3;
      rgb[o] = r;
      rgb[o + 1] = gg;
      rgb[o + 2] = b;
    }
  }
  write_png_rgb(path, rgb, w, h);
}

}  // namespace alpnet
