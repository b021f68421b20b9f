// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wscnn/common.hpp"

namespace wscnn {

// 2-D real raster; the unit of DW data at one trigger delay and gradient
// direction. Row-major, y down.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<pix> v;

  Image() = default;
  Image(int h, int w, pix fill = 0) : height(h), width(w), v(static_cast<std::size_t>(h) * w, fill) {}

  pix& at(int y, int x) { return v[static_cast<std::size_t>(y) * width + x]; }
  pix at(int y, int x) const { return v[static_cast<std::size_t>(y) * width + x]; }
  std::size_t numel() const { return v.size(); }
  bool same_extents(const Image& o) const { return height == o.height && width == o.width; }
};

// Boolean ROI raster (myocardium mask).
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> v;

  Mask() = default;
  Mask(int h, int w, bool fill = false)
      : height(h), width(w), v(static_cast<std::size_t>(h) * w, fill ? 1 : 0) {}

  bool at(int y, int x) const { return v[static_cast<std::size_t>(y) * width + x] != 0; }
  void set(int y, int x, bool b) { v[static_cast<std::size_t>(y) * width + x] = b ? 1 : 0; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto b : v) n += (b != 0);
    return n;
  }
};

// Circular shift: content moves right by dx and down by dy.
Image circshift(const Image& img, int dx, int dy);

}  // namespace wscnn
