// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/image.hpp"

namespace wscnn {

Image circshift(const Image& img, int dx, int dy) {
  Image out(img.height, img.width);
  const int h = img.height, w = img.width;
  const int sy = ((dy % h) + h) % h;
  const int sx = ((dx % w) + w) % w;
  for (int y = 0; y < h; ++y) {
    const int src_y = (y - sy + h) % h;
    for (int x = 0; x < w; ++x) out.at(y, x) = img.at(src_y, (x - sx + w) % w);
  }
  return out;
}

}  // namespace wscnn
