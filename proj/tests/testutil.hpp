// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "wscnn/image.hpp"
#include "wscnn/rng.hpp"

namespace testutil {

// Smooth nonnegative test image: a positive baseline plus random Gaussian
// bumps, resembling a masked DW magnitude raster.
inline wscnn::Image smooth_phantom(int h, int w, wscnn::Rng& rng, int bumps = 8,
                                   double baseline = 1.0) {
  wscnn::Image img(h, w, static_cast<wscnn::pix>(baseline));
  std::vector<double> cx(bumps), cy(bumps), s(bumps), amp(bumps);
  for (int b = 0; b < bumps; ++b) {
    cx[b] = rng.uniform(0.1 * w, 0.9 * w);
    cy[b] = rng.uniform(0.1 * h, 0.9 * h);
    s[b] = rng.uniform(0.06, 0.14) * std::min(h, w);
    amp[b] = rng.uniform(-0.4, 0.4);
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = baseline;
      for (int b = 0; b < bumps; ++b) {
        const double dx = x - cx[b], dy = y - cy[b];
        v += amp[b] * std::exp(-(dx * dx + dy * dy) / (2 * s[b] * s[b]));
      }
      img.at(y, x) = static_cast<wscnn::pix>(v < 0 ? 0 : v);
    }
  }
  return img;
}

inline double frob_norm(const wscnn::Image& img) {
  double s = 0;
  for (auto v : img.v) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

}  // namespace testutil
