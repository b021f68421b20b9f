// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/fusion.hpp"

#include <cmath>
#include <string>

namespace wscnn::fusion {

namespace {

// masked NCC of a circularly shifted moving image against the reference
double ncc_at_shift(const Image& moving, const Image& reference, const Mask* mask,
                    int dx, int dy, bool* degenerate_moving) {
  const int h = reference.height, w = reference.width;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  std::size_t n = 0;
  for (int y = 0; y < h; ++y) {
    const int sy = ((y - dy) % h + h) % h;
    for (int x = 0; x < w; ++x) {
      if (mask && !mask->at(y, x)) continue;
      const int sx = ((x - dx) % w + w) % w;
      const double a = reference.at(y, x);
      const double b = moving.at(sy, sx);
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
      ++n;
    }
  }
  const double va = saa - sa * sa / n;
  const double vb = sbb - sb * sb / n;
  if (vb <= 0) {
    *degenerate_moving = true;
    return 0.0;
  }
  *degenerate_moving = false;
  return (sab - sa * sb / n) / std::sqrt(va * vb);
}

}  // namespace

RegistrationResult register_translation(const Image& moving, const Image& reference,
                                        int window, const Mask* mask) {
  if (!moving.same_extents(reference))
    throw DataError("register_translation: extents " + std::to_string(moving.height) + "x" +
                    std::to_string(moving.width) + " vs " + std::to_string(reference.height) +
                    "x" + std::to_string(reference.width));
  if (window < 0) throw DataError("register_translation: negative window");

  // reference variance over the mask
  {
    double s = 0, ss = 0;
    std::size_t n = 0;
    for (int y = 0; y < reference.height; ++y)
      for (int x = 0; x < reference.width; ++x) {
        if (mask && !mask->at(y, x)) continue;
        s += reference.at(y, x);
        ss += static_cast<double>(reference.at(y, x)) * reference.at(y, x);
        ++n;
      }
    if (n == 0 || ss - s * s / n <= 0)
      throw DataError("register_translation: reference has zero variance in the mask");
  }

  RegistrationResult best;
  bool have_best = false;
  for (int dy = -window; dy <= window; ++dy) {
    for (int dx = -window; dx <= window; ++dx) {
      bool degenerate = false;
      const double score = ncc_at_shift(moving, reference, mask, dx, dy, &degenerate);
      const long long n2 = static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy;
      const long long bn2 =
          static_cast<long long>(best.dx) * best.dx + static_cast<long long>(best.dy) * best.dy;
      const bool better =
          !have_best || score > best.score ||
          (score == best.score && (n2 < bn2 || (n2 == bn2 && (dx < best.dx ||
                                                (dx == best.dx && dy < best.dy)))));
      if (better) {
        best.dx = dx;
        best.dy = dy;
        best.score = score;
        have_best = true;
      }
    }
  }
  best.registered = circshift(moving, best.dx, best.dy);
  return best;
}

FeatureStack fuse_pair(const FeatureStack& a, const FeatureStack& b) {
  if (!a.compatible(b))
    throw DataError("fuse_pair: incompatible stacks (" + std::to_string(a.n_maps()) + " maps of " +
                    std::to_string(a.map_h) + "x" + std::to_string(a.map_w) + " vs " +
                    std::to_string(b.n_maps()) + " maps of " + std::to_string(b.map_h) + "x" +
                    std::to_string(b.map_w) + ")");
  FeatureStack out = a;
  for (std::size_t m = 0; m < out.maps.size(); ++m) {
    if (a.maps[m].size() != b.maps[m].size())
      throw DataError("fuse_pair: map " + std::to_string(m) + " size mismatch");
    for (std::size_t i = 0; i < out.maps[m].size(); ++i)
      out.maps[m][i] = std::max(a.maps[m][i], b.maps[m][i]);
  }
  return out;
}

FeatureStack fuse_all(std::span<const FeatureStack> stacks) {
  if (stacks.empty()) throw DataError("fuse_all: empty stack list");
  FeatureStack acc = stacks[0];
  for (std::size_t i = 1; i < stacks.size(); ++i) acc = fuse_pair(acc, stacks[i]);
  return acc;
}

Image tmip_baseline(std::span<const Image> images) {
  if (images.empty()) throw DataError("tmip_baseline: empty image list");
  Image out = images[0];
  for (std::size_t i = 1; i < images.size(); ++i) {
    if (!images[i].same_extents(out))
      throw DataError("tmip_baseline: image " + std::to_string(i) + " extents differ");
    for (std::size_t p = 0; p < out.numel(); ++p)
      out.v[p] = std::max(out.v[p], images[i].v[p]);
  }
  return out;
}

std::size_t reference_index(std::span<const std::vector<Image>> tds, const Mask* mask) {
  if (tds.empty()) throw DataError("reference_index: no series");
  std::size_t best = 0;
  double best_energy = -1;
  for (std::size_t t = 0; t < tds.size(); ++t) {
    double e = 0;
    for (const Image& img : tds[t]) {
      for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
          if (mask && !mask->at(y, x)) continue;
          e += static_cast<double>(img.at(y, x)) * img.at(y, x);
        }
    }
    if (e > best_energy) {
      best_energy = e;
      best = t;
    }
  }
  return best;
}

}  // namespace wscnn::fusion
