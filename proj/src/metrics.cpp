// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wscnn::metrics {

namespace {

void check_pair(const Image& a, const Image& b, const Mask* mask, const char* what) {
  if (!a.same_extents(b))
    throw DataError(std::string(what) + ": extents " + std::to_string(a.height) + "x" +
                    std::to_string(a.width) + " vs " + std::to_string(b.height) + "x" +
                    std::to_string(b.width));
  if (mask && (mask->height != a.height || mask->width != a.width))
    throw DataError(std::string(what) + ": mask extents do not match images");
}

}  // namespace

double mask_peak(const Image& reference, const Mask* mask) {
  double peak = 0;
  for (int y = 0; y < reference.height; ++y)
    for (int x = 0; x < reference.width; ++x) {
      if (mask && !mask->at(y, x)) continue;
      peak = std::max(peak, static_cast<double>(reference.at(y, x)));
    }
  return peak;
}

double psnr(const Image& a, const Image& b, double peak, const Mask* mask) {
  check_pair(a, b, mask, "psnr");
  if (peak <= 0) throw DataError("psnr: peak must be positive");
  double acc = 0;
  std::size_t n = 0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) {
      if (mask && !mask->at(y, x)) continue;
      const double d = static_cast<double>(a.at(y, x)) - b.at(y, x);
      acc += d * d;
      ++n;
    }
  if (n == 0) throw DataError("psnr: empty mask");
  const double mse = acc / n;
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& a, const Image& b, double peak, const Mask* mask) {
  check_pair(a, b, mask, "ssim");
  if (peak <= 0) throw DataError("ssim: peak must be positive");
  constexpr int kWin = 8;
  if (a.height < kWin || a.width < kWin)
    throw DataError("ssim: image smaller than the 8x8 window");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const double inv_n = 1.0 / (kWin * kWin);

  double acc = 0;
  std::size_t windows = 0;
  for (int y0 = 0; y0 + kWin <= a.height; ++y0) {
    for (int x0 = 0; x0 + kWin <= a.width; ++x0) {
      if (mask) {
        bool inside = true;
        for (int y = y0; inside && y < y0 + kWin; ++y)
          for (int x = x0; x < x0 + kWin; ++x)
            if (!mask->at(y, x)) {
              inside = false;
              break;
            }
        if (!inside) continue;
      }
      double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
      for (int y = y0; y < y0 + kWin; ++y)
        for (int x = x0; x < x0 + kWin; ++x) {
          const double va = a.at(y, x), vb = b.at(y, x);
          sa += va;
          sb += vb;
          saa += va * va;
          sbb += vb * vb;
          sab += va * vb;
        }
      const double mu_a = sa * inv_n, mu_b = sb * inv_n;
      const double var_a = saa * inv_n - mu_a * mu_a;
      const double var_b = sbb * inv_n - mu_b * mu_b;
      const double cov = sab * inv_n - mu_a * mu_b;
      acc += ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
             ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  }
  if (windows == 0) throw DataError("ssim: no 8x8 window fits inside the mask");
  return acc / windows;
}

double snr(const Image& img, const Mask& signal_mask, const Mask& noise_mask) {
  if (signal_mask.height != img.height || signal_mask.width != img.width ||
      noise_mask.height != img.height || noise_mask.width != img.width)
    throw DataError("snr: mask extents do not match the image");
  double s = 0;
  std::size_t ns = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (signal_mask.at(y, x)) {
        s += img.at(y, x);
        ++ns;
      }
  if (ns == 0) throw DataError("snr: empty signal mask");
  const double mean_sig = s / ns;

  double nsum = 0, nsq = 0;
  std::size_t nn = 0;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      if (noise_mask.at(y, x)) {
        nsum += img.at(y, x);
        nsq += static_cast<double>(img.at(y, x)) * img.at(y, x);
        ++nn;
      }
  if (nn == 0) throw DataError("snr: empty noise mask");
  const double var = nsq / nn - (nsum / nn) * (nsum / nn);
  if (var <= 0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(mean_sig / std::sqrt(var));
}

}  // namespace wscnn::metrics
