// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <limits>

#include "testutil.hpp"
#include "wscnn/metrics.hpp"

using wscnn::Image;
using wscnn::Mask;
using wscnn::Rng;
namespace metrics = wscnn::metrics;

TEST_CASE("psnr closed forms") {
  Rng rng(31);
  const Image a = testutil::smooth_phantom(24, 24, rng);
  CHECK(std::isinf(metrics::psnr(a, a, 1.0)));

  // constant difference delta with peak P gives exactly 20*log10(P/delta)
  const double peak = 2.0, delta = 0.125;
  Image c1(16, 16, 0.5f), c2(16, 16, 0.5f + static_cast<wscnn::pix>(delta));
  CHECK(metrics::psnr(c1, c2, peak) ==
        doctest::Approx(20.0 * std::log10(peak / delta)).epsilon(1e-12));
}

TEST_CASE("psnr matches a direct-summation oracle") {
  Rng rng(32);
  const Image a = testutil::smooth_phantom(20, 28, rng);
  const Image b = testutil::smooth_phantom(20, 28, rng);
  const double peak = 1.5;
  double mse = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double d = static_cast<double>(a.v[i]) - b.v[i];
    mse += d * d;
  }
  mse /= a.numel();
  const double want = 10.0 * std::log10(peak * peak / mse);
  CHECK(metrics::psnr(a, b, peak) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("psnr and ssim are symmetric under a shared peak") {
  Rng rng(33);
  const Image a = testutil::smooth_phantom(24, 32, rng);
  const Image b = testutil::smooth_phantom(24, 32, rng);
  CHECK(metrics::psnr(a, b, 2.0) == doctest::Approx(metrics::psnr(b, a, 2.0)).epsilon(1e-12));
  CHECK(metrics::ssim(a, b, 2.0) == doctest::Approx(metrics::ssim(b, a, 2.0)).epsilon(1e-12));
}

TEST_CASE("ssim is exactly 1 on identical images") {
  Rng rng(34);
  const Image a = testutil::smooth_phantom(24, 32, rng);
  CHECK(metrics::ssim(a, a, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ssim of constant versus constant-plus-delta is the luminance term") {
  const double peak = 1.0, c = 0.4, delta = 0.2;
  Image a(16, 16, static_cast<wscnn::pix>(c));
  Image b(16, 16, static_cast<wscnn::pix>(c + delta));
  const double c1 = 0.01 * 0.01;
  const double want = (2 * c * (c + delta) + c1) / (c * c + (c + delta) * (c + delta) + c1);
  CHECK(metrics::ssim(a, b, peak) == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("ssim of an inverted structured image is low") {
  Rng rng(35);
  const Image a = testutil::smooth_phantom(32, 48, rng);
  const double peak = metrics::mask_peak(a);
  Image inv(32, 48);
  for (std::size_t i = 0; i < a.numel(); ++i) inv.v[i] = static_cast<wscnn::pix>(peak - a.v[i]);
  // measured ~0.1 on these phantoms; 0.5 is the recorded ceiling
  CHECK(metrics::ssim(a, inv, peak) < 0.5);
}

TEST_CASE("snr closed form and sentinel") {
  Image img(8, 16, 0);
  Mask signal(8, 16, false), noise(8, 16, false);
  Rng rng(36);
  // signal region mean 10
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      img.at(y, x) = 10.0f;
      signal.set(y, x, true);
    }
  // noise region with std 1 (alternating +-1 around 0)
  for (int y = 0; y < 8; ++y)
    for (int x = 8; x < 16; ++x) {
      img.at(y, x) = ((x + y) % 2 == 0) ? 1.0f : -1.0f;
      noise.set(y, x, true);
    }
  CHECK(metrics::snr(img, signal, noise) == doctest::Approx(20.0).epsilon(1e-9));

  Image flat(8, 16, 5.0f);
  CHECK(std::isinf(metrics::snr(flat, signal, noise)));
}

TEST_CASE("snr matches an oracle on random data") {
  Rng rng(37);
  Image img(12, 12);
  Mask signal(12, 12, false), noise(12, 12, false);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) {
      img.at(y, x) = static_cast<wscnn::pix>(rng.uniform(0.5, 2.0));
      (x < 6 ? signal : noise).set(y, x, true);
    }
  double s = 0;
  std::size_t ns = 0;
  double nsum = 0, nsq = 0;
  std::size_t nn = 0;
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) {
      if (x < 6) {
        s += img.at(y, x);
        ++ns;
      } else {
        nsum += img.at(y, x);
        nsq += static_cast<double>(img.at(y, x)) * img.at(y, x);
        ++nn;
      }
    }
  const double want =
      20.0 * std::log10((s / ns) / std::sqrt(nsq / nn - (nsum / nn) * (nsum / nn)));
  CHECK(metrics::snr(img, signal, noise) == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("metrics ignore pixels outside the mask") {
  Rng rng(38);
  Image a = testutil::smooth_phantom(24, 32, rng);
  Image b = testutil::smooth_phantom(24, 32, rng);
  Mask mask(24, 32, false);
  for (int y = 4; y < 20; ++y)
    for (int x = 4; x < 28; ++x) mask.set(y, x, true);

  const double p0 = metrics::psnr(a, b, 1.0, &mask);
  const double s0 = metrics::ssim(a, b, 1.0, &mask);

  // poison everything outside the mask with extreme values
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 32; ++x)
      if (!mask.at(y, x)) {
        a.at(y, x) = 1e6f;
        b.at(y, x) = -1e6f;
      }
  CHECK(metrics::psnr(a, b, 1.0, &mask) == p0);
  CHECK(metrics::ssim(a, b, 1.0, &mask) == s0);
}

TEST_CASE("mask_peak returns the reference maximum inside the mask") {
  Image a(4, 4, 1.0f);
  a.at(0, 0) = 9.0f;
  Mask m(4, 4, true);
  m.set(0, 0, false);
  CHECK(metrics::mask_peak(a) == 9.0);
  CHECK(metrics::mask_peak(a, &m) == 1.0);
}
