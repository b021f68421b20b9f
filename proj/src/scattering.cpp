// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/scattering.hpp"

#include <cmath>
#include <string>

#include "wscnn/fft.hpp"

namespace wscnn {

namespace {

using fft::cplx;

void check_extents(const Image& x, const FilterBank& bank) {
  if (x.height != bank.height || x.width != bank.width)
    throw DataError("scattering: image " + std::to_string(x.height) + "x" +
                    std::to_string(x.width) + " does not match bank " +
                    std::to_string(bank.height) + "x" + std::to_string(bank.width));
}

std::vector<cplx> forward_fft(const Image& x, const Mask* mask) {
  std::vector<cplx> f(x.numel());
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double v = (mask && !mask->v.empty() && mask->v[i] == 0) ? 0.0 : x.v[i];
    f[i] = cplx(v, 0.0);
  }
  fft::fft2d(f, x.height, x.width, false);
  return f;
}

// Low-pass by phi_hat then subsample by d along both axes starting at offset
// 0. When the extents divide evenly the spectrum is folded and a small
// inverse transform is used; otherwise a full inverse transform is strided.
std::vector<pix> lowpass_subsample(const std::vector<cplx>& spec, const FilterBank& bank,
                                   int d, int out_h, int out_w) {
  const int h = bank.height, w = bank.width;
  std::vector<cplx> prod(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) prod[i] = spec[i] * bank.phi_hat[i];

  std::vector<pix> out(static_cast<std::size_t>(out_h) * out_w);
  if (h % d == 0 && w % d == 0) {
    std::vector<cplx> small(static_cast<std::size_t>(out_h) * out_w, cplx(0, 0));
    for (int a = 0; a < h; ++a) {
      const int sa = a % out_h;
      for (int b = 0; b < w; ++b)
        small[static_cast<std::size_t>(sa) * out_w + b % out_w] +=
            prod[static_cast<std::size_t>(a) * w + b];
    }
    const double norm = 1.0 / (d * d);
    for (auto& v : small) v *= norm;
    fft::fft2d(small, out_h, out_w, true);
    for (std::size_t i = 0; i < small.size(); ++i)
      out[i] = static_cast<pix>(std::max(0.0, small[i].real()));
  } else {
    fft::fft2d(prod, h, w, true);
    for (int a = 0; a < out_h; ++a)
      for (int b = 0; b < out_w; ++b)
        out[static_cast<std::size_t>(a) * out_w + b] = static_cast<pix>(
            std::max(0.0, prod[static_cast<std::size_t>(a * d) * w + b * d].real()));
  }
  return out;
}

}  // namespace

std::vector<Image> propagate_u1(const Image& x, const FilterBank& bank) {
  check_extents(x, bank);
  const auto xhat = forward_fft(x, nullptr);
  const int n = bank.n_psi();
  std::vector<Image> u(static_cast<std::size_t>(n));
  parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t c) {
    std::vector<cplx> buf(xhat.size());
    const auto& psi = bank.psi_hat[c];
    for (std::size_t i = 0; i < xhat.size(); ++i) buf[i] = xhat[i] * psi[i];
    fft::fft2d(buf, bank.height, bank.width, true);
    Image m(bank.height, bank.width);
    for (std::size_t i = 0; i < buf.size(); ++i)
      m.v[i] = static_cast<pix>(std::abs(buf[i]));
    u[c] = std::move(m);
  });
  return u;
}

FeatureStack scatter(const Image& x, const FilterBank& bank, const Mask* mask) {
  check_extents(x, bank);
  if (mask && (mask->height != x.height || mask->width != x.width))
    throw DataError("scattering: mask extents do not match image");

  const int d = 1 << bank.params.J;
  FeatureStack st;
  st.J = bank.params.J;
  st.L = bank.params.L;
  st.src_h = x.height;
  st.src_w = x.width;
  st.map_h = (x.height + d - 1) / d;
  st.map_w = (x.width + d - 1) / d;
  st.maps.resize(1 + static_cast<std::size_t>(bank.n_psi()));

  const auto xhat = forward_fft(x, mask);
  st.maps[0] = lowpass_subsample(xhat, bank, d, st.map_h, st.map_w);

  parallel_for(0, static_cast<std::size_t>(bank.n_psi()), [&](std::size_t c) {
    std::vector<cplx> buf(xhat.size());
    const auto& psi = bank.psi_hat[c];
    for (std::size_t i = 0; i < xhat.size(); ++i) buf[i] = xhat[i] * psi[i];
    fft::fft2d(buf, bank.height, bank.width, true);
    for (auto& v : buf) v = cplx(std::abs(v), 0.0);
    fft::fft2d(buf, bank.height, bank.width, false);
    st.maps[1 + c] = lowpass_subsample(buf, bank, d, st.map_h, st.map_w);
  });
  return st;
}

std::vector<FeatureStack> scatter_batch(const std::vector<Image>& images,
                                        const FilterBank& bank, const Mask* mask) {
  std::vector<FeatureStack> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(scatter(img, bank, mask));
  return out;
}

double s1_energy(const FeatureStack& stack) {
  double e = 0.0;
  for (std::size_t m = 1; m < stack.maps.size(); ++m)
    for (pix v : stack.maps[m]) e += static_cast<double>(v) * v;
  return e;
}

}  // namespace wscnn
