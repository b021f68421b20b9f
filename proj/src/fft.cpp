// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "wscnn/common.hpp"

namespace wscnn::fft {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::size_t smallest_factor(std::size_t m) {
  for (std::size_t p : {std::size_t(2), std::size_t(3), std::size_t(5), std::size_t(7)})
    if (m % p == 0) return p;
  for (std::size_t p = 11; p * p <= m; p += 2)
    if (m % p == 0) return p;
  return m;
}

}  // namespace

Plan::Plan(std::size_t n) : n_(n) {
  if (n == 0) throw DataError("fft: zero-length transform");
  tw_fwd_.resize(n);
  tw_inv_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    tw_fwd_[k] = {std::cos(a), std::sin(a)};
    tw_inv_[k] = std::conj(tw_fwd_[k]);
  }
}

void Plan::rec(const cplx* in, std::size_t in_stride, cplx* out, cplx* scratch,
               std::size_t m, std::size_t mult, const cplx* tw) const {
  if (m == 1) {
    out[0] = in[0];
    return;
  }
  const std::size_t p = smallest_factor(m);
  if (p == m) {
    // prime length: naive DFT against the shared twiddle table
    for (std::size_t k = 0; k < m; ++k) {
      cplx acc = in[0];
      for (std::size_t j = 1; j < m; ++j)
        acc += tw[(j * k * mult) % n_] * in[j * in_stride];
      out[k] = acc;
    }
    return;
  }
  const std::size_t sub = m / p;
  for (std::size_t q = 0; q < p; ++q)
    rec(in + q * in_stride, in_stride * p, out + q * sub, scratch + q * sub, sub,
        mult * p, tw);
  for (std::size_t i = 0; i < m; ++i) scratch[i] = out[i];
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t base = k % sub;
    cplx acc = scratch[base];
    for (std::size_t q = 1; q < p; ++q)
      acc += tw[(q * k * mult) % n_] * scratch[q * sub + base];
    out[k] = acc;
  }
}

void Plan::execute(const cplx* in, cplx* out, cplx* scratch, bool inverse) const {
  rec(in, 1, out, scratch, n_, 1, inverse ? tw_inv_.data() : tw_fwd_.data());
  if (inverse) {
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] *= s;
  }
}

const Plan& plan(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<Plan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<Plan>(n)).first;
  return *it->second;
}

void fft2d(std::vector<cplx>& data, std::size_t h, std::size_t w, bool inverse) {
  if (data.size() != h * w) throw DataError("fft2d: raster size mismatch");
  const Plan& pw = plan(w);
  const Plan& ph = plan(h);
  std::vector<cplx> scratch(std::max(h, w));
  std::vector<cplx> line(std::max(h, w));
  for (std::size_t r = 0; r < h; ++r) {
    pw.execute(data.data() + r * w, line.data(), scratch.data(), inverse);
    for (std::size_t c = 0; c < w; ++c) data[r * w + c] = line[c];
  }
  std::vector<cplx> col(h);
  for (std::size_t c = 0; c < w; ++c) {
    for (std::size_t r = 0; r < h; ++r) col[r] = data[r * w + c];
    ph.execute(col.data(), line.data(), scratch.data(), inverse);
    for (std::size_t r = 0; r < h; ++r) data[r * w + c] = line[r];
  }
}

}  // namespace wscnn::fft
