// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace wscnn::fft {

using cplx = std::complex<double>;

// Mixed-radix Cooley-Tukey plan for one transform length. Factors 2/3/5/7 are
// split recursively; a residual prime factor falls back to a naive DFT, so any
// length works (raster extents here are 2^a*3^b*5^c in practice).
//
// Forward is unnormalized; inverse carries the 1/n factor. execute() is const
// and thread-safe given per-thread scratch.
class Plan {
public:
  explicit Plan(std::size_t n);

  std::size_t length() const { return n_; }

  // scratch must hold >= n elements; in and out must not alias.
  void execute(const cplx* in, cplx* out, cplx* scratch, bool inverse) const;

private:
  void rec(const cplx* in, std::size_t in_stride, cplx* out, cplx* scratch,
           std::size_t m, std::size_t mult, const cplx* tw) const;

  std::size_t n_ = 0;
  std::vector<cplx> tw_fwd_;  // exp(-2*pi*i*k/n)
  std::vector<cplx> tw_inv_;
};

// Process-wide plan cache.
const Plan& plan(std::size_t n);

// In-place 2-D transform of a row-major h x w complex raster.
void fft2d(std::vector<cplx>& data, std::size_t h, std::size_t w, bool inverse);

}  // namespace wscnn::fft
