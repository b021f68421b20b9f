// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wscnn/nd_array.hpp"

namespace wscnn::ops {

// 2-D cross-correlation (no kernel flip) with zero padding.
// x: [N,C,H,W], w: [K,C,kh,kw], bias: [K]. Output [N,K,H',W'] with
// H' = floor((H + 2*pad - kh)/stride) + 1.
NdArray conv2d(const NdArray& x, const NdArray& w, const NdArray& bias, int stride, int pad);

// Transposed convolution, the exact adjoint of conv2d with the same kernels.
// x: [N,C,H,W], w: [C,K,kh,kw]. Output [N,K,stride*H,stride*W]; requires
// kh == kw and (kh - stride) nonnegative and even, which fixes the implied
// padding at (kh - stride)/2.
NdArray deconv2d(const NdArray& x, const NdArray& w, int stride);

int deconv_pad(int k, int stride);

NdArray relu(const NdArray& x);

// mean of squared differences, accumulated in double
real mse(const NdArray& pred, const NdArray& target);

NdArray add(const NdArray& a, const NdArray& b);

// gradients -----------------------------------------------------------------

NdArray conv2d_grad_input(const NdArray& g, const NdArray& w, int in_h, int in_w,
                          int stride, int pad);
NdArray conv2d_grad_kernels(const NdArray& g, const NdArray& x, int kh, int kw,
                            int stride, int pad);
NdArray conv2d_grad_bias(const NdArray& g);

NdArray deconv2d_grad_input(const NdArray& g, const NdArray& w, int stride);
NdArray deconv2d_grad_kernels(const NdArray& g, const NdArray& x, int kh, int kw, int stride);

// mask is the forward input x; subgradient at 0 is 0
NdArray relu_grad(const NdArray& g, const NdArray& x);

NdArray mse_grad(const NdArray& pred, const NdArray& target, real upstream);

}  // namespace wscnn::ops
