// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wscnn/image.hpp"

namespace wscnn::metrics {

// Peak signal-to-noise ratio in dB over the mask (all pixels when absent).
// Identical inputs (MSE == 0) return +infinity.
double psnr(const Image& a, const Image& b, double peak, const Mask* mask = nullptr);

// Mean SSIM over 8x8 sliding windows (stride 1, uniform weights) that lie
// fully inside the mask. C1 = (0.01*peak)^2, C2 = (0.03*peak)^2.
double ssim(const Image& a, const Image& b, double peak, const Mask* mask = nullptr);

// 20*log10(mean(signal) / std(noise)); zero noise deviation returns +infinity.
double snr(const Image& img, const Mask& signal_mask, const Mask& noise_mask);

// Default PSNR/SSIM peak: the reference image's maximum inside the mask.
double mask_peak(const Image& reference, const Mask* mask = nullptr);

}  // namespace wscnn::metrics
