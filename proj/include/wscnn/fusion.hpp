// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "wscnn/image.hpp"
#include "wscnn/scattering.hpp"

namespace wscnn::fusion {

struct RegistrationResult {
  int dx = 0;
  int dy = 0;
  double score = 0.0;  // normalized cross-correlation in [-1, 1]
  Image registered;
};

// Exhaustive integer-shift search maximizing masked NCC over [-window,
// window]^2, with circular shifting (consistent with the periodic transform
// pipeline). Ties break toward the smallest |(dx,dy)|, then smallest dx,
// then dy. A zero-variance reference inside the mask is an error.
RegistrationResult register_translation(const Image& moving, const Image& reference,
                                        int window, const Mask* mask = nullptr);

// Element-wise maximum of two compatible stacks.
FeatureStack fuse_pair(const FeatureStack& a, const FeatureStack& b);

// Left fold of fuse_pair; equal to the global element-wise maximum.
FeatureStack fuse_all(std::span<const FeatureStack> stacks);

// Image-domain temporal maximum intensity projection baseline.
Image tmip_baseline(std::span<const Image> images);

// Index of the image series with the highest total ROI energy; the default
// registration reference.
std::size_t reference_index(std::span<const std::vector<Image>> tds, const Mask* mask = nullptr);

}  // namespace wscnn::fusion
