// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "wscnn/filter_bank.hpp"
#include "wscnn/image.hpp"

namespace wscnn {

// Ordered set of 1 + J*L subsampled scattering maps for one image.
// Index 0 is S0 = (x * phi_J) downsampled by 2^J; indices 1..J*L are the S1
// maps ordered (j=0, r=0..L-1) then (j=1, r=0..L-1) and so on.
struct FeatureStack {
  int map_h = 0;
  int map_w = 0;
  int J = 0;
  int L = 0;
  int src_h = 0;
  int src_w = 0;
  std::vector<std::vector<pix>> maps;

  int n_maps() const { return static_cast<int>(maps.size()); }
  bool compatible(const FeatureStack& o) const {
    return map_h == o.map_h && map_w == o.map_w && J == o.J && L == o.L &&
           src_h == o.src_h && src_w == o.src_w && maps.size() == o.maps.size();
  }
};

// First-order propagation operators U1[j][r] = |x conv psi_{j,r}| at full
// resolution, via frequency-domain circular convolution. Ordered like the
// bank's psi filters.
std::vector<Image> propagate_u1(const Image& x, const FilterBank& bank);

// Full first-order scattering: S0 plus the J*L S1 maps, each low-passed by
// phi_J and subsampled by 2^J starting at offset 0. Pixels outside the mask
// (when given) are zero-filled before the transform.
FeatureStack scatter(const Image& x, const FilterBank& bank, const Mask* mask = nullptr);

// Element-wise application over an ordered image list.
std::vector<FeatureStack> scatter_batch(const std::vector<Image>& images,
                                        const FilterBank& bank, const Mask* mask = nullptr);

// Sum of squared S1 coefficients (maps 1..J*L); the motion-sensitivity
// statistic behind the maximum-selection fusion rule.
double s1_energy(const FeatureStack& stack);

}  // namespace wscnn
