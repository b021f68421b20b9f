// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wscnn/nd_array.hpp"

namespace wscnn {

struct AdamConfig {
  real lr = real(0.0001);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real eps = real(1e-8);
};

// Bias-corrected Adam over a fixed parameter list. Moment buffers are created
// lazily on the first step from the parameter shapes.
class AdamState {
public:
  explicit AdamState(AdamConfig cfg = {}) : cfg_(cfg) {}

  // Applies one update in place. Rejects the whole step (state untouched) if
  // any gradient entry is non-finite.
  void step(const std::vector<NdArray*>& params, const std::vector<const NdArray*>& grads);

  std::uint64_t t() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  std::vector<NdArray>& moments_m() { return m_; }
  std::vector<NdArray>& moments_v() { return v_; }
  void set_t(std::uint64_t t) { t_ = t; }

private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<NdArray> m_;
  std::vector<NdArray> v_;
};

}  // namespace wscnn
