// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/adam.hpp"

#include <cmath>
#include <string>

namespace wscnn {

void AdamState::step(const std::vector<NdArray*>& params,
                     const std::vector<const NdArray*>& grads) {
  if (params.size() != grads.size())
    throw DataError("adam: parameter and gradient counts differ");
  if (m_.empty()) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const NdArray* p : params) {
      m_.emplace_back(p->shape());
      v_.emplace_back(p->shape());
    }
  }
  if (m_.size() != params.size())
    throw DataError("adam: parameter count changed after the first step");

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i]))
      throw DataError("adam: gradient shape " + shape_to_string(grads[i]->shape()) +
                      " does not match parameter " + std::to_string(i) + " shape " +
                      shape_to_string(params[i]->shape()));
    if (!grads[i]->all_finite())
      throw NumericalError("adam: non-finite gradient in parameter " + std::to_string(i) +
                           "; step rejected");
  }

  t_ += 1;
  const double bc1 = 1.0 - std::pow(static_cast<double>(cfg_.beta1), static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(static_cast<double>(cfg_.beta2), static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    NdArray& p = *params[i];
    const NdArray& g = *grads[i];
    NdArray& m = m_[i];
    NdArray& v = v_[i];
    for (std::size_t j = 0; j < p.numel(); ++j) {
      m[j] = cfg_.beta1 * m[j] + (real(1) - cfg_.beta1) * g[j];
      v[j] = cfg_.beta2 * v[j] + (real(1) - cfg_.beta2) * g[j] * g[j];
      const real mhat = static_cast<real>(m[j] / bc1);
      const real vhat = static_cast<real>(v[j] / bc2);
      p[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace wscnn
