// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Finite-difference gradient checks. This binary links the float64 build of
// the library (WSCNN_REAL_DOUBLE); central differences with step 1e-5 are
// compared entrywise at 1e-4 relative tolerance.

#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "wscnn/invnet.hpp"
#include "wscnn/rng.hpp"
#include "wscnn/tape.hpp"
#include "wscnn/tensor_ops.hpp"

using wscnn::NdArray;
using wscnn::real;
using wscnn::Rng;
using wscnn::Shape;
using wscnn::Tape;

static_assert(sizeof(real) == 8, "gradient checks require the float64 build");

namespace {

constexpr double kStep = 1e-5;
constexpr double kRelTol = 1e-4;

NdArray random_array(const Shape& s, Rng& rng, double lo = -1, double hi = 1) {
  NdArray a(s);
  for (std::size_t i = 0; i < a.numel(); ++i) a[i] = rng.uniform(lo, hi);
  return a;
}

// loss(inputs) must rebuild the graph from scratch on every call.
using LossFn = std::function<double(const std::vector<NdArray>&)>;

// Checks d loss / d inputs[which] against central differences, entry by entry.
void check_gradient(const LossFn& loss, std::vector<NdArray> inputs, std::size_t which,
                    const NdArray& analytic) {
  REQUIRE(analytic.numel() == inputs[which].numel());
  for (std::size_t i = 0; i < inputs[which].numel(); ++i) {
    const double saved = inputs[which][i];
    inputs[which][i] = saved + kStep;
    const double up = loss(inputs);
    inputs[which][i] = saved - kStep;
    const double down = loss(inputs);
    inputs[which][i] = saved;
    const double numeric = (up - down) / (2 * kStep);
    const double got = analytic[i];
    const double denom = std::max({std::abs(numeric), std::abs(got), 1e-6});
    CHECK_MESSAGE(std::abs(got - numeric) / denom <= kRelTol,
                  "entry ", i, ": analytic ", got, " vs numeric ", numeric);
  }
}

}  // namespace

TEST_CASE("conv2d gradients match finite differences") {
  Rng rng(101);
  for (const auto& [stride, pad] : std::vector<std::pair<int, int>>{{1, 1}, {2, 0}}) {
    std::vector<NdArray> inputs;
    inputs.push_back(random_array({2, 2, 5, 6}, rng));  // x
    inputs.push_back(random_array({3, 2, 3, 3}, rng));  // w
    inputs.push_back(random_array({3}, rng));           // b
    const NdArray target = random_array(
        wscnn::ops::conv2d(inputs[0], inputs[1], inputs[2], stride, pad).shape(), rng);

    const LossFn loss = [&, stride = stride, pad = pad](const std::vector<NdArray>& in) {
      return static_cast<double>(
          wscnn::ops::mse(wscnn::ops::conv2d(in[0], in[1], in[2], stride, pad), target));
    };

    Tape tape;
    const auto x = tape.leaf(inputs[0], true);
    const auto w = tape.leaf(inputs[1], true);
    const auto b = tape.leaf(inputs[2], true);
    const auto t = tape.leaf(target, false);
    tape.backward(tape.mse_loss(tape.conv2d(x, w, b, stride, pad), t));

    check_gradient(loss, inputs, 0, tape.grad(x));
    check_gradient(loss, inputs, 1, tape.grad(w));
    check_gradient(loss, inputs, 2, tape.grad(b));
  }
}

TEST_CASE("deconv2d gradients match finite differences") {
  Rng rng(102);
  for (int kh : {2, 4}) {
    std::vector<NdArray> inputs;
    inputs.push_back(random_array({1, 3, 3, 4}, rng));  // x
    inputs.push_back(random_array({3, 2, static_cast<std::size_t>(kh),
                                   static_cast<std::size_t>(kh)}, rng));  // w
    const NdArray target =
        random_array(wscnn::ops::deconv2d(inputs[0], inputs[1], 2).shape(), rng);

    const LossFn loss = [&](const std::vector<NdArray>& in) {
      return static_cast<double>(wscnn::ops::mse(wscnn::ops::deconv2d(in[0], in[1], 2), target));
    };

    Tape tape;
    const auto x = tape.leaf(inputs[0], true);
    const auto w = tape.leaf(inputs[1], true);
    const auto t = tape.leaf(target, false);
    tape.backward(tape.mse_loss(tape.deconv2d(x, w, 2), t));

    check_gradient(loss, inputs, 0, tape.grad(x));
    check_gradient(loss, inputs, 1, tape.grad(w));
  }
}

TEST_CASE("relu gradient is the positive-part indicator") {
  Rng rng(103);
  // sample away from the kink so central differences are valid
  NdArray x({40});
  for (std::size_t i = 0; i < x.numel(); ++i) {
    double v = rng.uniform(-1, 1);
    while (std::abs(v) < 1e-3) v = rng.uniform(-1, 1);
    x[i] = v;
  }
  const NdArray target = random_array({40}, rng);

  std::vector<NdArray> inputs{x};
  const LossFn loss = [&](const std::vector<NdArray>& in) {
    return static_cast<double>(wscnn::ops::mse(wscnn::ops::relu(in[0]), target));
  };

  Tape tape;
  const auto xn = tape.leaf(x, true);
  const auto t = tape.leaf(target, false);
  tape.backward(tape.mse_loss(tape.relu(xn), t));
  check_gradient(loss, inputs, 0, tape.grad(xn));

  // the mask itself
  const NdArray& g = tape.grad(xn);
  for (std::size_t i = 0; i < x.numel(); ++i)
    if (x[i] < 0) CHECK(g[i] == real(0));
}

TEST_CASE("add and sum gradients match finite differences") {
  Rng rng(104);
  std::vector<NdArray> inputs;
  inputs.push_back(random_array({3, 4}, rng));
  inputs.push_back(random_array({3, 4}, rng));

  const LossFn loss = [&](const std::vector<NdArray>& in) {
    double s = 0;
    const NdArray both = wscnn::ops::add(in[0], in[1]);
    const NdArray r = wscnn::ops::relu(both);
    for (std::size_t i = 0; i < r.numel(); ++i) s += r[i];
    return s;
  };

  Tape tape;
  const auto a = tape.leaf(inputs[0], true);
  const auto b = tape.leaf(inputs[1], true);
  tape.backward(tape.sum(tape.relu(tape.add(a, b))));
  check_gradient(loss, inputs, 0, tape.grad(a));
  check_gradient(loss, inputs, 1, tape.grad(b));
}

TEST_CASE("mse gradient matches finite differences") {
  Rng rng(105);
  std::vector<NdArray> inputs;
  inputs.push_back(random_array({5, 5}, rng));
  const NdArray target = random_array({5, 5}, rng);

  const LossFn loss = [&](const std::vector<NdArray>& in) {
    return static_cast<double>(wscnn::ops::mse(in[0], target));
  };

  Tape tape;
  const auto p = tape.leaf(inputs[0], true);
  const auto t = tape.leaf(target, false);
  tape.backward(tape.mse_loss(p, t));
  check_gradient(loss, inputs, 0, tape.grad(p));
}

TEST_CASE("conv chain through relu matches finite differences") {
  Rng rng(106);
  std::vector<NdArray> inputs;
  inputs.push_back(random_array({1, 2, 6, 6}, rng));  // x
  inputs.push_back(random_array({2, 2, 3, 3}, rng));  // w1
  inputs.push_back(random_array({2}, rng));           // b1
  inputs.push_back(random_array({2, 2, 4, 4}, rng));  // deconv kernels
  NdArray target;

  const auto forward = [&](const std::vector<NdArray>& in) {
    const NdArray c = wscnn::ops::conv2d(in[0], in[1], in[2], 1, 1);
    const NdArray r = wscnn::ops::relu(c);
    return wscnn::ops::deconv2d(r, in[3], 2);
  };
  target = random_array(forward(inputs).shape(), rng);

  const LossFn loss = [&](const std::vector<NdArray>& in) {
    return static_cast<double>(wscnn::ops::mse(forward(in), target));
  };

  Tape tape;
  const auto x = tape.leaf(inputs[0], true);
  const auto w1 = tape.leaf(inputs[1], true);
  const auto b1 = tape.leaf(inputs[2], true);
  const auto wd = tape.leaf(inputs[3], true);
  const auto t = tape.leaf(target, false);
  tape.backward(tape.mse_loss(tape.deconv2d(tape.relu(tape.conv2d(x, w1, b1, 1, 1)), wd, 2), t));

  check_gradient(loss, inputs, 0, tape.grad(x));
  check_gradient(loss, inputs, 1, tape.grad(w1));
  check_gradient(loss, inputs, 2, tape.grad(b1));
  check_gradient(loss, inputs, 3, tape.grad(wd));
}

TEST_CASE("end-to-end network gradients pass at 1e-3 on a tiny config") {
  // base_channels=4, 8x8 inputs; a stratified subset of entries per parameter
  // tensor is checked against central differences.
  wscnn::invnet::NetworkConfig cfg;
  cfg.in_channels = 3;
  cfg.base_channels = 4;
  auto model = wscnn::invnet::build_model(cfg, 17);

  Rng rng(107);
  NdArray input({1, 3, 8, 8});
  for (std::size_t i = 0; i < input.numel(); ++i) input[i] = rng.uniform(0, 1);
  NdArray target({1, 1, 32, 32});
  for (std::size_t i = 0; i < target.numel(); ++i) target[i] = rng.uniform(0, 1);

  std::vector<NdArray*> params;
  model.visit_params([&](const std::string&, NdArray& a) { params.push_back(&a); });

  const auto loss_of_model = [&]() {
    Tape tape;
    const auto out = wscnn::invnet::forward_on_tape(model, tape, tape.leaf(input, false), {});
    return static_cast<double>(wscnn::ops::mse(tape.value(out), target));
  };

  // analytic gradients
  Tape tape;
  std::vector<Tape::NodeId> ids;
  for (NdArray* p : params) ids.push_back(tape.leaf(*p, true));
  const auto out = wscnn::invnet::forward_on_tape(model, tape, tape.leaf(input, false), ids);
  tape.backward(tape.mse_loss(out, tape.leaf(target, false)));

  const double h = 1e-5;
  int checked = 0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    NdArray& p = *params[pi];
    const NdArray& g = tape.grad(ids[pi]);
    // first, middle and last entry of every parameter tensor
    for (const std::size_t e : {std::size_t(0), p.numel() / 2, p.numel() - 1}) {
      const double saved = p[e];
      p[e] = saved + h;
      const double up = loss_of_model();
      p[e] = saved - h;
      const double down = loss_of_model();
      p[e] = saved;
      const double numeric = (up - down) / (2 * h);
      const double denom = std::max({std::abs(numeric), std::abs(g[e]), 1e-6});
      CHECK_MESSAGE(std::abs(g[e] - numeric) / denom <= 1e-3,
                    "param ", pi, " entry ", e, ": ", g[e], " vs ", numeric);
      ++checked;
    }
  }
  CHECK(checked >= 3 * static_cast<int>(params.size()));
}
