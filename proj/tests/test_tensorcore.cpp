// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "wscnn/adam.hpp"
#include "wscnn/rng.hpp"
#include "wscnn/tape.hpp"
#include "wscnn/tensor_ops.hpp"

using wscnn::AdamConfig;
using wscnn::AdamState;
using wscnn::NdArray;
using wscnn::real;
using wscnn::Rng;
using wscnn::Shape;
using wscnn::Tape;

namespace {

NdArray random_array(const Shape& s, Rng& rng, double lo = -1, double hi = 1) {
  NdArray a(s);
  for (std::size_t i = 0; i < a.numel(); ++i)
    a[i] = static_cast<real>(rng.uniform(lo, hi));
  return a;
}

// quadratic-time reference convolution (cross-correlation, zero padding)
NdArray conv2d_reference(const NdArray& x, const NdArray& w, const NdArray& b, int stride,
                         int pad) {
  const int n = static_cast<int>(x.size(0)), c = static_cast<int>(x.size(1));
  const int h = static_cast<int>(x.size(2)), wd = static_cast<int>(x.size(3));
  const int k = static_cast<int>(w.size(0));
  const int kh = static_cast<int>(w.size(2)), kw = static_cast<int>(w.size(3));
  const int oh = (h + 2 * pad - kh) / stride + 1;
  const int ow = (wd + 2 * pad - kw) / stride + 1;
  NdArray out({static_cast<std::size_t>(n), static_cast<std::size_t>(k),
               static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
  for (int in = 0; in < n; ++in)
    for (int ik = 0; ik < k; ++ik)
      for (int io = 0; io < oh; ++io)
        for (int jo = 0; jo < ow; ++jo) {
          double acc = b[static_cast<std::size_t>(ik)];
          for (int ic = 0; ic < c; ++ic)
            for (int di = 0; di < kh; ++di)
              for (int dj = 0; dj < kw; ++dj) {
                const int ii = io * stride - pad + di;
                const int ij = jo * stride - pad + dj;
                if (ii < 0 || ii >= h || ij < 0 || ij >= wd) continue;
                acc += static_cast<double>(x.at4(in, ic, ii, ij)) * w.at4(ik, ic, di, dj);
              }
          out.at4(in, ik, io, jo) = static_cast<real>(acc);
        }
  return out;
}

double dot(const NdArray& a, const NdArray& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) s += static_cast<double>(a[i]) * b[i];
  return s;
}

}  // namespace

TEST_CASE("conv2d trivial kernels") {
  // 1x1 scaling kernel on an all-ones image
  NdArray x({1, 1, 3, 3}, real(1));
  NdArray w({1, 1, 1, 1});
  w[0] = 2;
  NdArray b({1});
  const NdArray y = wscnn::ops::conv2d(x, w, b, 1, 0);
  CHECK(y.shape() == Shape{1, 1, 3, 3});
  for (std::size_t i = 0; i < y.numel(); ++i) CHECK(y[i] == real(2));

  // identity-center 3x3 kernel reproduces the input
  Rng rng(5);
  const NdArray xr = random_array({1, 1, 6, 7}, rng);
  NdArray wid({1, 1, 3, 3});
  wid.at4(0, 0, 1, 1) = 1;
  const NdArray yid = wscnn::ops::conv2d(xr, wid, b, 1, 1);
  for (std::size_t i = 0; i < xr.numel(); ++i) CHECK(yid[i] == xr[i]);
}

TEST_CASE("conv2d matches the nested-loop reference") {
  Rng rng(6);
  for (const auto& [stride, pad] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {2, 0}, {2, 1}}) {
    const NdArray x = random_array({1, 2, 5, 5}, rng);
    const NdArray w = random_array({3, 2, 3, 3}, rng);
    const NdArray b = random_array({3}, rng);
    const NdArray got = wscnn::ops::conv2d(x, w, b, stride, pad);
    const NdArray want = conv2d_reference(x, w, b, stride, pad);
    REQUIRE(got.shape() == want.shape());
    for (std::size_t i = 0; i < got.numel(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-6));
  }
}

TEST_CASE("conv2d rejects mismatched dimensions with a named message") {
  NdArray x({1, 3, 5, 5});
  NdArray w({2, 2, 3, 3});
  NdArray b({2});
  try {
    wscnn::ops::conv2d(x, w, b, 1, 1);
    FAIL("expected DataError");
  } catch (const wscnn::DataError& e) {
    CHECK(std::string(e.what()).find("channel") != std::string::npos);
  }
}

TEST_CASE("deconv2d trivial cases") {
  // 1x1x1x1 input, 2x2 kernel of ones, stride 2
  NdArray x({1, 1, 1, 1});
  x[0] = real(0.7);
  NdArray w({1, 1, 2, 2}, real(1));
  const NdArray y = wscnn::ops::deconv2d(x, w, 2);
  CHECK(y.shape() == Shape{1, 1, 2, 2});
  for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == real(0.7));

  // zero input stays zero
  NdArray z({2, 3, 4, 5});
  Rng rng(7);
  const NdArray wr = random_array({3, 2, 4, 4}, rng);
  const NdArray yz = wscnn::ops::deconv2d(z, wr, 2);
  CHECK(yz.shape() == Shape{2, 2, 8, 10});
  for (std::size_t i = 0; i < yz.numel(); ++i) CHECK(yz[i] == real(0));
}

TEST_CASE("deconv2d is the adjoint of conv2d") {
  Rng rng(8);
  for (int kh : {2, 4}) {
    const int stride = 2;
    const NdArray x = random_array({2, 3, 4, 5}, rng);  // deconv input
    const NdArray w = random_array({3, 2, static_cast<std::size_t>(kh),
                                    static_cast<std::size_t>(kh)}, rng);
    const NdArray ax = wscnn::ops::deconv2d(x, w, stride);  // [2,2,8,10]
    const NdArray y = random_array(ax.shape(), rng);
    NdArray zero_b({3});
    const NdArray aty =
        wscnn::ops::conv2d(y, w, zero_b, stride, wscnn::ops::deconv_pad(kh, stride));
    CHECK(dot(ax, y) == doctest::Approx(dot(x, aty)).epsilon(1e-5));
  }
}

TEST_CASE("relu clamps negatives and keeps positives") {
  NdArray x({3});
  x[0] = -1;
  x[1] = 0;
  x[2] = 2;
  const NdArray y = wscnn::ops::relu(x);
  CHECK(y[0] == real(0));
  CHECK(y[1] == real(0));
  CHECK(y[2] == real(2));

  NdArray neg({2, 2}, real(-3));
  const NdArray yn = wscnn::ops::relu(neg);
  for (std::size_t i = 0; i < yn.numel(); ++i) CHECK(yn[i] == real(0));
}

TEST_CASE("mse closed forms and oracle") {
  Rng rng(9);
  const NdArray a = random_array({4, 5}, rng);
  CHECK(wscnn::ops::mse(a, a) == real(0));

  NdArray b = a;
  const real delta = real(0.25);
  for (std::size_t i = 0; i < b.numel(); ++i) b[i] += delta;
  CHECK(wscnn::ops::mse(a, b) == doctest::Approx(delta * delta).epsilon(1e-6));

  const NdArray c = random_array({4, 5}, rng);
  double want = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    const double d = static_cast<double>(a[i]) - c[i];
    want += d * d;
  }
  want /= a.numel();
  CHECK(wscnn::ops::mse(a, c) == doctest::Approx(want).epsilon(1e-7));

  NdArray wrong({5, 4});
  CHECK_THROWS_AS(wscnn::ops::mse(a, wrong), wscnn::DataError);
}

TEST_CASE("backward of sum gives all-ones gradient") {
  Tape tape;
  Rng rng(10);
  const auto x = tape.leaf(random_array({3, 4}, rng), true);
  const auto loss = tape.sum(x);
  tape.backward(loss);
  const NdArray& g = tape.grad(x);
  for (std::size_t i = 0; i < g.numel(); ++i) CHECK(g[i] == real(1));
}

TEST_CASE("a parameter off the loss path gets a zero gradient") {
  Tape tape;
  Rng rng(11);
  const auto x = tape.leaf(random_array({2, 2}, rng), true);
  const auto unused = tape.leaf(random_array({2, 2}, rng), true);
  const auto loss = tape.sum(tape.relu(x));
  tape.backward(loss);
  const NdArray& g = tape.grad(unused);
  for (std::size_t i = 0; i < g.numel(); ++i) CHECK(g[i] == real(0));
}

TEST_CASE("shared subexpressions accumulate like per-path sums") {
  Rng rng(12);
  const NdArray xv = random_array({2, 3}, rng);

  // shared: loss = sum(relu(x) + relu(x))
  Tape shared;
  const auto xs = shared.leaf(xv, true);
  const auto r = shared.relu(xs);
  const auto loss_s = shared.sum(shared.add(r, r));
  shared.backward(loss_s);

  // separate paths
  Tape split;
  const auto xp = split.leaf(xv, true);
  const auto loss_p = split.sum(split.add(split.relu(xp), split.relu(xp)));
  split.backward(loss_p);

  const NdArray& gs = shared.grad(xs);
  const NdArray& gp = split.grad(xp);
  for (std::size_t i = 0; i < gs.numel(); ++i) CHECK(gs[i] == gp[i]);
}

TEST_CASE("backward rejects a non-scalar loss") {
  Tape tape;
  Rng rng(13);
  const auto x = tape.leaf(random_array({2, 2}, rng), true);
  const auto y = tape.relu(x);
  CHECK_THROWS_AS(tape.backward(y), wscnn::DataError);
}

TEST_CASE("adam first step moves each parameter by about lr") {
  AdamConfig cfg;  // lr = 1e-4
  AdamState state(cfg);
  NdArray p({4}, real(1));
  NdArray g({4});
  for (std::size_t i = 0; i < 4; ++i) g[i] = real(0.3);  // constant nonzero gradient
  NdArray before = p;
  state.step({&p}, {&g});
  CHECK(state.t() == 1);
  for (std::size_t i = 0; i < 4; ++i) {
    const double delta = static_cast<double>(before[i]) - p[i];
    CHECK(delta == doctest::Approx(1e-4).epsilon(1e-3));
  }
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  AdamState state;
  NdArray p({3}, real(0.5));
  NdArray g({3}, real(0));
  const NdArray before = p;
  state.step({&p}, {&g});
  for (std::size_t i = 0; i < 3; ++i) CHECK(p[i] == before[i]);
}

TEST_CASE("adam descends theta^2 monotonically from 1") {
  AdamConfig cfg;
  cfg.lr = real(0.01);
  AdamState state(cfg);
  NdArray theta({1}, real(1));
  real prev = theta[0];
  for (int it = 0; it < 50; ++it) {
    NdArray g({1});
    g[0] = 2 * theta[0];
    state.step({&theta}, {&g});
    CHECK(std::abs(theta[0]) < std::abs(prev));
    prev = theta[0];
  }
}

TEST_CASE("adam rejects non-finite gradients without touching state") {
  AdamState state;
  NdArray p({2}, real(1));
  NdArray g({2}, real(0.1));
  state.step({&p}, {&g});
  const NdArray p_after = p;
  const auto t_after = state.t();

  NdArray bad({2});
  bad[0] = std::numeric_limits<real>::quiet_NaN();
  CHECK_THROWS_AS(state.step({&p}, {&bad}), wscnn::NumericalError);
  CHECK(state.t() == t_after);
  for (std::size_t i = 0; i < 2; ++i) CHECK(p[i] == p_after[i]);
}

TEST_CASE("adam is deterministic given identical state and inputs") {
  Rng rng(14);
  const NdArray g0 = random_array({8}, rng);
  NdArray pa({8}, real(1)), pb({8}, real(1));
  AdamState sa, sb;
  for (int it = 0; it < 5; ++it) {
    sa.step({&pa}, {&g0});
    sb.step({&pb}, {&g0});
  }
  for (std::size_t i = 0; i < 8; ++i) CHECK(pa[i] == pb[i]);
}
