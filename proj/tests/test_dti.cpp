// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "wscnn/dti.hpp"
#include "wscnn/rng.hpp"

using wscnn::Image;
using wscnn::Mask;
using wscnn::Rng;
namespace dti = wscnn::dti;
using dti::Vec3;

namespace {

constexpr double kPi = 3.14159265358979323846;

// random rotation from three Euler angles
std::array<Vec3, 3> random_rotation(Rng& rng) {
  const double a = rng.uniform(0, 2 * kPi), b = rng.uniform(0, kPi), c = rng.uniform(0, 2 * kPi);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cc = std::cos(c), sc = std::sin(c);
  // R = Rz(a) * Ry(b) * Rz(c), columns are the rotated axes
  std::array<std::array<double, 3>, 3> r{};
  r[0] = {ca * cb * cc - sa * sc, -ca * cb * sc - sa * cc, ca * sb};
  r[1] = {sa * cb * cc + ca * sc, -sa * cb * sc + ca * cc, sa * sb};
  r[2] = {-sb * cc, sb * sc, cb};
  return {Vec3{r[0][0], r[1][0], r[2][0]}, Vec3{r[0][1], r[1][1], r[2][1]},
          Vec3{r[0][2], r[1][2], r[2][2]}};
}

std::array<double, 6> compose_tensor(const std::array<Vec3, 3>& axes, const Vec3& lambda) {
  double d[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) d[i][j] += lambda[k] * axes[k][i] * axes[k][j];
  return {d[0][0], d[1][1], d[2][2], d[0][1], d[0][2], d[1][2]};
}

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

TEST_CASE("default 12-direction scheme is unit-norm and full rank") {
  const auto scheme = dti::GradientScheme::default12();
  CHECK(scheme.size() == 12);
  CHECK(scheme.b() == 1000.0);
  for (const auto& g : scheme.directions())
    CHECK(std::abs(std::sqrt(dot3(g, g)) - 1.0) < 1e-9);
  // construction already validates rank; a degenerate scheme must throw
  std::vector<Vec3> coplanar;
  for (int i = 0; i < 8; ++i) {
    const double a = 2 * kPi * i / 8;
    coplanar.push_back({std::cos(a), std::sin(a), 0.0});
  }
  CHECK_THROWS_AS(dti::GradientScheme(1000.0, coplanar), wscnn::ConfigError);
}

TEST_CASE("eig_sym3 on a diagonal matrix") {
  const auto e = dti::eig_sym3({3, 2, 1, 0, 0, 0});
  CHECK(e.lambda[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.lambda[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e.lambda[2] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(e.vec[0][0]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(e.vec[1][1]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(e.vec[2][2]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig_sym3 recovers a rotated diagonal") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto axes = random_rotation(rng);
    const Vec3 lambda = {rng.uniform(2, 3), rng.uniform(1, 2), rng.uniform(0.1, 1)};
    const auto d = compose_tensor(axes, lambda);
    const auto e = dti::eig_sym3(d);
    for (int k = 0; k < 3; ++k) {
      CHECK(e.lambda[k] == doctest::Approx(lambda[k]).epsilon(1e-10));
      CHECK(std::abs(dot3(e.vec[k], axes[k])) == doctest::Approx(1.0).epsilon(1e-8));
    }
    // eigen residual ||D e - lambda e||
    double frob = 0;
    for (double c : d) frob += c * c;
    frob = std::sqrt(frob);
    const double m[3][3] = {{d[0], d[3], d[4]}, {d[3], d[1], d[5]}, {d[4], d[5], d[2]}};
    for (int k = 0; k < 3; ++k) {
      double res = 0;
      for (int i = 0; i < 3; ++i) {
        double mv = 0;
        for (int j = 0; j < 3; ++j) mv += m[i][j] * e.vec[k][j];
        const double r = mv - e.lambda[k] * e.vec[k][i];
        res += r * r;
      }
      CHECK(std::sqrt(res) <= 1e-10 * frob);
    }
  }
}

TEST_CASE("eig_sym3 accepts repeated eigenvalues and stays orthonormal") {
  const double d = 1.3e-3;
  const auto e = dti::eig_sym3({d, d, d, 0, 0, 0});
  for (int k = 0; k < 3; ++k) CHECK(e.lambda[k] == doctest::Approx(d).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(dot3(e.vec[i], e.vec[j]) - (i == j ? 1.0 : 0.0)) < 1e-9);
}

TEST_CASE("fa closed forms") {
  CHECK(dti::fa(1.0, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(dti::fa(1.0, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(dti::fa(2.0, 1.0, 1.0) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK_THROWS_AS(dti::fa(0, 0, 0), wscnn::NumericalError);

  // FA stays in [0,1] over nonnegative spectra (valid fits)
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    const double v = dti::fa(rng.uniform(0, 3), rng.uniform(0, 3), rng.uniform(0, 3));
    CHECK(v >= 0.0);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("md equals trace over three via both routes") {
  CHECK(dti::md(1, 2, 3) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(dti::md(0, 0, 0) == 0.0);

  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto axes = random_rotation(rng);
    const Vec3 lambda = {rng.uniform(1, 3), rng.uniform(0.5, 1), rng.uniform(0.1, 0.5)};
    const auto d = compose_tensor(axes, lambda);
    const double via_trace = (d[0] + d[1] + d[2]) / 3.0;
    const auto e = dti::eig_sym3(d);
    CHECK(dti::md(e.lambda[0], e.lambda[1], e.lambda[2]) ==
          doctest::Approx(via_trace).epsilon(1e-12));
  }
}

TEST_CASE("fit_tensor round-trips noiseless signals to 1e-8 relative") {
  const auto scheme = dti::GradientScheme::default12();
  Rng rng(44);
  const int h = 4, w = 5;
  Mask mask(h, w, true);
  Image s0(h, w, 1.0f);
  std::vector<Image> dwis(scheme.size(), Image(h, w));

  std::vector<std::array<double, 6>> truth(static_cast<std::size_t>(h) * w);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto axes = random_rotation(rng);
    const Vec3 lambda = {rng.uniform(1.0e-3, 3.0e-3), rng.uniform(0.4e-3, 1.0e-3),
                         rng.uniform(0.1e-3, 0.4e-3)};
    truth[i] = compose_tensor(axes, lambda);
    for (std::size_t k = 0; k < scheme.size(); ++k) {
      const auto& g = scheme.directions()[k];
      const double m[3][3] = {{truth[i][0], truth[i][3], truth[i][4]},
                              {truth[i][3], truth[i][1], truth[i][5]},
                              {truth[i][4], truth[i][5], truth[i][2]}};
      double q = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) q += g[a] * m[a][b] * g[b];
      dwis[k].v[i] = static_cast<wscnn::pix>(std::exp(-scheme.b() * q));
    }
  }

  const auto field = dti::fit_tensor(s0, dwis, scheme, mask);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    CHECK(field.fit_ok(i));
    double norm = 0;
    for (double c : truth[i]) norm += c * c;
    norm = std::sqrt(norm);
    for (int c = 0; c < 6; ++c)
      CHECK(std::abs(field.comp[c][i] - truth[i][c]) <= 1.5e-7 * norm);
  }
}

TEST_CASE("fit_tensor recovers an isotropic tensor exactly") {
  const auto scheme = dti::GradientScheme::default12();
  const double d = 1.0e-3;
  const int h = 2, w = 2;
  Mask mask(h, w, true);
  Image s0(h, w, 2.0f);
  std::vector<Image> dwis(scheme.size(), Image(h, w));
  const double s = 2.0 * std::exp(-scheme.b() * d);
  for (auto& img : dwis)
    for (auto& v : img.v) v = static_cast<wscnn::pix>(s);

  const auto field = dti::fit_tensor(s0, dwis, scheme, mask);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(field.fit_ok(i));
    const auto e = dti::eig_sym3(field.tensor(i));
    CHECK(dti::fa(e.lambda[0], e.lambda[1], e.lambda[2]) < 2e-6);
  }
}

TEST_CASE("a voxel with a zero DW sample is excluded from the fit") {
  const auto scheme = dti::GradientScheme::default12();
  Mask mask(2, 2, true);
  Image s0(2, 2, 1.0f);
  std::vector<Image> dwis(scheme.size(), Image(2, 2, 0.5f));
  dwis[3].v[1] = 0.0f;
  const auto field = dti::fit_tensor(s0, dwis, scheme, mask);
  CHECK(field.fit_ok(0));
  CHECK_FALSE(field.fit_ok(1));
}

TEST_CASE("helix and transverse angles follow the frame conventions") {
  dti::CardiacFrame frame;
  frame.cx = 10;
  frame.cy = 10;
  const int y = 10, x = 18;  // radial = +x
  Vec3 chat, rhat, zhat;
  REQUIRE(frame.axes(y, x, &chat, &rhat, &zhat));

  auto ht = dti::helix_transverse(chat, y, x, frame);
  REQUIRE(ht.has_value());
  CHECK(ht->first == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ht->second == doctest::Approx(0.0).epsilon(1e-12));

  ht = dti::helix_transverse(zhat, y, x, frame);
  REQUIRE(ht.has_value());
  CHECK(ht->first == doctest::Approx(90.0).epsilon(1e-12));

  // sign invariance of e1
  const Vec3 tilted = {chat[0] * 0.8 + zhat[0] * 0.6, chat[1] * 0.8 + zhat[1] * 0.6,
                       chat[2] * 0.8 + zhat[2] * 0.6};
  const Vec3 flipped = {-tilted[0], -tilted[1], -tilted[2]};
  const auto a = dti::helix_transverse(tilted, y, x, frame);
  const auto b = dti::helix_transverse(flipped, y, x, frame);
  REQUIRE(a.has_value());
  REQUIRE(b.has_value());
  CHECK(a->first == doctest::Approx(b->first).epsilon(1e-12));
  CHECK(a->second == doctest::Approx(b->second).epsilon(1e-12));

  // center voxel is excluded
  CHECK_FALSE(dti::helix_transverse(chat, 10, 10, frame).has_value());
}

TEST_CASE("deviation angle closed forms") {
  const Vec3 a = {1, 0, 0};
  CHECK(dti::deviation_angle(a, a) == doctest::Approx(0.0));
  CHECK(dti::deviation_angle(a, {-1, 0, 0}) == doctest::Approx(0.0));
  CHECK(dti::deviation_angle(a, {0, 1, 0}) == doctest::Approx(90.0));
  CHECK(dti::deviation_angle(a, {std::sqrt(0.5), std::sqrt(0.5), 0}) ==
        doctest::Approx(45.0).epsilon(1e-9));
}

TEST_CASE("bullseye bins a painted annulus by segment") {
  const int h = 64, w = 64;
  Mask mask(h, w, false);
  dti::CardiacFrame frame;
  frame.cx = 31.5;
  frame.cy = 31.5;
  std::vector<double> values(static_cast<std::size_t>(h) * w, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double r = std::hypot(x - frame.cx, y - frame.cy);
      if (r < 12 || r > 28) continue;
      mask.set(y, x, true);
      const double phi = std::atan2(frame.cy - y, x - frame.cx) * 180.0 / kPi;
      double rel = phi - 60.0;
      rel -= 360.0 * std::floor(rel / 360.0);
      values[static_cast<std::size_t>(y) * w + x] = std::floor(rel / 60.0);
    }
  const auto bins = dti::aha_bullseye(values, mask, frame);
  REQUIRE(bins.size() == 18);
  for (const auto& b : bins) {
    REQUIRE(b.count > 0);
    CHECK(b.mean == doctest::Approx(static_cast<double>(b.segment)).epsilon(1e-12));
  }
}

TEST_CASE("bullseye flags empty bins on a half annulus") {
  const int h = 64, w = 64;
  Mask mask(h, w, false);
  dti::CardiacFrame frame;
  frame.cx = 31.5;
  frame.cy = 31.5;
  std::vector<double> values(static_cast<std::size_t>(h) * w, 1.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double r = std::hypot(x - frame.cx, y - frame.cy);
      if (r < 12 || r > 28) continue;
      if (y > frame.cy) continue;  // keep the upper (display anterior) half
      mask.set(y, x, true);
    }
  const auto bins = dti::aha_bullseye(values, mask, frame);
  bool some_missing = false, some_present = false;
  for (const auto& b : bins) {
    if (b.segment == 3) some_missing |= (b.count == 0);  // inferior
    if (b.segment == 0) some_present |= (b.count > 0);   // anterior
  }
  CHECK(some_missing);
  CHECK(some_present);
}

TEST_CASE("constant field yields 18 identical bin means") {
  const int h = 48, w = 48;
  Mask mask(h, w, false);
  dti::CardiacFrame frame;
  frame.cx = 23.5;
  frame.cy = 23.5;
  std::vector<double> values(static_cast<std::size_t>(h) * w, 0.7);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double r = std::hypot(x - frame.cx, y - frame.cy);
      if (r >= 9 && r <= 21) mask.set(y, x, true);
    }
  for (const auto& b : dti::aha_bullseye(values, mask, frame)) {
    REQUIRE(b.count > 0);
    CHECK(b.mean == doctest::Approx(0.7).epsilon(1e-12));
  }
}
