// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/dti.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wscnn::dti {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = 180.0 / kPi;

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

// Cholesky solve of the 6x6 normal equations A x = b (A SPD), used once per
// scheme to build the pseudo-inverse.
bool solve_spd6(std::array<double, 36>& a, std::array<double, 6>& b) {
  for (int c = 0; c < 6; ++c) {
    double piv = a[c * 6 + c];
    for (int k = 0; k < c; ++k) piv -= a[c * 6 + k] * a[c * 6 + k];
    if (piv <= 0) return false;
    piv = std::sqrt(piv);
    a[c * 6 + c] = piv;
    for (int r = c + 1; r < 6; ++r) {
      double v = a[r * 6 + c];
      for (int k = 0; k < c; ++k) v -= a[r * 6 + k] * a[c * 6 + k];
      a[r * 6 + c] = v / piv;
    }
  }
  for (int r = 0; r < 6; ++r) {
    double v = b[r];
    for (int k = 0; k < r; ++k) v -= a[r * 6 + k] * b[k];
    b[r] = v / a[r * 6 + r];
  }
  for (int r = 5; r >= 0; --r) {
    double v = b[r];
    for (int k = r + 1; k < 6; ++k) v -= a[k * 6 + r] * b[k];
    b[r] = v / a[r * 6 + r];
  }
  return true;
}

std::array<double, 6> design_row(const Vec3& g) {
  return {g[0] * g[0], g[1] * g[1], g[2] * g[2],
          2 * g[0] * g[1], 2 * g[0] * g[2], 2 * g[1] * g[2]};
}

}  // namespace

GradientScheme::GradientScheme(double b, std::vector<Vec3> directions)
    : b_(b), directions_(std::move(directions)) {
  if (b_ <= 0) throw ConfigError("GradientScheme: b must be positive");
  if (directions_.size() < 6)
    throw ConfigError("GradientScheme: needs at least 6 directions, got " +
                      std::to_string(directions_.size()));
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    const double n = norm3(directions_[i]);
    if (std::abs(n - 1.0) > 1e-9)
      throw ConfigError("GradientScheme: direction " + std::to_string(i) +
                        " is not unit length (|g| = " + std::to_string(n) + ")");
  }

  // pinv = (A'A)^-1 A', built column by column
  const std::size_t n = directions_.size();
  std::vector<std::array<double, 6>> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = design_row(directions_[i]);

  std::array<double, 36> ata{};
  for (std::size_t i = 0; i < n; ++i)
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c) ata[r * 6 + c] += rows[i][r] * rows[i][c];

  pinv_.assign(6 * n, 0.0);
  for (std::size_t col = 0; col < n; ++col) {
    std::array<double, 36> a = ata;
    std::array<double, 6> rhs = rows[col];
    if (!solve_spd6(a, rhs))
      throw ConfigError("GradientScheme: rank-deficient design (directions do not span "
                        "the 6 tensor components)");
    for (int r = 0; r < 6; ++r) pinv_[static_cast<std::size_t>(r) * n + col] = rhs[r];
  }
}

GradientScheme GradientScheme::default12(double b) {
  // Fibonacci hemisphere points: deterministic and well-conditioned for the
  // 6-component fit (condition checked by the constructor and unit tests).
  std::vector<Vec3> dirs;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < 12; ++i) {
    const double z = (i + 0.5) / 12.0;
    const double r = std::sqrt(1.0 - z * z);
    const double a = golden * i;
    dirs.push_back({r * std::cos(a), r * std::sin(a), z});
  }
  return GradientScheme(b, std::move(dirs));
}

TensorField::TensorField(int h, int w) : height(h), width(w) {
  const std::size_t n = static_cast<std::size_t>(h) * w;
  for (auto& c : comp) c.assign(n, 0.0);
  flags.assign(n, 0);
}

EigResult eig_sym3(const std::array<double, 6>& d) {
  // a is overwritten by the diagonalization; v accumulates rotations
  double a[3][3] = {{d[0], d[3], d[4]}, {d[3], d[1], d[5]}, {d[4], d[5], d[2]}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  auto off_norm = [&]() {
    return std::sqrt(2 * (a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]));
  };

  for (int sweep = 0; sweep < 50 && off_norm() >= 1e-12; ++sweep) {
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = a[q][p] = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  EigResult out;
  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a[i][i] > a[j][j]; });
  for (int i = 0; i < 3; ++i) {
    out.lambda[i] = a[order[i]][order[i]];
    Vec3 e = {v[0][order[i]], v[1][order[i]], v[2][order[i]]};
    const double n = norm3(e);
    for (auto& c : e) c /= n;
    // sign: largest-magnitude component positive
    int big = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(e[k]) > std::abs(e[big])) big = k;
    if (e[big] < 0)
      for (auto& c : e) c = -c;
    out.vec[i] = e;
  }
  return out;
}

double fa(double l1, double l2, double l3) {
  const double ss = l1 * l1 + l2 * l2 + l3 * l3;
  if (ss == 0) throw NumericalError("fa: all eigenvalues are zero");
  const double num = (l1 - l2) * (l1 - l2) + (l1 - l3) * (l1 - l3) + (l2 - l3) * (l2 - l3);
  return std::sqrt(0.5 * num / ss);
}

double md(double l1, double l2, double l3) { return (l1 + l2 + l3) / 3.0; }

double deviation_angle(const Vec3& a, const Vec3& b) {
  const double na = norm3(a), nb = norm3(b);
  if (na == 0 || nb == 0) throw NumericalError("deviation_angle: zero-length direction");
  double c = std::abs(dot3(a, b)) / (na * nb);
  c = std::min(1.0, c);
  return std::acos(c) * kDeg;
}

double CardiacFrame::radius(int y, int x) const { return std::hypot(x - cx, y - cy); }

bool CardiacFrame::axes(int y, int x, Vec3* chat, Vec3* rhat, Vec3* zhat) const {
  const double rx = x - cx, ry = y - cy;
  const double r = std::hypot(rx, ry);
  if (r <= 0.5) return false;
  *rhat = {rx / r, ry / r, 0.0};
  *zhat = {0.0, 0.0, 1.0};
  *chat = cross3(*rhat, *zhat);
  return true;
}

CardiacFrame CardiacFrame::from_mask_centroid(const Mask& mask) {
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(y, x)) {
        sx += x;
        sy += y;
        ++n;
      }
  if (n == 0) throw DataError("CardiacFrame: empty mask");
  CardiacFrame f;
  f.cx = sx / n;
  f.cy = sy / n;
  return f;
}

TensorField fit_tensor(const Image& s0, std::span<const Image> dwis,
                       const GradientScheme& scheme, const Mask& mask) {
  if (dwis.size() != scheme.size())
    throw DataError("fit_tensor: " + std::to_string(dwis.size()) + " DW images for " +
                    std::to_string(scheme.size()) + " gradient directions");
  for (const Image& d : dwis)
    if (!d.same_extents(s0)) throw DataError("fit_tensor: DW image extents differ from S0");
  if (mask.height != s0.height || mask.width != s0.width)
    throw DataError("fit_tensor: mask extents differ from S0");

  const std::size_t n_dir = dwis.size();
  double s0_max = 0;
  for (const pix v : s0.v) s0_max = std::max(s0_max, static_cast<double>(v));
  const double eps = 1e-6 * s0_max;

  TensorField field(s0.height, s0.width);
  const std::size_t npix = static_cast<std::size_t>(s0.height) * s0.width;
  parallel_for(0, npix, [&](std::size_t i) {
    if (!mask.v[i]) return;
    const double s0v = s0.v[i];
    if (s0v <= eps) return;  // fit_ok stays clear
    std::vector<double> y(n_dir);
    for (std::size_t k = 0; k < n_dir; ++k) {
      const double sv = dwis[k].v[i];
      if (sv <= eps) return;
      y[k] = std::log(s0v / sv) / scheme.b();
    }
    const std::vector<double>& pinv = scheme.pinv();
    std::array<double, 6> dcomp{};
    for (int r = 0; r < 6; ++r) {
      double acc = 0;
      for (std::size_t k = 0; k < n_dir; ++k) acc += pinv[static_cast<std::size_t>(r) * n_dir + k] * y[k];
      dcomp[r] = acc;
    }
    for (int r = 0; r < 6; ++r) field.comp[r][i] = dcomp[r];
    std::uint8_t fl = TensorField::kFitOk;
    const EigResult e = eig_sym3(dcomp);
    if (e.lambda[2] > 0) fl |= TensorField::kSpd;
    field.flags[i] = fl;
  });
  return field;
}

std::optional<std::pair<double, double>> helix_transverse(const Vec3& e1, int y, int x,
                                                          const CardiacFrame& frame) {
  Vec3 chat, rhat, zhat;
  if (!frame.axes(y, x, &chat, &rhat, &zhat)) return std::nullopt;

  Vec3 e = e1;
  const double n = norm3(e);
  if (n == 0) throw NumericalError("helix_transverse: zero-length fiber direction");
  for (auto& c : e) c /= n;

  // fibers are axial: flip so the circumferential component is nonnegative
  double ec = dot3(e, chat);
  double er = dot3(e, rhat);
  double ez = dot3(e, zhat);
  if (ec < 0 || (ec == 0 && ez < 0) || (ec == 0 && ez == 0 && er < 0)) {
    ec = -ec;
    er = -er;
    ez = -ez;
  }

  const double ha = std::atan2(ez, ec) * kDeg;                      // tangent plane {chat, zhat}
  const double ta = (ec == 0 && er == 0) ? 0.0 : std::atan2(er, ec) * kDeg;  // short-axis plane
  return std::make_pair(ha, ta);
}

std::vector<BullseyeBin> aha_bullseye(const std::vector<double>& values, const Mask& mask,
                                      const CardiacFrame& frame, int n_segments, int n_layers) {
  const std::size_t npix = static_cast<std::size_t>(mask.height) * mask.width;
  if (values.size() != npix) throw DataError("aha_bullseye: value raster does not match mask");
  if (n_segments < 1 || n_layers < 1) throw ConfigError("aha_bullseye: bad bin counts");

  // transmural depth from the mask's own radial range
  double r_min = 1e300, r_max = -1e300;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(y, x)) {
        const double r = frame.radius(y, x);
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
      }
  if (r_max <= r_min) throw DataError("aha_bullseye: mask has no radial extent");

  std::vector<double> sums(static_cast<std::size_t>(n_segments) * n_layers, 0.0);
  std::vector<std::size_t> counts(sums.size(), 0);
  const double seg_width = 360.0 / n_segments;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (!mask.at(y, x)) continue;
      const double r = frame.radius(y, x);
      if (r <= 0.5) continue;
      // display angle: y up, anterior at 90 degrees; counterclockwise labels
      const double phi = std::atan2(frame.cy - y, x - frame.cx) * kDeg;
      double rel = phi - (90.0 - seg_width / 2);
      rel -= 360.0 * std::floor(rel / 360.0);
      const int seg = std::min(n_segments - 1, static_cast<int>(rel / seg_width));
      const double depth = (r - r_min) / (r_max - r_min);
      const int layer = std::min(n_layers - 1, static_cast<int>(depth * n_layers));
      const std::size_t bin = static_cast<std::size_t>(seg) * n_layers + layer;
      sums[bin] += values[static_cast<std::size_t>(y) * mask.width + x];
      counts[bin] += 1;
    }
  }

  std::vector<BullseyeBin> out;
  for (int s = 0; s < n_segments; ++s)
    for (int l = 0; l < n_layers; ++l) {
      const std::size_t bin = static_cast<std::size_t>(s) * n_layers + l;
      BullseyeBin bb;
      bb.segment = s;
      bb.layer = l;
      bb.count = counts[bin];
      bb.mean = counts[bin] ? sums[bin] / counts[bin] : 0.0;
      out.push_back(bb);
    }
  return out;
}

const char* aha_segment_name(int segment) {
  static const char* names[6] = {"anterior",  "anterolateral", "inferolateral",
                                 "inferior",  "inferoseptal",  "anteroseptal"};
  return (segment >= 0 && segment < 6) ? names[segment] : "segment";
}

}  // namespace wscnn::dti
