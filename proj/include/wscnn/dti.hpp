// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "wscnn/image.hpp"

namespace wscnn::dti {

using Vec3 = std::array<double, 3>;

// Diffusion encoding: b in s/mm^2 plus unit gradient directions. Construction
// validates unit norms and the rank of the 6-column quadratic design.
class GradientScheme {
public:
  GradientScheme(double b, std::vector<Vec3> directions);

  double b() const { return b_; }
  const std::vector<Vec3>& directions() const { return directions_; }
  std::size_t size() const { return directions_.size(); }

  // 6 x n pseudo-inverse of the quadratic design, row-major
  const std::vector<double>& pinv() const { return pinv_; }

  // deterministic well-spread 12-direction default
  static GradientScheme default12(double b = 1000.0);

private:
  double b_;
  std::vector<Vec3> directions_;
  std::vector<double> pinv_;
};

// Per-voxel symmetric tensor field (components in mm^2/s) with fit flags.
struct TensorField {
  int height = 0;
  int width = 0;
  // component order: Dxx, Dyy, Dzz, Dxy, Dxz, Dyz
  std::array<std::vector<double>, 6> comp;
  std::vector<std::uint8_t> flags;  // bit0: fit_ok, bit1: SPD (all eigenvalues > 0)

  static constexpr std::uint8_t kFitOk = 1;
  static constexpr std::uint8_t kSpd = 2;

  TensorField() = default;
  TensorField(int h, int w);
  bool fit_ok(std::size_t i) const { return flags[i] & kFitOk; }
  std::array<double, 6> tensor(std::size_t i) const {
    return {comp[0][i], comp[1][i], comp[2][i], comp[3][i], comp[4][i], comp[5][i]};
  }
};

struct EigResult {
  Vec3 lambda;                 // descending
  std::array<Vec3, 3> vec;     // unit eigenvectors, sign-fixed
};

// Cyclic Jacobi for a symmetric 3x3 (Dxx,Dyy,Dzz,Dxy,Dxz,Dyz); eigenvalues
// sorted descending, each eigenvector's largest-magnitude component positive.
EigResult eig_sym3(const std::array<double, 6>& d);

double fa(double l1, double l2, double l3);
double md(double l1, double l2, double l3);

// angle between fiber directions, sign-insensitive, in [0, 90] degrees
double deviation_angle(const Vec3& a, const Vec3& b);

// Short-axis cardiac frame for one slice: per-voxel circumferential, radial
// and longitudinal unit vectors around the LV center. The long axis is the
// through-slice +z and chat = rhat x zhat, which makes {chat, rhat, zhat}
// right-handed; the same convention is used by the phantom generator, so
// helix angles round-trip.
struct CardiacFrame {
  double cx = 0;  // LV center, x (column)
  double cy = 0;  // LV center, y (row)

  // radial distance of a voxel center from the LV center
  double radius(int y, int x) const;

  // returns false within 0.5 px of the center where the frame is undefined
  bool axes(int y, int x, Vec3* chat, Vec3* rhat, Vec3* zhat) const;

  static CardiacFrame from_mask_centroid(const Mask& mask);
};

// Log-linear least-squares tensor fit per masked voxel:
//   ln(S0/Si)/b = g_i' D g_i.
// fit_ok is cleared where S0 or any Si <= 1e-6 * max(S0).
TensorField fit_tensor(const Image& s0, std::span<const Image> dwis,
                       const GradientScheme& scheme, const Mask& mask);

// Helix and transverse angles (degrees, in [-90, 90]) of a fiber direction at
// a voxel; empty when the voxel sits on the frame's degenerate center.
std::optional<std::pair<double, double>> helix_transverse(const Vec3& e1, int y, int x,
                                                          const CardiacFrame& frame);

// 6 sextants (anterior at 12 o'clock, counterclockwise in display
// orientation) x 3 transmural layers (endo, mid, epi by radius thirds).
struct BullseyeBin {
  int segment = 0;  // 0 anterior, 1 anterolateral, 2 inferolateral, 3 inferior,
                    // 4 inferoseptal, 5 anteroseptal
  int layer = 0;    // 0 endo, 1 mid, 2 epi
  double mean = 0;  // undefined when count == 0
  std::size_t count = 0;
};

std::vector<BullseyeBin> aha_bullseye(const std::vector<double>& values, const Mask& mask,
                                      const CardiacFrame& frame, int n_segments = 6,
                                      int n_layers = 3);

const char* aha_segment_name(int segment);

}  // namespace wscnn::dti
