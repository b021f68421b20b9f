// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wscnn/common.hpp"

namespace wscnn {

// Mother-wavelet parameters for the directional Morlet bank. The defaults
// were tuned so the Littlewood-Paley sum stays within ~0.19 of 1 inside the
// Nyquist disc for the J=2, L=10 configuration.
struct BankParams {
  int J = 2;            // number of dyadic scales
  int L = 10;           // orientations per scale, spanning [0, pi)
  double sigma0 = 0.6;  // mother-wavelet spatial bandwidth
  double xi0 = 2.670353755551324;  // central frequency 0.85*pi rad/px
  double slant = -1.0;  // anisotropy; <= 0 selects the default 4.5/L
  double phi_sigma0 = 0.4;  // low-pass bandwidth factor (sigma_phi = phi_sigma0 * 2^J)

  double effective_slant() const { return slant > 0 ? slant : 4.5 / L; }
};

// Frequency-domain Morlet bank for a fixed raster size. The Morlet frequency
// response is real-valued by construction (Gaussian minus a scaled Gaussian),
// so psi_hat/phi_hat store the real response; the spatial filters are complex.
struct FilterBank {
  int height = 0;
  int width = 0;
  BankParams params;
  std::vector<double> scale_gains;                 // per-scale amplitude, one per j
  std::vector<std::vector<double>> psi_hat;        // [j*L + r], raster h*w
  std::vector<std::array<double, 2>> psi_xi;       // central frequency (wx, wy) per filter
  std::vector<double> phi_hat;                     // raster h*w, phi_hat(0) = 1

  int n_psi() const { return params.J * params.L; }
  const std::vector<double>& psi(int j, int r) const { return psi_hat[j * params.L + r]; }
};

// Samples the bank directly on the h x w discrete frequency grid, with alias
// periodization over neighboring spectral replicas. Every psi has its DC
// component removed exactly; phi has unit DC gain.
FilterBank build_bank(int height, int width, const BankParams& params = {});

// One DC-free Morlet frequency raster at an arbitrary orientation; the
// building block of build_bank, exposed for symmetry checks.
std::vector<double> morlet_raster(int height, int width, double sigma, double xi,
                                  double theta, double slant);

// Frame-energy diagnostic: |phi|^2 + 1/2 * sum_{j,r} (|psi(w)|^2 + |psi(-w)|^2)
// as an h x w raster indexed like the filters.
std::vector<double> littlewood_paley(const FilterBank& bank);

// Min/max of the Littlewood-Paley sum over frequencies inside the Nyquist
// disc ||w||_2 <= pi (corners of the square spectrum excluded).
struct LpBounds {
  double lo = 0.0;
  double hi = 0.0;
};
LpBounds littlewood_paley_bounds(const FilterBank& bank);

}  // namespace wscnn
