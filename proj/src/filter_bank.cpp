// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/filter_bank.hpp"

#include <cmath>
#include <string>

namespace wscnn {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Principal frequency of bin a on an n-point grid, in (-pi, pi].
double bin_freq(int a, int n) {
  const double f = 2.0 * kPi * a / n;
  return a * 2 > n ? f - 2.0 * kPi : f;
}

// Anisotropic Gaussian envelope centered at (cx, cy), rotated so the long
// axis lies along theta, periodized over the +-1 spectral replicas.
double envelope(double wx, double wy, double cx, double cy, double cos_t,
                double sin_t, double sigma, double slant) {
  double acc = 0.0;
  for (int p = -1; p <= 1; ++p) {
    for (int q = -1; q <= 1; ++q) {
      const double ax = wx + 2.0 * kPi * p - cx;
      const double ay = wy + 2.0 * kPi * q - cy;
      const double par = ax * cos_t + ay * sin_t;
      const double perp = -ax * sin_t + ay * cos_t;
      acc += std::exp(-0.5 * sigma * sigma * (par * par + perp * perp / (slant * slant)));
    }
  }
  return acc;
}

double isotropic_envelope(double wx, double wy, double sigma) {
  double acc = 0.0;
  for (int p = -1; p <= 1; ++p) {
    for (int q = -1; q <= 1; ++q) {
      const double ax = wx + 2.0 * kPi * p;
      const double ay = wy + 2.0 * kPi * q;
      acc += std::exp(-0.5 * sigma * sigma * (ax * ax + ay * ay));
    }
  }
  return acc;
}

std::vector<double> fit_scale_gains(const FilterBank& bank);

}  // namespace

std::vector<double> morlet_raster(int height, int width, double sigma, double xi,
                                  double theta, double slant) {
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cx = xi * ct, cy = xi * st;
  const double kappa = envelope(0, 0, cx, cy, ct, st, sigma, slant) /
                       envelope(0, 0, 0, 0, ct, st, sigma, slant);
  std::vector<double> raster(static_cast<std::size_t>(height) * width);
  for (int a = 0; a < height; ++a) {
    const double wy = bin_freq(a, height);
    for (int b = 0; b < width; ++b) {
      const double wx = bin_freq(b, width);
      raster[static_cast<std::size_t>(a) * width + b] =
          envelope(wx, wy, cx, cy, ct, st, sigma, slant) -
          kappa * envelope(wx, wy, 0, 0, ct, st, sigma, slant);
    }
  }
  return raster;
}

FilterBank build_bank(int height, int width, const BankParams& params) {
  if (params.J < 1 || params.L < 1) throw ConfigError("build_bank: J and L must be >= 1");
  if (params.sigma0 <= 0) throw ConfigError("build_bank: sigma0 must be positive");
  if (params.xi0 <= 0 || params.xi0 >= kPi) throw ConfigError("build_bank: xi0 must lie in (0, pi)");
  const int min_extent = (1 << params.J) * 4;
  if (height < min_extent || width < min_extent)
    throw ConfigError("build_bank: raster " + std::to_string(height) + "x" + std::to_string(width) +
                      " too small for J=" + std::to_string(params.J) +
                      " (needs >= " + std::to_string(min_extent) + " per axis)");

  FilterBank bank;
  bank.height = height;
  bank.width = width;
  bank.params = params;
  const double slant = params.effective_slant();
  const std::size_t npix = static_cast<std::size_t>(height) * width;

  for (int j = 0; j < params.J; ++j) {
    const double sigma_j = params.sigma0 * std::pow(2.0, j);
    const double xi_j = params.xi0 / std::pow(2.0, j);
    for (int r = 0; r < params.L; ++r) {
      const double theta = kPi * r / params.L;
      bank.psi_hat.push_back(morlet_raster(height, width, sigma_j, xi_j, theta, slant));
      bank.psi_xi.push_back({xi_j * std::cos(theta), xi_j * std::sin(theta)});
    }
  }

  const double sigma_phi = params.phi_sigma0 * std::pow(2.0, params.J);
  bank.phi_hat.resize(npix);
  const double phi_dc = isotropic_envelope(0, 0, sigma_phi);
  for (int a = 0; a < height; ++a) {
    const double wy = bin_freq(a, height);
    for (int b = 0; b < width; ++b) {
      const double wx = bin_freq(b, width);
      bank.phi_hat[static_cast<std::size_t>(a) * width + b] =
          isotropic_envelope(wx, wy, sigma_phi) / phi_dc;
    }
  }

  // Flatten the frame energy toward 1 inside the Nyquist disc with one
  // amplitude per scale, fitted by least squares. phi is pinned by its unit
  // DC gain and cannot be scaled.
  bank.scale_gains = fit_scale_gains(bank);
  for (int j = 0; j < params.J; ++j) {
    const double g = bank.scale_gains[j];
    for (int r = 0; r < params.L; ++r)
      for (double& v : bank.psi_hat[j * params.L + r]) v *= g;
  }
  return bank;
}

namespace {

// Least-squares fit of per-scale squared gains g_j so that
// |phi|^2 + sum_j g_j^2 * S_j(w) is as close to 1 as possible over the
// Nyquist disc, where S_j is the mirror-symmetrized psi energy of scale j.
std::vector<double> fit_scale_gains(const FilterBank& bank) {
  const int h = bank.height, w = bank.width;
  const int J = bank.params.J, L = bank.params.L;

  std::vector<std::size_t> idxs;
  for (int a = 0; a < h; ++a) {
    const double wy = bin_freq(a, h);
    for (int b = 0; b < w; ++b) {
      const double wx = bin_freq(b, w);
      if (wx * wx + wy * wy <= kPi * kPi)
        idxs.push_back(static_cast<std::size_t>(a) * w + b);
    }
  }

  std::vector<std::vector<double>> S(J, std::vector<double>(idxs.size(), 0.0));
  for (int j = 0; j < J; ++j) {
    for (int r = 0; r < L; ++r) {
      const auto& psi = bank.psi_hat[j * L + r];
      for (std::size_t i = 0; i < idxs.size(); ++i) {
        const std::size_t idx = idxs[i];
        const int a = static_cast<int>(idx / w), b = static_cast<int>(idx % w);
        const int na = a == 0 ? 0 : h - a, nb = b == 0 ? 0 : w - b;
        const double f = psi[idx];
        const double g = psi[static_cast<std::size_t>(na) * w + nb];
        S[j][i] += 0.5 * (f * f + g * g);
      }
    }
  }

  std::vector<double> A(static_cast<std::size_t>(J) * J, 0.0), rhs(J, 0.0);
  for (std::size_t i = 0; i < idxs.size(); ++i) {
    const double p = bank.phi_hat[idxs[i]];
    const double target = 1.0 - p * p;
    for (int a = 0; a < J; ++a) {
      for (int b = 0; b < J; ++b) A[static_cast<std::size_t>(a) * J + b] += S[a][i] * S[b][i];
      rhs[a] += S[a][i] * target;
    }
  }

  // small SPD solve by Gaussian elimination
  std::vector<double> g2(rhs);
  for (int c = 0; c < J; ++c) {
    const double piv = A[static_cast<std::size_t>(c) * J + c];
    for (int r2 = c + 1; r2 < J; ++r2) {
      const double f = A[static_cast<std::size_t>(r2) * J + c] / piv;
      for (int k = c; k < J; ++k)
        A[static_cast<std::size_t>(r2) * J + k] -= f * A[static_cast<std::size_t>(c) * J + k];
      g2[r2] -= f * g2[c];
    }
  }
  for (int c = J - 1; c >= 0; --c) {
    for (int k = c + 1; k < J; ++k) g2[c] -= A[static_cast<std::size_t>(c) * J + k] * g2[k];
    g2[c] /= A[static_cast<std::size_t>(c) * J + c];
  }

  std::vector<double> gains(J);
  for (int j = 0; j < J; ++j) gains[j] = std::sqrt(std::max(0.0, g2[j]));
  return gains;
}

}  // namespace

std::vector<double> littlewood_paley(const FilterBank& bank) {
  const int h = bank.height, w = bank.width;
  std::vector<double> lp(static_cast<std::size_t>(h) * w, 0.0);
  for (int a = 0; a < h; ++a) {
    for (int b = 0; b < w; ++b) {
      const std::size_t idx = static_cast<std::size_t>(a) * w + b;
      const int na = a == 0 ? 0 : h - a;
      const int nb = b == 0 ? 0 : w - b;
      const std::size_t nidx = static_cast<std::size_t>(na) * w + nb;
      double s = bank.phi_hat[idx] * bank.phi_hat[idx];
      for (const auto& psi : bank.psi_hat) {
        const double f = psi[idx], g = psi[nidx];
        s += 0.5 * (f * f + g * g);
      }
      lp[idx] = s;
    }
  }
  return lp;
}

LpBounds littlewood_paley_bounds(const FilterBank& bank) {
  const int h = bank.height, w = bank.width;
  const auto lp = littlewood_paley(bank);
  LpBounds out{1e300, -1e300};
  for (int a = 0; a < h; ++a) {
    const double wy = bin_freq(a, h);
    for (int b = 0; b < w; ++b) {
      const double wx = bin_freq(b, w);
      if (wx * wx + wy * wy > kPi * kPi) continue;
      const double v = lp[static_cast<std::size_t>(a) * w + b];
      out.lo = std::min(out.lo, v);
      out.hi = std::max(out.hi, v);
    }
  }
  return out;
}

}  // namespace wscnn
