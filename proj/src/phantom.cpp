// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/phantom.hpp"

#include <cmath>
#include <string>

#include "wscnn/rng.hpp"

namespace wscnn::phantom {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

PhantomData make_phantom(const PhantomSpec& spec, const dti::GradientScheme& scheme) {
  if (spec.height < 8 || spec.width < 8) throw ConfigError("make_phantom: raster too small");
  const double cx = spec.cx < 0 ? (spec.width - 1) / 2.0 : spec.cx;
  const double cy = spec.cy < 0 ? (spec.height - 1) / 2.0 : spec.cy;
  if (!(spec.r_inner > 0 && spec.r_inner < spec.r_outer))
    throw ConfigError("make_phantom: need 0 < r_inner < r_outer");
  if (spec.r_outer > std::min(spec.height, spec.width) / 2.0)
    throw ConfigError("make_phantom: outer radius " + std::to_string(spec.r_outer) +
                      " does not fit the raster");
  if (!(spec.lambda1 >= spec.lambda2 && spec.lambda2 >= spec.lambda3 && spec.lambda3 > 0))
    throw ConfigError("make_phantom: eigenvalues must satisfy l1 >= l2 >= l3 > 0");

  PhantomData out;
  out.spec = spec;
  out.frame.cx = cx;
  out.frame.cy = cy;
  out.mask = Mask(spec.height, spec.width, false);
  out.s0 = Image(spec.height, spec.width, 0);
  out.dwis.assign(scheme.size(), Image(spec.height, spec.width, 0));
  out.truth = dti::TensorField(spec.height, spec.width);
  const std::size_t npix = static_cast<std::size_t>(spec.height) * spec.width;
  out.ha_truth.assign(npix, 0.0);
  out.e1_truth.assign(npix, dti::Vec3{0, 0, 0});

  Rng rng(spec.seed);

  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double r = std::hypot(x - cx, y - cy);
      if (r < spec.r_inner || r > spec.r_outer) continue;
      const std::size_t i = static_cast<std::size_t>(y) * spec.width + x;
      out.mask.v[i] = 1;

      dti::Vec3 chat, rhat, zhat;
      if (!out.frame.axes(y, x, &chat, &rhat, &zhat)) continue;

      const double depth = (r - spec.r_inner) / (spec.r_outer - spec.r_inner);
      const double ha_deg = spec.ha_endo_deg + (spec.ha_epi_deg - spec.ha_endo_deg) * depth;
      const double ha = ha_deg * kPi / 180.0;

      // fiber in the tangent plane at elevation ha; sheet normal radial
      dti::Vec3 e1, e2, e3;
      for (int k = 0; k < 3; ++k) e1[k] = std::cos(ha) * chat[k] + std::sin(ha) * zhat[k];
      e2 = rhat;
      e3 = {e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
            e1[0] * e2[1] - e1[1] * e2[0]};

      double d[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
      const double l[3] = {spec.lambda1, spec.lambda2, spec.lambda3};
      const dti::Vec3* e[3] = {&e1, &e2, &e3};
      for (int k = 0; k < 3; ++k)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) d[a][b] += l[k] * (*e[k])[a] * (*e[k])[b];

      out.truth.comp[0][i] = d[0][0];
      out.truth.comp[1][i] = d[1][1];
      out.truth.comp[2][i] = d[2][2];
      out.truth.comp[3][i] = d[0][1];
      out.truth.comp[4][i] = d[0][2];
      out.truth.comp[5][i] = d[1][2];
      out.truth.flags[i] = dti::TensorField::kFitOk | dti::TensorField::kSpd;
      out.ha_truth[i] = ha_deg;
      out.e1_truth[i] = e1;

      // intensity texture across angle and depth so the images carry both
      // coarse and fine structure (real myocardium is far from flat)
      const double phi = std::atan2(cy - y, x - cx);
      const double tex =
          1.0 + spec.texture * (0.45 * std::cos(2 * phi) +
                                0.35 * std::sin(7 * phi + 2.1 * depth) +
                                0.20 * std::cos(2 * kPi * (3 * depth + 0.2)));
      const double s0v = spec.s0_level * tex;
      out.s0.v[i] = static_cast<pix>(s0v);

      for (std::size_t k = 0; k < scheme.size(); ++k) {
        const auto& g = scheme.directions()[k];
        double q = 0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) q += g[a] * d[a][b] * g[b];
        out.dwis[k].v[i] = static_cast<pix>(s0v * std::exp(-spec.b * q));
      }
    }
  }

  if (spec.noise_sigma > 0) {
    auto apply_rician = [&](Image& img, Rng& r) {
      for (std::size_t i = 0; i < img.numel(); ++i) {
        if (!out.mask.v[i]) continue;
        const double re = img.v[i] + spec.noise_sigma * r.normal();
        const double im = spec.noise_sigma * r.normal();
        img.v[i] = static_cast<pix>(std::sqrt(re * re + im * im));
      }
    };
    Rng r0 = rng.fork(1);
    apply_rician(out.s0, r0);
    for (std::size_t k = 0; k < out.dwis.size(); ++k) {
      Rng rk = rng.fork(2 + k);
      apply_rician(out.dwis[k], rk);
    }
  }
  return out;
}

DeformationField make_deformation(int height, int width, double amplitude, int grid_spacing,
                                  std::uint64_t seed) {
  if (grid_spacing < 1) throw ConfigError("make_deformation: grid spacing must be >= 1");
  if (amplitude < 0) throw ConfigError("make_deformation: negative amplitude");
  DeformationField f;
  f.height = height;
  f.width = width;
  if (amplitude == 0) return f;  // identity

  const int gx = width / grid_spacing + 2;
  const int gy = height / grid_spacing + 2;
  std::vector<double> nu(static_cast<std::size_t>(gx) * gy);
  std::vector<double> nv(nu.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < nu.size(); ++i) {
    // uniform in a disc of radius `amplitude`
    const double a = rng.uniform(0, 2 * kPi);
    const double r = amplitude * std::sqrt(rng.uniform());
    nu[i] = r * std::cos(a);
    nv[i] = r * std::sin(a);
  }

  f.du.resize(static_cast<std::size_t>(height) * width);
  f.dv.resize(f.du.size());
  for (int y = 0; y < height; ++y) {
    const double fy = static_cast<double>(y) / grid_spacing;
    const int y0 = static_cast<int>(fy);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x) / grid_spacing;
      const int x0 = static_cast<int>(fx);
      const double tx = fx - x0;
      const std::size_t n00 = static_cast<std::size_t>(y0) * gx + x0;
      const std::size_t n01 = n00 + 1;
      const std::size_t n10 = n00 + gx;
      const std::size_t n11 = n10 + 1;
      const double w00 = (1 - ty) * (1 - tx), w01 = (1 - ty) * tx;
      const double w10 = ty * (1 - tx), w11 = ty * tx;
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      f.du[i] = static_cast<float>(w00 * nu[n00] + w01 * nu[n01] + w10 * nu[n10] + w11 * nu[n11]);
      f.dv[i] = static_cast<float>(w00 * nv[n00] + w01 * nv[n01] + w10 * nv[n10] + w11 * nv[n11]);
    }
  }
  return f;
}

Image warp(const Image& img, const DeformationField& field) {
  if (field.identity()) return img;
  if (field.height != img.height || field.width != img.width)
    throw DataError("warp: field extents do not match the image");
  Image out(img.height, img.width, 0);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
      const double sx = x + field.du[i];
      const double sy = y + field.dv[i];
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double tx = sx - x0, ty = sy - y0;
      double acc = 0;
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
          const int yy = y0 + dy, xx = x0 + dx;
          if (yy < 0 || yy >= img.height || xx < 0 || xx >= img.width) continue;
          const double w = (dy ? ty : 1 - ty) * (dx ? tx : 1 - tx);
          acc += w * img.at(yy, xx);
        }
      out.v[i] = static_cast<pix>(acc);
    }
  }
  return out;
}

std::vector<TdData> corrupt(const PhantomData& data, const CorruptionSpec& cspec) {
  return corrupt_images(data.all_images(), cspec);
}

std::vector<TdData> corrupt_images(const std::vector<Image>& clean, const CorruptionSpec& cspec) {
  if (cspec.n_tds < 1) throw ConfigError("corrupt: need at least one TD");
  if (clean.empty()) throw DataError("corrupt: no input images");
  if (cspec.attenuation < 0 || cspec.attenuation > 1)
    throw ConfigError("corrupt: attenuation must lie in [0, 1]");
  if (cspec.amplitude < 0) throw ConfigError("corrupt: negative amplitude");
  std::vector<TdData> tds;
  tds.reserve(static_cast<std::size_t>(cspec.n_tds));

  for (int td = 0; td < cspec.n_tds; ++td) {
    TdData t;
    t.bands.resize(clean.size());
    if (td == 0) {
      t.images = clean;  // the reference TD mirrors the registration target
      t.field.height = clean[0].height;
      t.field.width = clean[0].width;
    } else {
      Rng rng(cspec.seed);
      t.field = make_deformation(clean[0].height, clean[0].width, cspec.amplitude,
                                 cspec.grid_spacing,
                                 rng.fork(static_cast<std::uint64_t>(td)).next());
      t.images.reserve(clean.size());
      for (std::size_t img = 0; img < clean.size(); ++img) {
        Image corrupted = warp(clean[img], t.field);
        Rng band_rng = rng.fork(1000 + static_cast<std::uint64_t>(td) * 64 + img);
        const bool attenuate = cspec.attenuation < 1.0 && cspec.band_count > 0 &&
                               cspec.band_width > 0;
        if (attenuate) {
          for (int bnd = 0; bnd < cspec.band_count; ++bnd) {
            const int max_row = std::max(0, corrupted.height - cspec.band_width);
            const int row0 = static_cast<int>(band_rng.uniform_int(0, max_row));
            // raised-cosine tapers: dephasing dropout fades in and out, and
            // hard edges would add spurious high-frequency energy instead of
            // removing signal
            const int taper = std::max(1, std::min(cspec.band_taper, cspec.band_width / 2));
            for (int y = row0; y < std::min(corrupted.height, row0 + cspec.band_width); ++y) {
              const int into = y - row0;
              const int from_end = cspec.band_width - 1 - into;
              double wgt = 1.0;
              if (into < taper)
                wgt = 0.5 * (1 - std::cos(kPi * (into + 0.5) / taper));
              else if (from_end < taper)
                wgt = 0.5 * (1 - std::cos(kPi * (from_end + 0.5) / taper));
              const double factor = 1.0 - (1.0 - cspec.attenuation) * wgt;
              for (int x = 0; x < corrupted.width; ++x)
                corrupted.at(y, x) = static_cast<pix>(corrupted.at(y, x) * factor);
            }
            t.bands[img].push_back(BandRecord{row0, cspec.band_width, cspec.attenuation});
          }
        }
        t.images.push_back(std::move(corrupted));
      }
    }
    tds.push_back(std::move(t));
  }
  return tds;
}

}  // namespace wscnn::phantom
