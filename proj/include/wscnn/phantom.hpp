// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "wscnn/dti.hpp"
#include "wscnn/image.hpp"

namespace wscnn::phantom {

// Analytic short-axis myocardium stand-in: an annulus with a prescribed
// transmural helix-angle ramp and a fixed local eigenvalue triple.
struct PhantomSpec {
  int height = 96;
  int width = 160;
  double cx = -1;  // annulus center; < 0 means the image center
  double cy = -1;
  double r_inner = 20;
  double r_outer = 40;
  double ha_endo_deg = 60;   // prescribed HA at the endocardium
  double ha_epi_deg = -60;   // and at the epicardium
  double lambda1 = 1.5e-3;   // mm^2/s
  double lambda2 = 0.5e-3;
  double lambda3 = 0.3e-3;
  double s0_level = 1.0;
  double texture = 0.18;     // relative intensity modulation depth
  double noise_sigma = 0.0;  // Rician sigma in image units, applied inside the mask
  double b = 1000.0;         // s/mm^2
  std::uint64_t seed = 0x9e2026;
};

struct PhantomData {
  PhantomSpec spec;
  Image s0;
  std::vector<Image> dwis;             // one per gradient direction
  Mask mask;
  dti::TensorField truth;
  dti::CardiacFrame frame;
  std::vector<double> ha_truth;        // degrees, defined inside the mask
  std::vector<dti::Vec3> e1_truth;     // unit fiber directions inside the mask

  // images in pipeline order: s0 first, then the DW images
  std::vector<Image> all_images() const {
    std::vector<Image> v{s0};
    v.insert(v.end(), dwis.begin(), dwis.end());
    return v;
  }
};

PhantomData make_phantom(const PhantomSpec& spec,
                         const dti::GradientScheme& scheme = dti::GradientScheme::default12());

// Smooth random displacement field: per-node displacements drawn uniformly in
// a disc of the given amplitude on a coarse control grid, bilinearly
// interpolated per pixel. Max displacement never exceeds the amplitude.
struct DeformationField {
  int height = 0;
  int width = 0;
  std::vector<float> du;  // x displacement, sampling offset
  std::vector<float> dv;  // y displacement

  bool identity() const { return du.empty(); }
};

DeformationField make_deformation(int height, int width, double amplitude, int grid_spacing,
                                  std::uint64_t seed);

// Backward warp with bilinear sampling, zero outside; output(p) samples
// input(p + d(p)).
Image warp(const Image& img, const DeformationField& field);

struct CorruptionSpec {
  int n_tds = 10;
  double amplitude = 0.5;    // px; residual deformation after rigid registration
  int grid_spacing = 24;     // px between deformation control nodes
  int band_count = 3;        // signal-loss stripes per image
  int band_width = 31;       // rows
  int band_taper = 15;       // raised-cosine fade rows at each stripe edge
  double attenuation = 0.25; // multiplicative factor at the stripe center
  std::uint64_t seed = 0x7d2026;
};

struct BandRecord {
  int row0 = 0;
  int width = 0;
  double factor = 1.0;
};

// One simulated trigger delay: all images of the series warped by the TD's
// deformation and attenuated by per-image stripe bands.
struct TdData {
  std::vector<Image> images;                  // same order as PhantomData::all_images()
  DeformationField field;                     // identity for the clean TD 1
  std::vector<std::vector<BandRecord>> bands; // per image
};

// TD 1 (index 0) is the clean series; every later TD gets an independent
// deformation plus multiplicative signal-loss stripes.
std::vector<TdData> corrupt(const PhantomData& data, const CorruptionSpec& cspec);
std::vector<TdData> corrupt_images(const std::vector<Image>& clean_images,
                                   const CorruptionSpec& cspec);

}  // namespace wscnn::phantom
