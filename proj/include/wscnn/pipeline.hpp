// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "wscnn/config.hpp"

namespace wscnn {

// Headline numbers computed by a pipeline run; the full detail lands in the
// output directory as rasters and CSV files.
struct PipelineResult {
  std::string out_dir;
  int n_tds = 0;
  int reference_td = 0;  // 1-based

  double psnr_wscnn_mean = 0;      // reconstructed vs clean, mean over images
  double psnr_corrupted_mean = 0;  // corrupted TDs vs clean, mean over TDs >= 2 and images
  double psnr_upsample_mean = 0;
  double psnr_tmip_mean = 0;
  double ssim_wscnn_mean = 0;

  std::vector<double> s1_energy_per_td;      // summed over the TD's images
  double median_dev_wscnn_deg = 0;           // fitted e1 vs ground truth
  std::vector<double> median_dev_per_td_deg; // one per corrupted TD (TD 2..n)

  double train_loss_first = 0;
  double train_loss_last = 0;

  std::string manifest_path;
};

// Runs phantom -> corrupt -> register -> scatter -> train/load -> fuse ->
// reconstruct -> dti -> metrics -> bullseye and writes every artifact plus a
// content-hash manifest into out_dir. A stage failure is rethrown with the
// stage name; artifacts from earlier stages stay on disk.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                            bool verbose = false);

}  // namespace wscnn
