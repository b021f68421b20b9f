// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "wscnn/fusion.hpp"
#include "wscnn/io.hpp"
#include "wscnn/metrics.hpp"
#include "wscnn/pipeline.hpp"
#include "wscnn/scattering.hpp"

namespace wscnn {

namespace {

namespace fs = std::filesystem;

std::string zero2(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) throw NumericalError("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

struct Stage {
  const char* name;
  bool verbose;
  Stage(const char* n, bool v) : name(n), verbose(v) {
    if (verbose) std::printf("[pipeline] %s\n", name);
  }
};

template <class Fn>
auto run_stage(const char* name, bool verbose, Fn&& fn) {
  Stage s(name, verbose);
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const NumericalError& e) {
    throw NumericalError("stage '" + std::string(name) + "': " + e.what());
  } catch (const std::exception& e) {
    throw DataError("stage '" + std::string(name) + "': " + e.what());
  }
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir, bool verbose) {
  if (cfg.threads > 0) set_thread_count(cfg.threads);

  PipelineResult result;
  result.out_dir = out_dir;
  result.n_tds = cfg.corruption.n_tds;

  std::vector<std::pair<std::string, std::string>> artifacts;  // name -> absolute path
  const auto emit = [&](const std::string& rel) {
    artifacts.emplace_back(rel, (fs::path(out_dir) / rel).string());
    return artifacts.back().second;
  };
  const auto subdir = [&](const std::string& name) {
    fs::create_directories(fs::path(out_dir) / name);
  };

  fs::create_directories(out_dir);
  io::write_text(emit("resolved_config.txt"), cfg.to_string());

  // ---- phantom ------------------------------------------------------------
  const phantom::PhantomData clean = run_stage("phantom", verbose, [&] {
    return phantom::make_phantom(cfg.phan, dti::GradientScheme::default12(cfg.phan.b));
  });
  const auto scheme = dti::GradientScheme::default12(cfg.phan.b);
  const std::vector<Image> clean_images = clean.all_images();
  const int n_images = static_cast<int>(clean_images.size());

  run_stage("write-clean", verbose, [&] {
    subdir("clean");
    io::write_image(emit("clean/img_00.wsc"), clean.s0, {{"role", "b0"}});
    for (int k = 0; k < n_images - 1; ++k)
      io::write_image(emit("clean/img_" + zero2(k + 1) + ".wsc"), clean.dwis[k],
                      {{"role", "dwi"}});
    io::write_mask(emit("clean/mask.wsc"), clean.mask);
    io::write_tensor_field(emit("clean/truth_tensor.wsc"), clean.truth);
    Image ha(clean.s0.height, clean.s0.width);
    for (std::size_t i = 0; i < ha.v.size(); ++i)
      ha.v[i] = static_cast<pix>(clean.ha_truth[i]);
    io::write_image(emit("clean/truth_ha.wsc"), ha, {{"role", "ha_degrees"}});
    return 0;
  });

  // ---- corrupt --------------------------------------------------------------
  const std::vector<phantom::TdData> tds =
      run_stage("corrupt", verbose, [&] { return phantom::corrupt(clean, cfg.corruption); });
  run_stage("write-corrupted", verbose, [&] {
    for (std::size_t td = 0; td < tds.size(); ++td) {
      const std::string dir = "td" + zero2(static_cast<int>(td) + 1);
      subdir(dir);
      for (int k = 0; k < n_images; ++k)
        io::write_image(emit(dir + "/img_" + zero2(k) + ".wsc"), tds[td].images[k]);
    }
    return 0;
  });

  // ---- register -------------------------------------------------------------
  std::vector<std::vector<Image>> registered(tds.size());
  const std::size_t ref_td = run_stage("register", verbose, [&] {
    std::vector<std::vector<Image>> series;
    for (const auto& td : tds) series.push_back(td.images);
    std::size_t ref;
    if (cfg.reference_td > 0) {
      if (cfg.reference_td > static_cast<int>(tds.size()))
        throw DataError("reference TD " + std::to_string(cfg.reference_td) + " out of range");
      ref = static_cast<std::size_t>(cfg.reference_td - 1);
    } else {
      ref = fusion::reference_index(series, &clean.mask);
    }
    std::ostringstream csv;
    csv << "td,dx,dy,score\n";
    for (std::size_t td = 0; td < tds.size(); ++td) {
      if (td == ref) {
        registered[td] = tds[td].images;
        csv << (td + 1) << ",0,0,1\n";
        continue;
      }
      const auto reg = fusion::register_translation(tds[td].images[0], tds[ref].images[0],
                                                    cfg.register_window, &clean.mask);
      registered[td].reserve(tds[td].images.size());
      for (const Image& img : tds[td].images)
        registered[td].push_back(circshift(img, reg.dx, reg.dy));
      csv << (td + 1) << "," << reg.dx << "," << reg.dy << "," << reg.score << "\n";
    }
    io::write_text(emit("registration.csv"), csv.str());
    return ref;
  });
  result.reference_td = static_cast<int>(ref_td) + 1;

  // ---- scatter --------------------------------------------------------------
  const FilterBank bank = run_stage("bank", verbose, [&] {
    return build_bank(cfg.phan.height, cfg.phan.width, cfg.bank);
  });
  std::vector<std::vector<FeatureStack>> stacks(tds.size());
  run_stage("scatter", verbose, [&] {
    subdir("stacks");
    for (std::size_t td = 0; td < tds.size(); ++td) {
      stacks[td] = scatter_batch(registered[td], bank);
      for (int k = 0; k < n_images; ++k)
        io::write_stack(
            emit("stacks/td" + zero2(static_cast<int>(td) + 1) + "_img_" + zero2(k) + ".wsc"),
            stacks[td][k]);
    }
    return 0;
  });

  run_stage("s1-energy", verbose, [&] {
    std::ostringstream csv;
    csv << "td,s1_energy\n";
    for (std::size_t td = 0; td < tds.size(); ++td) {
      double e = 0;
      for (const auto& st : stacks[td]) e += s1_energy(st);
      result.s1_energy_per_td.push_back(e);
      csv << (td + 1) << "," << e << "\n";
    }
    io::write_text(emit("s1_energy.csv"), csv.str());
    return 0;
  });

  // ---- train or load ----------------------------------------------------------
  invnet::Model model = run_stage("train", verbose, [&] {
    if (!cfg.train_enabled) {
      if (cfg.checkpoint.empty() || !fs::exists(cfg.checkpoint))
        throw DataError("training disabled and checkpoint not found at '" + cfg.checkpoint + "'");
      return invnet::load_checkpoint(cfg.checkpoint);
    }
    invnet::NetworkConfig ncfg = cfg.net;
    ncfg.in_channels = 1 + cfg.bank.J * cfg.bank.L;
    invnet::Model m = invnet::build_model(ncfg, cfg.train.seed);

    std::vector<invnet::Sample> dataset;
    dataset.reserve(tds.size() * static_cast<std::size_t>(n_images));
    for (std::size_t td = 0; td < tds.size(); ++td)
      for (int k = 0; k < n_images; ++k)
        dataset.push_back(invnet::Sample{invnet::stack_to_array(stacks[td][k]),
                                         invnet::image_to_array(registered[td][k])});

    subdir("train");
    std::function<void(int, real)> progress;
    if (verbose)
      progress = [](int it, real loss) {
        if (it % 100 == 0)
          std::printf("  iter %6d  loss %.6g\n", it, static_cast<double>(loss));
      };
    const auto tr = invnet::train(m, dataset, cfg.train, (fs::path(out_dir) / "train").string(),
                                  progress);
    std::ostringstream csv;
    csv << "iteration,loss\n";
    for (std::size_t i = 0; i < tr.loss_history.size(); ++i)
      csv << i << "," << static_cast<double>(tr.loss_history[i]) << "\n";
    io::write_text(emit("train/loss.csv"), csv.str());
    emit("train/ckpt_final.wsckpt");
    if (cfg.train.checkpoint_every > 0)
      for (int it = cfg.train.checkpoint_every; it <= cfg.train.iterations;
           it += cfg.train.checkpoint_every) {
        char name[64];
        std::snprintf(name, sizeof name, "train/ckpt_%06d.wsckpt", it);
        emit(name);
      }
    result.train_loss_first = static_cast<double>(tr.loss_history.front());
    result.train_loss_last = static_cast<double>(tr.loss_history.back());
    return m;
  });

  // ---- fuse -------------------------------------------------------------------
  std::vector<FeatureStack> fused(static_cast<std::size_t>(n_images));
  run_stage("fuse", verbose, [&] {
    subdir("fused");
    for (int k = 0; k < n_images; ++k) {
      std::vector<FeatureStack> per_td;
      per_td.reserve(tds.size());
      for (std::size_t td = 0; td < tds.size(); ++td) per_td.push_back(stacks[td][k]);
      fused[k] = fusion::fuse_all(per_td);
      io::write_stack(emit("fused/img_" + zero2(k) + ".wsc"), fused[k]);
    }
    return 0;
  });

  // ---- reconstruct --------------------------------------------------------------
  std::vector<Image> recon(static_cast<std::size_t>(n_images));
  run_stage("reconstruct", verbose, [&] {
    subdir("recon");
    for (int k = 0; k < n_images; ++k) {
      recon[k] = invnet::reconstruct(model, fused[k]);
      io::write_image(emit("recon/img_" + zero2(k) + ".wsc"), recon[k]);
    }
    io::write_pgm16(emit("recon/img_00.pgm"), recon[0]);
    return 0;
  });

  // ---- baselines -----------------------------------------------------------------
  std::vector<Image> tmip(static_cast<std::size_t>(n_images));
  std::vector<Image> upsampled(static_cast<std::size_t>(n_images));
  run_stage("baselines", verbose, [&] {
    subdir("baseline");
    for (int k = 0; k < n_images; ++k) {
      std::vector<Image> per_td;
      per_td.reserve(tds.size());
      for (std::size_t td = 0; td < tds.size(); ++td) per_td.push_back(registered[td][k]);
      tmip[k] = fusion::tmip_baseline(per_td);
      upsampled[k] = invnet::upsample_baseline(fused[k], model.cfg.output_scale(),
                                               clean.s0.height, clean.s0.width);
      io::write_image(emit("baseline/tmip_img_" + zero2(k) + ".wsc"), tmip[k]);
      io::write_image(emit("baseline/upsample_img_" + zero2(k) + ".wsc"), upsampled[k]);
    }
    return 0;
  });

  // ---- dti ------------------------------------------------------------------------
  run_stage("dti", verbose, [&] {
    subdir("dti");
    const auto fit = dti::fit_tensor(recon[0], std::span<const Image>(recon.data() + 1,
                                                                      recon.size() - 1),
                                     scheme, clean.mask);
    io::write_tensor_field(emit("dti/wscnn_tensor.wsc"), fit);

    Image fa_map(clean.s0.height, clean.s0.width), md_map(clean.s0.height, clean.s0.width);
    Image ha_map(clean.s0.height, clean.s0.width), ta_map(clean.s0.height, clean.s0.width);
    std::vector<double> ha_values(fa_map.numel(), 0.0);
    std::vector<double> devs;
    Image dev_map(clean.s0.height, clean.s0.width);
    for (int y = 0; y < clean.s0.height; ++y) {
      for (int x = 0; x < clean.s0.width; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * clean.s0.width + x;
        if (!clean.mask.v[i] || !fit.fit_ok(i)) continue;
        const auto eig = dti::eig_sym3(fit.tensor(i));
        fa_map.v[i] = static_cast<pix>(dti::fa(eig.lambda[0], eig.lambda[1], eig.lambda[2]));
        md_map.v[i] = static_cast<pix>(dti::md(eig.lambda[0], eig.lambda[1], eig.lambda[2]));
        if (const auto ht = dti::helix_transverse(eig.vec[0], y, x, clean.frame)) {
          ha_map.v[i] = static_cast<pix>(ht->first);
          ta_map.v[i] = static_cast<pix>(ht->second);
          ha_values[i] = ht->first;
        }
        const double dev = dti::deviation_angle(eig.vec[0], clean.e1_truth[i]);
        dev_map.v[i] = static_cast<pix>(dev);
        devs.push_back(dev);
      }
    }
    io::write_image(emit("dti/fa.wsc"), fa_map);
    io::write_image(emit("dti/md.wsc"), md_map);
    io::write_image(emit("dti/ha.wsc"), ha_map);
    io::write_image(emit("dti/ta.wsc"), ta_map);
    io::write_image(emit("dti/deviation.wsc"), dev_map);
    io::write_pgm16(emit("dti/fa.pgm"), fa_map, 1.0);
    // no valid fit anywhere means the reconstruction carries no signal;
    // report the worst possible angle rather than failing the run
    result.median_dev_wscnn_deg = devs.empty() ? 90.0 : median(devs);

    // per corrupted TD: the same fit on the registered TD series
    std::ostringstream csv;
    csv << "td,median_deviation_deg\n";
    for (std::size_t td = 0; td < tds.size(); ++td) {
      if (td == 0) continue;  // TD 1 is the clean series by construction
      const auto& imgs = registered[td];
      const auto td_fit = dti::fit_tensor(imgs[0], std::span<const Image>(imgs.data() + 1,
                                                                          imgs.size() - 1),
                                          scheme, clean.mask);
      std::vector<double> td_devs;
      for (std::size_t i = 0; i < clean.mask.v.size(); ++i) {
        if (!clean.mask.v[i] || !td_fit.fit_ok(i)) continue;
        const auto eig = dti::eig_sym3(td_fit.tensor(i));
        td_devs.push_back(dti::deviation_angle(eig.vec[0], clean.e1_truth[i]));
      }
      const double m = td_devs.empty() ? 90.0 : median(td_devs);
      result.median_dev_per_td_deg.push_back(m);
      csv << (td + 1) << "," << m << "\n";
    }
    io::write_text(emit("dti/deviation_per_td.csv"), csv.str());

    // bulls-eye of the reconstructed and the prescribed helix angles
    std::ostringstream bcsv;
    bcsv << "segment,name,layer,mean_wscnn,mean_truth,count\n";
    const auto wscnn_bins = dti::aha_bullseye(ha_values, clean.mask, clean.frame);
    const auto truth_bins = dti::aha_bullseye(clean.ha_truth, clean.mask, clean.frame);
    for (std::size_t i = 0; i < wscnn_bins.size(); ++i) {
      const auto& b = wscnn_bins[i];
      bcsv << (b.segment + 1) << "," << dti::aha_segment_name(b.segment) << "," << b.layer
           << ",";
      if (b.count)
        bcsv << b.mean;
      else
        bcsv << "missing";
      bcsv << ",";
      if (truth_bins[i].count)
        bcsv << truth_bins[i].mean;
      else
        bcsv << "missing";
      bcsv << "," << b.count << "\n";
    }
    io::write_text(emit("dti/bullseye_ha.csv"), bcsv.str());
    return 0;
  });

  // ---- metrics ----------------------------------------------------------------------
  run_stage("metrics", verbose, [&] {
    std::ostringstream csv;
    csv << "image,psnr_wscnn,ssim_wscnn,psnr_tmip,psnr_upsample\n";
    double acc_w = 0, acc_t = 0, acc_u = 0, acc_s = 0;
    for (int k = 0; k < n_images; ++k) {
      const double peak = metrics::mask_peak(clean_images[k], &clean.mask);
      const double pw = metrics::psnr(recon[k], clean_images[k], peak, &clean.mask);
      const double pt = metrics::psnr(tmip[k], clean_images[k], peak, &clean.mask);
      const double pu = metrics::psnr(upsampled[k], clean_images[k], peak, &clean.mask);
      const double sw = metrics::ssim(recon[k], clean_images[k], peak, &clean.mask);
      acc_w += pw;
      acc_t += pt;
      acc_u += pu;
      acc_s += sw;
      csv << "img_" << zero2(k) << "," << pw << "," << sw << "," << pt << "," << pu << "\n";
    }
    result.psnr_wscnn_mean = acc_w / n_images;
    result.psnr_tmip_mean = acc_t / n_images;
    result.psnr_upsample_mean = acc_u / n_images;
    result.ssim_wscnn_mean = acc_s / n_images;
    io::write_text(emit("metrics.csv"), csv.str());

    std::ostringstream ccsv;
    ccsv << "td,image,psnr_corrupted\n";
    double acc_c = 0;
    std::size_t n_c = 0;
    for (std::size_t td = 1; td < tds.size(); ++td) {
      for (int k = 0; k < n_images; ++k) {
        const double peak = metrics::mask_peak(clean_images[k], &clean.mask);
        const double p = metrics::psnr(tds[td].images[k], clean_images[k], peak, &clean.mask);
        acc_c += p;
        ++n_c;
        ccsv << (td + 1) << ",img_" << zero2(k) << "," << p << "\n";
      }
    }
    result.psnr_corrupted_mean = n_c ? acc_c / n_c : 0.0;
    io::write_text(emit("metrics_corrupted.csv"), ccsv.str());

    std::ostringstream sum;
    sum << "key,value\n";
    sum << "reference_td," << result.reference_td << "\n";
    sum << "psnr_wscnn_mean," << result.psnr_wscnn_mean << "\n";
    sum << "psnr_corrupted_mean," << result.psnr_corrupted_mean << "\n";
    sum << "psnr_tmip_mean," << result.psnr_tmip_mean << "\n";
    sum << "psnr_upsample_mean," << result.psnr_upsample_mean << "\n";
    sum << "ssim_wscnn_mean," << result.ssim_wscnn_mean << "\n";
    sum << "median_dev_wscnn_deg," << result.median_dev_wscnn_deg << "\n";
    io::write_text(emit("summary.csv"), sum.str());
    return 0;
  });

  // ---- manifest ------------------------------------------------------------------------
  run_stage("manifest", verbose, [&] {
    const std::string path = (fs::path(out_dir) / "manifest.txt").string();
    io::write_manifest(path, artifacts);
    result.manifest_path = path;
    return 0;
  });
  return result;
}

}  // namespace wscnn
