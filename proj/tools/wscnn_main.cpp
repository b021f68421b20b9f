// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0
//
// wscnn: motion compensation for multi-trigger-delay cardiac DW series via
// wavelet scattering, maximum-selection fusion and a learned inverse
// scattering network, with diffusion-tensor analysis.

#include <CLI11.hpp>

#include <complex>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "wscnn/config.hpp"
#include "wscnn/fft.hpp"
#include "wscnn/fusion.hpp"
#include "wscnn/io.hpp"
#include "wscnn/metrics.hpp"
#include "wscnn/pipeline.hpp"
#include "wscnn/scattering.hpp"

namespace fs = std::filesystem;
using namespace wscnn;

namespace {

std::string zero2(int v) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", v);
  return buf;
}

PipelineConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::string text;
  if (!path.empty()) {
    try {
      text = io::read_text(path);
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
  }
  for (const auto& line : overrides) text += "\n" + line;
  return PipelineConfig::from_string(text);
}

dti::GradientScheme load_scheme(const std::string& path, double b) {
  if (path.empty()) return dti::GradientScheme::default12(b);
  std::istringstream in(io::read_text(path));
  std::vector<dti::Vec3> dirs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    dti::Vec3 g{};
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &g[0], &g[1], &g[2]) != 3)
      throw DataError("scheme file: malformed line '" + line + "'");
    dirs.push_back(g);
  }
  return dti::GradientScheme(b, dirs);
}

// every subcommand carries --seed, --mask, --out plus a few shared knobs
struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string mask_path;
  std::string out;
  int threads = 0;

  void attach(CLI::App* cmd, bool with_config = true) {
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [this](const std::uint64_t& v) { overrides.push_back("seed = " + std::to_string(v)); },
        "master seed override");
    cmd->add_option("--mask", mask_path, "ROI mask raster (WSCFS1 container)");
    cmd->add_option("--out", out, "output path")->required();
    cmd->add_option_function<int>(
        "--threads",
        [this](const int& v) {
          threads = v;
          overrides.push_back("threads = " + std::to_string(v));
        },
        "worker threads (0 = hardware concurrency)");
    if (with_config)
      cmd->add_option("--config", config_path, "key=value configuration file");
  }

  PipelineConfig config() const {
    PipelineConfig cfg = load_config(config_path, overrides);
    if (cfg.threads > 0) set_thread_count(cfg.threads);
    return cfg;
  }

  const Mask* load_mask(Mask& storage) const {
    if (mask_path.empty()) return nullptr;
    storage = io::read_mask(mask_path);
    return &storage;
  }
};

void write_clean_bundle(const std::string& out, const phantom::PhantomData& data,
                        const PipelineConfig& cfg) {
  fs::create_directories(out);
  std::vector<std::pair<std::string, std::string>> artifacts;
  const auto emit = [&](const std::string& rel) {
    artifacts.emplace_back(rel, (fs::path(out) / rel).string());
    return artifacts.back().second;
  };
  const auto images = data.all_images();
  for (std::size_t k = 0; k < images.size(); ++k)
    io::write_image(emit("img_" + zero2(static_cast<int>(k)) + ".wsc"), images[k],
                    {{"role", k == 0 ? "b0" : "dwi"}});
  io::write_mask(emit("mask.wsc"), data.mask);
  io::write_tensor_field(emit("truth_tensor.wsc"), data.truth);
  Image ha(data.s0.height, data.s0.width);
  for (std::size_t i = 0; i < ha.v.size(); ++i) ha.v[i] = static_cast<pix>(data.ha_truth[i]);
  io::write_image(emit("truth_ha.wsc"), ha, {{"role", "ha_degrees"}});
  io::write_text(emit("params.txt"), cfg.to_string());
  io::write_manifest((fs::path(out) / "manifest.txt").string(), artifacts);
}

int cmd_phantom_gen(const Common& common) {
  const PipelineConfig cfg = common.config();
  const auto data = phantom::make_phantom(cfg.phan, dti::GradientScheme::default12(cfg.phan.b));
  write_clean_bundle(common.out, data, cfg);
  std::printf("phantom: %zu images + mask + ground truth -> %s\n", data.all_images().size(),
              common.out.c_str());
  return 0;
}

int cmd_phantom_corrupt(const Common& common, const std::string& in_dir) {
  const PipelineConfig cfg = common.config();
  std::vector<Image> clean;
  for (int k = 0;; ++k) {
    const fs::path p = fs::path(in_dir) / ("img_" + zero2(k) + ".wsc");
    if (!fs::exists(p)) break;
    clean.push_back(io::read_image(p.string()));
  }
  if (clean.empty()) throw DataError("no img_XX.wsc files found in " + in_dir);

  const auto tds = phantom::corrupt_images(clean, cfg.corruption);
  fs::create_directories(common.out);
  std::vector<std::pair<std::string, std::string>> artifacts;
  const auto emit = [&](const std::string& rel) {
    artifacts.emplace_back(rel, (fs::path(common.out) / rel).string());
    return artifacts.back().second;
  };
  std::ostringstream records;
  records << "td,image,band_row0,band_width,band_factor\n";
  for (std::size_t td = 0; td < tds.size(); ++td) {
    const std::string dir = "td" + zero2(static_cast<int>(td) + 1);
    fs::create_directories(fs::path(common.out) / dir);
    for (std::size_t k = 0; k < tds[td].images.size(); ++k) {
      io::write_image(emit(dir + "/img_" + zero2(static_cast<int>(k)) + ".wsc"),
                      tds[td].images[k]);
      for (const auto& band : tds[td].bands[k])
        records << (td + 1) << "," << k << "," << band.row0 << "," << band.width << ","
                << band.factor << "\n";
    }
  }
  io::write_text(emit("corruption_records.csv"), records.str());
  io::write_text(emit("params.txt"), cfg.to_string());
  io::write_manifest((fs::path(common.out) / "manifest.txt").string(), artifacts);
  std::printf("corrupt: %d TDs x %zu images -> %s\n", cfg.corruption.n_tds, clean.size(),
              common.out.c_str());
  return 0;
}

int cmd_bank_dump(const Common& common, int height, int width) {
  const PipelineConfig cfg = common.config();
  const FilterBank bank = build_bank(height, width, cfg.bank);
  fs::create_directories(common.out);

  const auto dump = [&](const std::vector<double>& freq, const std::string& name) {
    // spatial real part, centered for viewing
    std::vector<fft::cplx> buf(freq.size());
    for (std::size_t i = 0; i < freq.size(); ++i) buf[i] = fft::cplx(freq[i], 0.0);
    fft::fft2d(buf, height, width, true);
    Image img(height, width);
    double peak = 0;
    for (std::size_t i = 0; i < buf.size(); ++i) peak = std::max(peak, std::abs(buf[i].real()));
    if (peak == 0) peak = 1;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const int sy = (y + height / 2) % height;  // center the origin
        const int sx = (x + width / 2) % width;
        img.at(y, x) = static_cast<pix>(
            0.5 + 0.5 * buf[static_cast<std::size_t>(sy) * width + sx].real() / peak);
      }
    io::write_pgm16((fs::path(common.out) / (name + ".pgm")).string(), img, 1.0);
  };

  for (int j = 0; j < bank.params.J; ++j)
    for (int r = 0; r < bank.params.L; ++r)
      dump(bank.psi(j, r), "psi_j" + std::to_string(j) + "_r" + zero2(r));
  dump(bank.phi_hat, "phi");
  std::printf("bank: %d psi filters + phi -> %s\n", bank.n_psi(), common.out.c_str());
  return 0;
}

int cmd_scatter(const Common& common, const std::string& in_path) {
  const PipelineConfig cfg = common.config();
  const Image img = io::read_image(in_path);
  Mask mask_storage;
  const Mask* mask = common.load_mask(mask_storage);
  const FilterBank bank = build_bank(img.height, img.width, cfg.bank);
  const FeatureStack st = scatter(img, bank, mask);
  io::write_stack(common.out, st);
  std::printf("scatter: %d maps of %dx%d -> %s\n", st.n_maps(), st.map_h, st.map_w,
              common.out.c_str());
  return 0;
}

int cmd_fuse(const Common& common, const std::vector<std::string>& stack_paths,
             int reference_td) {
  std::vector<FeatureStack> stacks;
  stacks.reserve(stack_paths.size());
  for (const auto& p : stack_paths) stacks.push_back(io::read_stack(p));
  const FeatureStack fused = fusion::fuse_all(stacks);
  io::write_stack(common.out, fused);
  if (reference_td > 0) {
    // record the provenance choice in the container metadata
    io::RasterFile f = io::read_rasters(common.out);
    f.meta["reference_td"] = std::to_string(reference_td);
    io::write_rasters(common.out, f);
  }
  std::printf("fuse: %zu stacks -> %s\n", stacks.size(), common.out.c_str());
  return 0;
}

int cmd_train(const Common& common, const std::string& data_dir) {
  const PipelineConfig cfg = common.config();
  // dataset convention: <name>.stack.wsc paired with <name>.image.wsc
  std::vector<invnet::Sample> dataset;
  std::vector<fs::path> stack_files;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 10 && name.substr(name.size() - 10) == ".stack.wsc")
      stack_files.push_back(entry.path());
  }
  std::sort(stack_files.begin(), stack_files.end());
  for (const auto& sp : stack_files) {
    std::string ip = sp.string();
    ip.replace(ip.size() - 10, 10, ".image.wsc");
    if (!fs::exists(ip)) throw DataError("no matching image for " + sp.string());
    dataset.push_back(invnet::Sample{invnet::stack_to_array(io::read_stack(sp.string())),
                                     invnet::image_to_array(io::read_image(ip))});
  }
  if (dataset.empty())
    throw DataError("no *.stack.wsc / *.image.wsc pairs found in " + data_dir);

  invnet::NetworkConfig ncfg = cfg.net;
  ncfg.in_channels = static_cast<int>(dataset[0].input.size(0));
  invnet::Model model = invnet::build_model(ncfg, cfg.train.seed);
  fs::create_directories(common.out);
  const auto tr = invnet::train(model, dataset, cfg.train, common.out);
  std::ostringstream csv;
  csv << "iteration,loss\n";
  for (std::size_t i = 0; i < tr.loss_history.size(); ++i)
    csv << i << "," << static_cast<double>(tr.loss_history[i]) << "\n";
  io::write_text((fs::path(common.out) / "loss.csv").string(), csv.str());
  std::printf("train: %zu samples, %d iterations, loss %.6g -> %.6g\n", dataset.size(),
              cfg.train.iterations, static_cast<double>(tr.loss_history.front()),
              static_cast<double>(tr.loss_history.back()));
  return 0;
}

int cmd_reconstruct(const Common& common, const std::string& checkpoint,
                    const std::string& stack_path) {
  if (!fs::exists(checkpoint))
    throw DataError("checkpoint not found at '" + checkpoint + "'");
  const invnet::Model model = invnet::load_checkpoint(checkpoint);
  const FeatureStack fused = io::read_stack(stack_path);
  const Image out = invnet::reconstruct(model, fused);
  io::write_image(common.out, out);
  std::printf("reconstruct: %dx%d image -> %s\n", out.height, out.width, common.out.c_str());
  return 0;
}

int cmd_dti(const Common& common, const std::string& s0_path,
            const std::vector<std::string>& dwi_paths, const std::string& scheme_path,
            double b) {
  const Image s0 = io::read_image(s0_path);
  std::vector<Image> dwis;
  dwis.reserve(dwi_paths.size());
  for (const auto& p : dwi_paths) dwis.push_back(io::read_image(p));
  Mask mask_storage;
  const Mask* mask = common.load_mask(mask_storage);
  Mask all(s0.height, s0.width, true);
  const Mask& roi = mask ? *mask : all;

  const auto scheme = load_scheme(scheme_path, b);
  const auto field = dti::fit_tensor(s0, dwis, scheme, roi);
  const auto frame = dti::CardiacFrame::from_mask_centroid(roi);

  fs::create_directories(common.out);
  io::write_tensor_field((fs::path(common.out) / "tensor.wsc").string(), field);
  Image fa_map(s0.height, s0.width), md_map(s0.height, s0.width);
  Image ha_map(s0.height, s0.width), ta_map(s0.height, s0.width);
  std::ostringstream csv;
  csv << "y,x,fa,md,ha_deg,ta_deg\n";
  for (int y = 0; y < s0.height; ++y) {
    for (int x = 0; x < s0.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * s0.width + x;
      if (!roi.v[i] || !field.fit_ok(i)) continue;
      const auto eig = dti::eig_sym3(field.tensor(i));
      const double fa_v = dti::fa(eig.lambda[0], eig.lambda[1], eig.lambda[2]);
      const double md_v = dti::md(eig.lambda[0], eig.lambda[1], eig.lambda[2]);
      fa_map.v[i] = static_cast<pix>(fa_v);
      md_map.v[i] = static_cast<pix>(md_v);
      double ha_v = 0, ta_v = 0;
      if (const auto ht = dti::helix_transverse(eig.vec[0], y, x, frame)) {
        ha_v = ht->first;
        ta_v = ht->second;
        ha_map.v[i] = static_cast<pix>(ha_v);
        ta_map.v[i] = static_cast<pix>(ta_v);
      }
      csv << y << "," << x << "," << fa_v << "," << md_v << "," << ha_v << "," << ta_v << "\n";
    }
  }
  io::write_image((fs::path(common.out) / "fa.wsc").string(), fa_map);
  io::write_image((fs::path(common.out) / "md.wsc").string(), md_map);
  io::write_image((fs::path(common.out) / "ha.wsc").string(), ha_map);
  io::write_image((fs::path(common.out) / "ta.wsc").string(), ta_map);
  io::write_text((fs::path(common.out) / "dti.csv").string(), csv.str());
  std::printf("dti: tensor + fa/md/ha/ta -> %s\n", common.out.c_str());
  return 0;
}

int cmd_metrics(const Common& common, const std::string& ref_path, const std::string& test_path,
                double peak, const std::string& pair_id, const std::string& signal_mask_path,
                const std::string& noise_mask_path) {
  const Image ref = io::read_image(ref_path);
  const Image test = io::read_image(test_path);
  Mask mask_storage;
  const Mask* mask = common.load_mask(mask_storage);
  if (peak <= 0) peak = metrics::mask_peak(ref, mask);

  const double p = metrics::psnr(test, ref, peak, mask);
  const double s = metrics::ssim(test, ref, peak, mask);
  std::ostringstream csv;
  csv << "pair,psnr_db,ssim,snr_db\n";
  csv << pair_id << "," << p << "," << s << ",";
  if (!signal_mask_path.empty() && !noise_mask_path.empty()) {
    const Mask sm = io::read_mask(signal_mask_path);
    const Mask nm = io::read_mask(noise_mask_path);
    csv << metrics::snr(test, sm, nm);
  }
  csv << "\n";
  io::write_text(common.out, csv.str());
  std::printf("metrics: psnr=%.3f dB ssim=%.4f -> %s\n", p, s, common.out.c_str());
  return 0;
}

int cmd_bullseye(const Common& common, const std::string& values_path, int segments,
                 int layers) {
  const Image values = io::read_image(values_path);
  Mask mask_storage;
  const Mask* mask = common.load_mask(mask_storage);
  if (!mask) throw ConfigError("bullseye requires --mask");
  const auto frame = dti::CardiacFrame::from_mask_centroid(*mask);
  std::vector<double> v(values.v.begin(), values.v.end());
  const auto bins = dti::aha_bullseye(v, *mask, frame, segments, layers);
  std::ostringstream csv;
  csv << "segment,name,layer,mean,count\n";
  for (const auto& b : bins) {
    csv << (b.segment + 1) << "," << dti::aha_segment_name(b.segment) << "," << b.layer << ",";
    if (b.count)
      csv << b.mean;
    else
      csv << "missing";
    csv << "," << b.count << "\n";
  }
  io::write_text(common.out, csv.str());
  std::printf("bullseye: %dx%d bins -> %s\n", segments, layers, common.out.c_str());
  return 0;
}

int cmd_tmip(const Common& common, const std::vector<std::string>& image_paths) {
  std::vector<Image> images;
  images.reserve(image_paths.size());
  for (const auto& p : image_paths) images.push_back(io::read_image(p));
  const Image out = fusion::tmip_baseline(images);
  io::write_image(common.out, out);
  std::printf("tmip: %zu images -> %s\n", images.size(), common.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WSCNN motion compensation for cardiac DW imaging"};
  app.require_subcommand(1);
  int rc = 0;

  // pipeline
  auto* pipeline_cmd = app.add_subcommand("pipeline", "run the full workflow end to end");
  Common pipeline_common;
  pipeline_common.attach(pipeline_cmd);
  bool pipeline_verbose = false;
  pipeline_cmd->add_flag("--verbose", pipeline_verbose, "print stage progress");
  pipeline_cmd->add_option_function<int>(
      "--reference-td",
      [&pipeline_common](const int& v) {
        pipeline_common.overrides.push_back("register.reference_td = " + std::to_string(v));
      },
      "1-based registration reference TD (default: highest ROI energy)");
  pipeline_cmd->callback([&] {
    const auto result = run_pipeline(pipeline_common.config(), pipeline_common.out,
                                     pipeline_verbose);
    std::printf("pipeline: psnr wscnn %.2f dB (corrupted %.2f, tmip %.2f, upsample %.2f), "
                "median deviation %.2f deg -> %s\n",
                result.psnr_wscnn_mean, result.psnr_corrupted_mean, result.psnr_tmip_mean,
                result.psnr_upsample_mean, result.median_dev_wscnn_deg, result.out_dir.c_str());
  });

  // phantom gen / corrupt
  auto* phantom_cmd = app.add_subcommand("phantom", "synthetic data generation");
  phantom_cmd->require_subcommand(1);
  auto* gen_cmd = phantom_cmd->add_subcommand("gen", "generate a clean phantom dataset");
  Common gen_common;
  gen_common.attach(gen_cmd);
  gen_cmd->callback([&] { rc = cmd_phantom_gen(gen_common); });

  auto* corrupt_cmd = phantom_cmd->add_subcommand("corrupt", "simulate motion-corrupted TDs");
  Common corrupt_common;
  corrupt_common.attach(corrupt_cmd);
  std::string corrupt_in;
  corrupt_cmd->add_option("--in", corrupt_in, "clean dataset directory (img_XX.wsc)")->required();
  corrupt_cmd->callback([&] { rc = cmd_phantom_corrupt(corrupt_common, corrupt_in); });

  // bank dump
  auto* bank_cmd = app.add_subcommand("bank", "filter bank inspection");
  bank_cmd->require_subcommand(1);
  auto* dump_cmd = bank_cmd->add_subcommand("dump", "export spatial filters as PGM");
  Common dump_common;
  dump_common.attach(dump_cmd);
  int dump_h = 96, dump_w = 160;
  dump_cmd->add_option("--height", dump_h, "raster height");
  dump_cmd->add_option("--width", dump_w, "raster width");
  dump_cmd->callback([&] { rc = cmd_bank_dump(dump_common, dump_h, dump_w); });

  // scatter
  auto* scatter_cmd = app.add_subcommand("scatter", "wavelet scattering of one image");
  Common scatter_common;
  scatter_common.attach(scatter_cmd);
  std::string scatter_in;
  scatter_cmd->add_option("--in", scatter_in, "input image (WSCFS1)")->required();
  scatter_cmd->callback([&] { rc = cmd_scatter(scatter_common, scatter_in); });

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "maximum-selection fusion of feature stacks");
  Common fuse_common;
  fuse_common.attach(fuse_cmd, false);
  std::vector<std::string> fuse_inputs;
  int fuse_ref_td = 0;
  fuse_cmd->add_option("stacks", fuse_inputs, "input stack files")->required();
  fuse_cmd->add_option("--reference-td", fuse_ref_td,
                       "1-based reference TD recorded in the output metadata");
  fuse_cmd->callback([&] { rc = cmd_fuse(fuse_common, fuse_inputs, fuse_ref_td); });

  // train
  auto* train_cmd = app.add_subcommand("train", "train the inverse scattering network");
  Common train_common;
  train_common.attach(train_cmd);
  std::string train_data;
  train_cmd->add_option("--data", train_data, "directory of *.stack.wsc / *.image.wsc pairs")
      ->required();
  train_cmd->callback([&] { rc = cmd_train(train_common, train_data); });

  // reconstruct
  auto* recon_cmd = app.add_subcommand("reconstruct", "apply a trained model to a fused stack");
  Common recon_common;
  recon_common.attach(recon_cmd);
  std::string recon_ckpt, recon_stack;
  recon_cmd->add_option("--checkpoint", recon_ckpt, "model checkpoint (WSCKPT1)")->required();
  recon_cmd->add_option("--stack", recon_stack, "fused feature stack")->required();
  recon_cmd->callback([&] { rc = cmd_reconstruct(recon_common, recon_ckpt, recon_stack); });

  // dti
  auto* dti_cmd = app.add_subcommand("dti", "tensor fit and derived maps");
  Common dti_common;
  dti_common.attach(dti_cmd);
  std::string dti_s0, dti_scheme;
  std::vector<std::string> dti_dwis;
  double dti_b = 1000.0;
  dti_cmd->add_option("--s0", dti_s0, "b0 image")->required();
  dti_cmd->add_option("--dwi", dti_dwis, "DW images, one per gradient direction")->required();
  dti_cmd->add_option("--scheme", dti_scheme, "gradient scheme CSV (gx,gy,gz per line)");
  dti_cmd->add_option("--b", dti_b, "diffusion sensitivity in s/mm^2");
  dti_cmd->callback([&] { rc = cmd_dti(dti_common, dti_s0, dti_dwis, dti_scheme, dti_b); });

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "PSNR/SSIM/SNR between two images");
  Common metrics_common;
  metrics_common.attach(metrics_cmd, false);
  std::string metrics_ref, metrics_test, metrics_pair = "pair";
  std::string metrics_signal_mask, metrics_noise_mask;
  double metrics_peak = -1;
  metrics_cmd->add_option("--ref", metrics_ref, "reference image")->required();
  metrics_cmd->add_option("--test", metrics_test, "test image")->required();
  metrics_cmd->add_option("--peak", metrics_peak, "PSNR peak (default: reference mask maximum)");
  metrics_cmd->add_option("--pair-id", metrics_pair, "identifier for the CSV row");
  metrics_cmd->add_option("--signal-mask", metrics_signal_mask, "signal region for SNR");
  metrics_cmd->add_option("--noise-mask", metrics_noise_mask, "noise region for SNR");
  metrics_cmd->callback([&] {
    rc = cmd_metrics(metrics_common, metrics_ref, metrics_test, metrics_peak, metrics_pair,
                     metrics_signal_mask, metrics_noise_mask);
  });

  // bullseye
  auto* bullseye_cmd = app.add_subcommand("bullseye", "AHA segment/layer means");
  Common bullseye_common;
  bullseye_common.attach(bullseye_cmd, false);
  std::string bullseye_values;
  int bullseye_segments = 6, bullseye_layers = 3;
  bullseye_cmd->add_option("--values", bullseye_values, "per-voxel scalar raster")->required();
  bullseye_cmd->add_option("--segments", bullseye_segments, "angular segments");
  bullseye_cmd->add_option("--layers", bullseye_layers, "transmural layers");
  bullseye_cmd->callback(
      [&] { rc = cmd_bullseye(bullseye_common, bullseye_values, bullseye_segments, bullseye_layers); });

  // tmip
  auto* tmip_cmd = app.add_subcommand("tmip", "temporal maximum intensity projection");
  Common tmip_common;
  tmip_common.attach(tmip_cmd, false);
  std::vector<std::string> tmip_inputs;
  tmip_cmd->add_option("images", tmip_inputs, "input images")->required();
  tmip_cmd->callback([&] { rc = cmd_tmip(tmip_common, tmip_inputs); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return rc;
}
