// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/invnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "wscnn/io.hpp"
#include "wscnn/rng.hpp"
#include "wscnn/tensor_ops.hpp"

namespace wscnn::invnet {

namespace {

NdArray he_normal(const Shape& shape, std::size_t fan_in, Rng& rng) {
  NdArray a(shape);
  const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (std::size_t i = 0; i < a.numel(); ++i)
    a[i] = static_cast<real>(scale * rng.normal());
  return a;
}

Conv make_conv(int in_ch, int out_ch, int k, Rng& rng) {
  Conv c;
  c.w = he_normal({static_cast<std::size_t>(out_ch), static_cast<std::size_t>(in_ch),
                   static_cast<std::size_t>(k), static_cast<std::size_t>(k)},
                  static_cast<std::size_t>(in_ch) * k * k, rng);
  c.b = NdArray({static_cast<std::size_t>(out_ch)});
  c.pad = k / 2;
  return c;
}

Deconv make_deconv(int in_ch, int out_ch, int k, Rng& rng) {
  Deconv d;
  d.w = he_normal({static_cast<std::size_t>(in_ch), static_cast<std::size_t>(out_ch),
                   static_cast<std::size_t>(k), static_cast<std::size_t>(k)},
                  static_cast<std::size_t>(in_ch) * k * k, rng);
  return d;
}

ResBlock make_resblock(int ch, int k, Rng& rng) {
  ResBlock rb{make_conv(ch, ch, k, rng), make_conv(ch, ch, k, rng)};
  // Damp the branch-closing conv so each residual block starts near the
  // identity; without normalization layers the plain He init compounds the
  // activation variance across the block stack.
  for (std::size_t i = 0; i < rb.c2.w.numel(); ++i) rb.c2.w[i] *= real(0.25);
  return rb;
}

// shared traversal so the const/non-const visitors and the tape forward all
// agree on parameter order
template <class ModelT, class Fn>
void visit_impl(ModelT& m, Fn&& fn) {
  for (std::size_t e = 0; e < m.enc.size(); ++e) {
    const std::string p = "enc" + std::to_string(e) + ".";
    fn(p + "conv.w", m.enc[e].conv.w);
    fn(p + "conv.b", m.enc[e].conv.b);
    for (std::size_t r = 0; r < m.enc[e].res.size(); ++r) {
      const std::string q = p + "res" + std::to_string(r) + ".";
      fn(q + "c1.w", m.enc[e].res[r].c1.w);
      fn(q + "c1.b", m.enc[e].res[r].c1.b);
      fn(q + "c2.w", m.enc[e].res[r].c2.w);
      fn(q + "c2.b", m.enc[e].res[r].c2.b);
    }
  }
  for (std::size_t d = 0; d < m.dec.size(); ++d) {
    const std::string p = "dec" + std::to_string(d) + ".";
    for (std::size_t r = 0; r < m.dec[d].res.size(); ++r) {
      const std::string q = p + "res" + std::to_string(r) + ".";
      fn(q + "c1.w", m.dec[d].res[r].c1.w);
      fn(q + "c1.b", m.dec[d].res[r].c1.b);
      fn(q + "c2.w", m.dec[d].res[r].c2.w);
      fn(q + "c2.b", m.dec[d].res[r].c2.b);
    }
    fn(p + "up.w", m.dec[d].up.w);
  }
  for (std::size_t r = 0; r < m.tail.size(); ++r) {
    const std::string q = "tail.res" + std::to_string(r) + ".";
    fn(q + "c1.w", m.tail[r].c1.w);
    fn(q + "c1.b", m.tail[r].c1.b);
    fn(q + "c2.w", m.tail[r].c2.w);
    fn(q + "c2.b", m.tail[r].c2.b);
  }
  fn("head.w", m.head.w);
  fn("head.b", m.head.b);
}

}  // namespace

void NetworkConfig::validate() const {
  if (in_channels < 1 || base_channels < 1)
    throw ConfigError("NetworkConfig: channel counts must be positive");
  if (enblocks < 1 || deblocks < 1 || resblocks_per_block < 1)
    throw ConfigError("NetworkConfig: block counts must be >= 1");
  if (kernel_size < 1 || kernel_size % 2 == 0)
    throw ConfigError("NetworkConfig: kernel_size must be odd and positive");
  if (deconv_kernel_size < 2 || (deconv_kernel_size - 2) % 2 != 0)
    throw ConfigError("NetworkConfig: deconv_kernel_size must be even and >= 2");
  if (deblocks >= enblocks + 20) throw ConfigError("NetworkConfig: implausible deblock count");
}

void Model::visit_params(const std::function<void(const std::string&, NdArray&)>& fn) {
  visit_impl(*this, fn);
}

void Model::visit_params(
    const std::function<void(const std::string&, const NdArray&)>& fn) const {
  visit_impl(*this, fn);
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  visit_params([&n](const std::string&, const NdArray& a) { n += a.numel(); });
  return n;
}

Model build_model(const NetworkConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Model m;
  m.cfg = cfg;
  Rng rng(seed ^ 0x10de1);

  int ch = cfg.in_channels;
  for (int e = 0; e < cfg.enblocks; ++e) {
    const int out_ch = cfg.base_channels << e;
    Enblock blk;
    blk.conv = make_conv(ch, out_ch, cfg.kernel_size, rng);
    for (int r = 0; r < cfg.resblocks_per_block; ++r)
      blk.res.push_back(make_resblock(out_ch, cfg.kernel_size, rng));
    m.enc.push_back(std::move(blk));
    ch = out_ch;
  }
  for (int d = 0; d < cfg.deblocks; ++d) {
    Deblock blk;
    for (int r = 0; r < cfg.resblocks_per_block; ++r)
      blk.res.push_back(make_resblock(ch, cfg.kernel_size, rng));
    const int out_ch = std::max(1, ch / 2);
    blk.up = make_deconv(ch, out_ch, cfg.deconv_kernel_size, rng);
    m.dec.push_back(std::move(blk));
    ch = out_ch;
  }
  for (int r = 0; r < cfg.resblocks_per_block; ++r)
    m.tail.push_back(make_resblock(ch, cfg.kernel_size, rng));
  m.head = make_conv(ch, 1, cfg.kernel_size, rng);
  return m;
}

Tape::NodeId forward_on_tape(const Model& model, Tape& tape, Tape::NodeId input,
                             const std::vector<Tape::NodeId>& params) {
  std::size_t cursor = 0;
  const auto next_param = [&](const NdArray& value) -> Tape::NodeId {
    if (params.empty()) return tape.leaf(value, false);
    if (cursor >= params.size())
      throw DataError("forward_on_tape: parameter list shorter than the model");
    return params[cursor++];
  };

  const int k = model.cfg.kernel_size;
  const int pad = k / 2;

  const auto resblock = [&](Tape::NodeId x, const ResBlock& rb) {
    const auto w1 = next_param(rb.c1.w);
    const auto b1 = next_param(rb.c1.b);
    const auto w2 = next_param(rb.c2.w);
    const auto b2 = next_param(rb.c2.b);
    const auto t = tape.conv2d(tape.relu(tape.conv2d(x, w1, b1, 1, pad)), w2, b2, 1, pad);
    return tape.add(x, t);
  };

  Tape::NodeId x = input;
  for (const Enblock& blk : model.enc) {
    const auto w = next_param(blk.conv.w);
    const auto b = next_param(blk.conv.b);
    x = tape.relu(tape.conv2d(x, w, b, 1, pad));
    for (const ResBlock& rb : blk.res) x = resblock(x, rb);
  }
  for (const Deblock& blk : model.dec) {
    for (const ResBlock& rb : blk.res) x = resblock(x, rb);
    const auto w = next_param(blk.up.w);
    x = tape.relu(tape.deconv2d(x, w, blk.up.stride));
  }
  for (const ResBlock& rb : model.tail) x = resblock(x, rb);
  const auto hw = next_param(model.head.w);
  const auto hb = next_param(model.head.b);
  // final ReLU clamps the reconstruction to nonnegative DW magnitudes
  x = tape.relu(tape.conv2d(x, hw, hb, 1, pad));
  if (!params.empty() && cursor != params.size())
    throw DataError("forward_on_tape: parameter list longer than the model");
  return x;
}

NdArray stack_to_array(const FeatureStack& stack) {
  NdArray a({stack.maps.size(), static_cast<std::size_t>(stack.map_h),
             static_cast<std::size_t>(stack.map_w)});
  std::size_t off = 0;
  for (const auto& m : stack.maps)
    for (const pix v : m) a[off++] = static_cast<real>(v);
  return a;
}

NdArray image_to_array(const Image& img) {
  NdArray a({1, static_cast<std::size_t>(img.height), static_cast<std::size_t>(img.width)});
  for (std::size_t i = 0; i < img.numel(); ++i) a[i] = static_cast<real>(img.v[i]);
  return a;
}

Image array_to_image(const NdArray& a) {
  const std::size_t r = a.rank();
  if (r < 2) throw DataError("array_to_image: rank too small");
  const int h = static_cast<int>(a.size(r - 2));
  const int w = static_cast<int>(a.size(r - 1));
  if (a.numel() != static_cast<std::size_t>(h) * w)
    throw DataError("array_to_image: leading extents must be 1");
  Image img(h, w);
  for (std::size_t i = 0; i < img.numel(); ++i) img.v[i] = static_cast<pix>(a[i]);
  return img;
}

Image forward(const Model& model, const FeatureStack& stack) {
  if (stack.n_maps() != model.cfg.in_channels)
    throw DataError("forward: stack has " + std::to_string(stack.n_maps()) +
                    " maps, the model expects " + std::to_string(model.cfg.in_channels));
  Tape tape;
  const NdArray in3 = stack_to_array(stack);
  NdArray in4({1, in3.size(0), in3.size(1), in3.size(2)});
  in4.vec() = in3.vec();
  const auto out = forward_on_tape(model, tape, tape.leaf(std::move(in4), false), {});
  const NdArray& o = tape.value(out);

  const int oh = static_cast<int>(o.size(2)), ow = static_cast<int>(o.size(3));
  const int th = model.out_h > 0 ? model.out_h : oh;
  const int tw = model.out_w > 0 ? model.out_w : ow;
  if (model.crop_top + th > oh || model.crop_left + tw > ow)
    throw DataError("forward: crop exceeds the upsampled canvas");
  Image img(th, tw);
  for (int y = 0; y < th; ++y)
    for (int x = 0; x < tw; ++x)
      img.at(y, x) = static_cast<pix>(
          o[(static_cast<std::size_t>(model.crop_top + y)) * ow + model.crop_left + x]);
  return img;
}

Image reconstruct(const Model& model, const FeatureStack& fused) { return forward(model, fused); }

TrainResult train(Model& model, const std::vector<Sample>& dataset, const TrainConfig& tc,
                  const std::string& checkpoint_dir,
                  const std::function<void(int, real)>& progress) {
  if (dataset.empty()) throw DataError("train: empty dataset");
  if (tc.iterations < 1) throw ConfigError("train: iterations must be >= 1");
  if (tc.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");

  const Shape in_shape = dataset[0].input.shape();
  const Shape tgt_shape = dataset[0].target.shape();
  if (in_shape.size() != 3 || static_cast<int>(in_shape[0]) != model.cfg.in_channels)
    throw DataError("train: sample inputs must be [in_channels, h, w]");
  if (tgt_shape.size() != 3 || tgt_shape[0] != 1)
    throw DataError("train: sample targets must be [1, H, W]");
  for (const Sample& s : dataset)
    if (s.input.shape() != in_shape || s.target.shape() != tgt_shape)
      throw DataError("train: all samples must share input and target extents");

  const int scale = model.cfg.output_scale();
  const int h = static_cast<int>(in_shape[1]), w = static_cast<int>(in_shape[2]);
  const int th = static_cast<int>(tgt_shape[1]), tw = static_cast<int>(tgt_shape[2]);
  const int oh = scale * h, ow = scale * w;
  if (th > oh || tw > ow)
    throw DataError("train: target extents " + std::to_string(th) + "x" + std::to_string(tw) +
                    " exceed the upsampled canvas " + std::to_string(oh) + "x" +
                    std::to_string(ow));
  model.crop_top = (oh - th) / 2;
  model.crop_left = (ow - tw) / 2;
  model.out_h = th;
  model.out_w = tw;

  // zero-padded target canvases, built once
  std::vector<NdArray> canvases;
  canvases.reserve(dataset.size());
  for (const Sample& s : dataset) {
    NdArray c({1, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
    for (int y = 0; y < th; ++y)
      for (int x = 0; x < tw; ++x)
        c[(static_cast<std::size_t>(model.crop_top + y)) * ow + model.crop_left + x] =
            s.target[static_cast<std::size_t>(y) * tw + x];
    canvases.push_back(std::move(c));
  }

  std::vector<NdArray*> params;
  model.visit_params([&params](const std::string&, NdArray& a) { params.push_back(&a); });

  AdamConfig acfg;
  acfg.lr = tc.lr;
  acfg.beta1 = tc.beta1;
  acfg.beta2 = tc.beta2;
  AdamState optim(acfg);

  Rng shuffle_rng(tc.seed ^ 0x5AFF1Eull);

  std::vector<std::size_t> order(dataset.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t pos = order.size();  // force an initial shuffle

  TrainResult result;
  result.loss_history.reserve(static_cast<std::size_t>(tc.iterations));

  const std::size_t bs = std::min<std::size_t>(tc.batch_size, dataset.size());
  for (int iter = 0; iter < tc.iterations; ++iter) {
    // draw the next batch, reshuffling at epoch boundaries
    std::vector<std::size_t> batch;
    batch.reserve(bs);
    while (batch.size() < bs) {
      if (pos >= order.size()) {
        for (std::size_t i = order.size(); i > 1; --i)
          std::swap(order[i - 1],
                    order[static_cast<std::size_t>(shuffle_rng.uniform_int(0, i - 1))]);
        pos = 0;
      }
      batch.push_back(order[pos++]);
    }

    NdArray in({bs, static_cast<std::size_t>(model.cfg.in_channels),
                static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
    NdArray tgt({bs, 1, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)});
    const std::size_t in_plane = dataset[0].input.numel();
    const std::size_t tgt_plane = canvases[0].numel();
    for (std::size_t b = 0; b < bs; ++b) {
      std::copy(dataset[batch[b]].input.vec().begin(), dataset[batch[b]].input.vec().end(),
                in.vec().begin() + b * in_plane);
      std::copy(canvases[batch[b]].vec().begin(), canvases[batch[b]].vec().end(),
                tgt.vec().begin() + b * tgt_plane);
    }

    Tape tape;
    std::vector<Tape::NodeId> param_ids;
    param_ids.reserve(params.size());
    for (NdArray* p : params) param_ids.push_back(tape.leaf(*p, true));
    const auto out = forward_on_tape(model, tape, tape.leaf(std::move(in), false), param_ids);
    const auto loss = tape.mse_loss(out, tape.leaf(std::move(tgt), false));
    const real loss_value = tape.value(loss)[0];
    if (!std::isfinite(static_cast<double>(loss_value)))
      throw NumericalError("train: non-finite loss at iteration " + std::to_string(iter));
    tape.backward(loss);

    std::vector<const NdArray*> grads;
    grads.reserve(params.size());
    for (const auto id : param_ids) grads.push_back(&tape.grad(id));
    optim.step(params, grads);

    result.loss_history.push_back(loss_value);
    if (progress) progress(iter, loss_value);

    if (!checkpoint_dir.empty() && tc.checkpoint_every > 0 &&
        (iter + 1) % tc.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "ckpt_%06d.wsckpt", iter + 1);
      save_checkpoint(checkpoint_dir + "/" + name, model, &optim);
    }
  }
  if (!checkpoint_dir.empty()) save_checkpoint(checkpoint_dir + "/ckpt_final.wsckpt", model, &optim);
  return result;
}

Image upsample_baseline(const FeatureStack& stack, int scale, int out_h, int out_w) {
  if (stack.maps.empty()) throw DataError("upsample_baseline: empty stack");
  if (scale < 1) throw ConfigError("upsample_baseline: scale must be >= 1");
  const int h = stack.map_h, w = stack.map_w;
  const int oh = h * scale, ow = w * scale;
  Image canvas(oh, ow);
  for (int y = 0; y < oh; ++y) {
    // align-corners=false sampling
    const double sy = (y + 0.5) / scale - 0.5;
    const int y0 = static_cast<int>(std::floor(sy));
    const double ty = sy - y0;
    for (int x = 0; x < ow; ++x) {
      const double sx = (x + 0.5) / scale - 0.5;
      const int x0 = static_cast<int>(std::floor(sx));
      const double tx = sx - x0;
      double acc = 0;
      for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
          const int yy = std::clamp(y0 + dy, 0, h - 1);
          const int xx = std::clamp(x0 + dx, 0, w - 1);
          const double wgt = (dy ? ty : 1 - ty) * (dx ? tx : 1 - tx);
          acc += wgt * stack.maps[0][static_cast<std::size_t>(yy) * w + xx];
        }
      canvas.at(y, x) = static_cast<pix>(acc);
    }
  }
  if (out_h <= 0 || (out_h == oh && out_w == ow)) return canvas;
  if (out_h > oh || out_w > ow) throw DataError("upsample_baseline: target exceeds canvas");
  const int top = (oh - out_h) / 2, left = (ow - out_w) / 2;
  Image img(out_h, out_w);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) img.at(y, x) = canvas.at(top + y, left + x);
  return img;
}

void save_checkpoint(const std::string& path, const Model& model, const AdamState* optim) {
  io::NamedArrays entries;
  const auto scalar = [](double v) {
    NdArray a(Shape{});
    a[0] = static_cast<real>(v);
    return a;
  };
  entries.emplace_back("cfg.in_channels", scalar(model.cfg.in_channels));
  entries.emplace_back("cfg.base_channels", scalar(model.cfg.base_channels));
  entries.emplace_back("cfg.enblocks", scalar(model.cfg.enblocks));
  entries.emplace_back("cfg.deblocks", scalar(model.cfg.deblocks));
  entries.emplace_back("cfg.resblocks_per_block", scalar(model.cfg.resblocks_per_block));
  entries.emplace_back("cfg.kernel_size", scalar(model.cfg.kernel_size));
  entries.emplace_back("cfg.deconv_kernel_size", scalar(model.cfg.deconv_kernel_size));
  entries.emplace_back("crop.top", scalar(model.crop_top));
  entries.emplace_back("crop.left", scalar(model.crop_left));
  entries.emplace_back("crop.out_h", scalar(model.out_h));
  entries.emplace_back("crop.out_w", scalar(model.out_w));
  model.visit_params([&entries](const std::string& name, const NdArray& a) {
    entries.emplace_back(name, a);
  });
  if (optim) {
    auto& m = const_cast<AdamState*>(optim)->moments_m();
    auto& v = const_cast<AdamState*>(optim)->moments_v();
    if (!m.empty()) {
      std::size_t idx = 0;
      model.visit_params([&](const std::string& name, const NdArray&) {
        entries.emplace_back(name + ".m", m[idx]);
        entries.emplace_back(name + ".v", v[idx]);
        ++idx;
      });
      entries.emplace_back("optim.t", scalar(static_cast<double>(optim->t())));
    }
  }
  io::write_checkpoint(path, entries);
}

Model load_checkpoint(const std::string& path, AdamState* optim) {
  const io::NamedArrays entries = io::read_checkpoint(path);
  std::map<std::string, const NdArray*> by_name;
  for (const auto& [name, value] : entries) by_name[name] = &value;

  const auto scalar = [&](const std::string& name) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw DataError(path + ": checkpoint missing " + name);
    return static_cast<double>((*it->second)[0]);
  };

  NetworkConfig cfg;
  cfg.in_channels = static_cast<int>(scalar("cfg.in_channels"));
  cfg.base_channels = static_cast<int>(scalar("cfg.base_channels"));
  cfg.enblocks = static_cast<int>(scalar("cfg.enblocks"));
  cfg.deblocks = static_cast<int>(scalar("cfg.deblocks"));
  cfg.resblocks_per_block = static_cast<int>(scalar("cfg.resblocks_per_block"));
  cfg.kernel_size = static_cast<int>(scalar("cfg.kernel_size"));
  cfg.deconv_kernel_size = static_cast<int>(scalar("cfg.deconv_kernel_size"));

  Model model = build_model(cfg, 0);
  model.crop_top = static_cast<int>(scalar("crop.top"));
  model.crop_left = static_cast<int>(scalar("crop.left"));
  model.out_h = static_cast<int>(scalar("crop.out_h"));
  model.out_w = static_cast<int>(scalar("crop.out_w"));

  model.visit_params([&](const std::string& name, NdArray& a) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw DataError(path + ": checkpoint missing parameter " + name);
    if (it->second->shape() != a.shape())
      throw DataError(path + ": parameter " + name + " has shape " +
                      shape_to_string(it->second->shape()) + ", expected " +
                      shape_to_string(a.shape()));
    a = *it->second;
  });

  if (optim && by_name.count("optim.t")) {
    optim->moments_m().clear();
    optim->moments_v().clear();
    model.visit_params([&](const std::string& name, const NdArray&) {
      const auto m = by_name.find(name + ".m");
      const auto v = by_name.find(name + ".v");
      if (m == by_name.end() || v == by_name.end())
        throw DataError(path + ": checkpoint missing optimizer moments for " + name);
      optim->moments_m().push_back(*m->second);
      optim->moments_v().push_back(*v->second);
    });
    optim->set_t(static_cast<std::uint64_t>(scalar("optim.t")));
  }
  return model;
}

}  // namespace wscnn::invnet
