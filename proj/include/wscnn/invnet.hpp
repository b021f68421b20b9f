// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wscnn/adam.hpp"
#include "wscnn/image.hpp"
#include "wscnn/nd_array.hpp"
#include "wscnn/scattering.hpp"
#include "wscnn/tape.hpp"

namespace wscnn::invnet {

// Encoder-decoder layout: `enblocks` Enblocks (conv + resblocks, channel
// width doubling per block), `deblocks` Deblocks (resblocks + stride-2
// deconv, width halving), a resblock tail and a final 1-channel conv. The
// spatial upsampling factor is 2^deblocks.
struct NetworkConfig {
  int in_channels = 21;
  int base_channels = 64;
  int enblocks = 3;
  int deblocks = 2;
  int resblocks_per_block = 3;
  int kernel_size = 3;
  int deconv_kernel_size = 4;

  int output_scale() const { return 1 << deblocks; }
  void validate() const;
};

struct TrainConfig {
  real lr = real(0.0001);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  int iterations = 5000;
  int batch_size = 8;
  std::uint64_t seed = 1;
  int checkpoint_every = 0;  // 0 disables periodic checkpoints
};

struct Sample {
  NdArray input;   // [C, h, w]
  NdArray target;  // [1, H, W]
};

struct Conv {
  NdArray w;  // [K, C, k, k]
  NdArray b;  // [K]
  int pad = 1;
};

struct Deconv {
  NdArray w;  // [C_in, C_out, k, k]
  int stride = 2;
};

struct ResBlock {
  Conv c1, c2;
};

struct Enblock {
  Conv conv;
  std::vector<ResBlock> res;
};

struct Deblock {
  std::vector<ResBlock> res;
  Deconv up;
};

class Model {
public:
  NetworkConfig cfg;
  std::vector<Enblock> enc;
  std::vector<Deblock> dec;
  std::vector<ResBlock> tail;
  Conv head;

  // center-crop from the 2^deblocks-times-upsampled canvas to the target
  // extents; zero when the canvas already matches
  int crop_top = 0;
  int crop_left = 0;
  int out_h = 0;  // 0 until bound to target extents
  int out_w = 0;

  // deterministic traversal over every named parameter
  void visit_params(const std::function<void(const std::string&, NdArray&)>& fn);
  void visit_params(const std::function<void(const std::string&, const NdArray&)>& fn) const;
  std::size_t parameter_count() const;
};

Model build_model(const NetworkConfig& cfg, std::uint64_t seed);

// Builds the forward graph on a tape; `params` must list leaf ids in
// visit_params order (training) or be empty (inference leaves are created
// internally without gradients).
Tape::NodeId forward_on_tape(const Model& model, Tape& tape, Tape::NodeId input,
                             const std::vector<Tape::NodeId>& params);

// Inference on one stack: output extents are output_scale x stack extents,
// center-cropped to (out_h, out_w) when the model is bound to target extents.
Image forward(const Model& model, const FeatureStack& stack);

struct TrainResult {
  std::vector<real> loss_history;  // one entry per iteration
};

// Minibatch Adam training on (stack, image) pairs. Shuffling is seeded;
// a non-finite loss aborts with the iteration index. When checkpoint_dir is
// nonempty, periodic and final checkpoints are written there.
TrainResult train(Model& model, const std::vector<Sample>& dataset, const TrainConfig& tc,
                  const std::string& checkpoint_dir = "",
                  const std::function<void(int, real)>& progress = {});

Image reconstruct(const Model& model, const FeatureStack& fused);

// Non-learned comparison: bilinear upsampling of the S0 map by the given
// scale, center-cropped to (out_h, out_w) when positive.
Image upsample_baseline(const FeatureStack& stack, int scale = 4, int out_h = 0, int out_w = 0);

// checkpoint round trip (float32 on disk)
void save_checkpoint(const std::string& path, const Model& model, const AdamState* optim = nullptr);
Model load_checkpoint(const std::string& path, AdamState* optim = nullptr);

// conversions between raster types and network tensors
NdArray stack_to_array(const FeatureStack& stack);
NdArray image_to_array(const Image& img);
Image array_to_image(const NdArray& a);

}  // namespace wscnn::invnet
