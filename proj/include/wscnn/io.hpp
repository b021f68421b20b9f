// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wscnn/dti.hpp"
#include "wscnn/image.hpp"
#include "wscnn/nd_array.hpp"
#include "wscnn/scattering.hpp"

namespace wscnn::io {

// "WSCFS1\n" raster container: u32 map count, then per map u32 height,
// u32 width and raw float32 data, then a trailing UTF-8 key=value block.
// All integers and floats are little-endian. Keys are written sorted, so
// write -> read -> write is byte-identical.
struct RasterFile {
  std::vector<Image> maps;
  std::map<std::string, std::string> meta;
};

void write_rasters(const std::string& path, const RasterFile& file);
RasterFile read_rasters(const std::string& path);

// typed wrappers over the container
void write_image(const std::string& path, const Image& img,
                 std::map<std::string, std::string> meta = {});
Image read_image(const std::string& path);

void write_mask(const std::string& path, const Mask& mask);
Mask read_mask(const std::string& path);

void write_stack(const std::string& path, const FeatureStack& stack);
FeatureStack read_stack(const std::string& path);

void write_tensor_field(const std::string& path, const dti::TensorField& field);
dti::TensorField read_tensor_field(const std::string& path);

// "WSCKPT1\n" checkpoint: per entry u32 name length, UTF-8 name, u32 rank,
// u32 extents, raw float32 values (little-endian), until EOF.
using NamedArrays = std::vector<std::pair<std::string, NdArray>>;
void write_checkpoint(const std::string& path, const NamedArrays& entries);
NamedArrays read_checkpoint(const std::string& path);

// 16-bit binary PGM scaled so `peak` maps to 65535 (peak <= 0 uses the max).
void write_pgm16(const std::string& path, const Image& img, double peak = -1);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

// FNV-1a 64-bit over the file bytes; the manifest hash (reproducibility
// fingerprint, not a cryptographic digest).
std::uint64_t fnv1a64_file(const std::string& path);

// Writes "<hex hash>  <name>" lines, sorted by name.
void write_manifest(const std::string& manifest_path,
                    const std::vector<std::pair<std::string, std::string>>& name_to_path);

}  // namespace wscnn::io
