// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wscnn::io {

namespace {

constexpr char kRasterMagic[] = "WSCFS1\n";
constexpr char kCheckpointMagic[] = "WSCKPT1\n";

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32(std::string& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

class Reader {
public:
  explicit Reader(std::string bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes_[pos_ + i]);
    pos_ += 4;
    return v;
  }

  float f32() { return std::bit_cast<float>(u32()); }

  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::string rest() {
    std::string s = bytes_.substr(pos_);
    pos_ = bytes_.size();
    return s;
  }

  bool eof() const { return pos_ >= bytes_.size(); }

  void expect_magic(const char* magic) {
    const std::size_t n = std::strlen(magic);
    if (bytes_.size() < n || bytes_.compare(0, n, magic) != 0)
      throw DataError(path_ + ": bad magic (expected " + std::string(magic, n - 1) + ")");
    pos_ = n;
  }

private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw DataError(path_ + ": truncated file");
  }

  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot create " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to " + path);
}

}  // namespace

void write_rasters(const std::string& path, const RasterFile& file) {
  std::string out(kRasterMagic);
  put_u32(out, static_cast<std::uint32_t>(file.maps.size()));
  for (const Image& m : file.maps) {
    put_u32(out, static_cast<std::uint32_t>(m.height));
    put_u32(out, static_cast<std::uint32_t>(m.width));
    for (pix v : m.v) put_f32(out, static_cast<float>(v));
  }
  for (const auto& [k, v] : file.meta) out += k + "=" + v + "\n";
  spill(path, out);
}

RasterFile read_rasters(const std::string& path) {
  Reader r(slurp(path), path);
  r.expect_magic(kRasterMagic);
  RasterFile file;
  const std::uint32_t count = r.u32();
  file.maps.reserve(count);
  for (std::uint32_t m = 0; m < count; ++m) {
    const std::uint32_t h = r.u32();
    const std::uint32_t w = r.u32();
    if (h == 0 || w == 0 || static_cast<std::uint64_t>(h) * w > (1u << 28))
      throw DataError(path + ": unreasonable raster extents");
    Image img(static_cast<int>(h), static_cast<int>(w));
    for (auto& v : img.v) v = r.f32();
    file.maps.push_back(std::move(img));
  }
  std::istringstream meta(r.rest());
  std::string line;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError(path + ": malformed metadata line '" + line + "'");
    file.meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return file;
}

void write_image(const std::string& path, const Image& img,
                 std::map<std::string, std::string> meta) {
  RasterFile f;
  f.maps.push_back(img);
  f.meta = std::move(meta);
  f.meta.emplace("kind", "image");
  write_rasters(path, f);
}

Image read_image(const std::string& path) {
  RasterFile f = read_rasters(path);
  if (f.maps.size() != 1) throw DataError(path + ": expected a single-map image file");
  return std::move(f.maps[0]);
}

void write_mask(const std::string& path, const Mask& mask) {
  Image img(mask.height, mask.width);
  for (std::size_t i = 0; i < img.v.size(); ++i) img.v[i] = mask.v[i] ? 1.0f : 0.0f;
  write_image(path, img, {{"kind", "mask"}});
}

Mask read_mask(const std::string& path) {
  const Image img = read_image(path);
  Mask mask(img.height, img.width);
  for (std::size_t i = 0; i < img.v.size(); ++i) mask.v[i] = img.v[i] != 0.0f ? 1 : 0;
  return mask;
}

void write_stack(const std::string& path, const FeatureStack& stack) {
  RasterFile f;
  for (const auto& m : stack.maps) {
    Image img(stack.map_h, stack.map_w);
    img.v = m;
    f.maps.push_back(std::move(img));
  }
  f.meta["kind"] = "stack";
  f.meta["J"] = std::to_string(stack.J);
  f.meta["L"] = std::to_string(stack.L);
  f.meta["src_h"] = std::to_string(stack.src_h);
  f.meta["src_w"] = std::to_string(stack.src_w);
  write_rasters(path, f);
}

FeatureStack read_stack(const std::string& path) {
  RasterFile f = read_rasters(path);
  if (f.maps.empty()) throw DataError(path + ": stack file with no maps");
  FeatureStack st;
  st.map_h = f.maps[0].height;
  st.map_w = f.maps[0].width;
  auto meta_int = [&](const char* key) {
    const auto it = f.meta.find(key);
    if (it == f.meta.end()) throw DataError(path + ": stack metadata missing " + std::string(key));
    return std::stoi(it->second);
  };
  st.J = meta_int("J");
  st.L = meta_int("L");
  st.src_h = meta_int("src_h");
  st.src_w = meta_int("src_w");
  for (auto& m : f.maps) {
    if (m.height != st.map_h || m.width != st.map_w)
      throw DataError(path + ": stack maps have inconsistent extents");
    st.maps.push_back(std::move(m.v));
  }
  return st;
}

void write_tensor_field(const std::string& path, const dti::TensorField& field) {
  RasterFile f;
  for (int c = 0; c < 6; ++c) {
    Image img(field.height, field.width);
    for (std::size_t i = 0; i < img.v.size(); ++i)
      img.v[i] = static_cast<pix>(field.comp[c][i]);
    f.maps.push_back(std::move(img));
  }
  Image flags(field.height, field.width);
  for (std::size_t i = 0; i < flags.v.size(); ++i)
    flags.v[i] = static_cast<pix>(field.flags[i]);
  f.maps.push_back(std::move(flags));
  f.meta["kind"] = "tensorfield";
  f.meta["components"] = "Dxx,Dyy,Dzz,Dxy,Dxz,Dyz,flags";
  write_rasters(path, f);
}

dti::TensorField read_tensor_field(const std::string& path) {
  RasterFile f = read_rasters(path);
  if (f.maps.size() != 7) throw DataError(path + ": tensor field needs 7 maps");
  dti::TensorField field(f.maps[0].height, f.maps[0].width);
  for (int c = 0; c < 6; ++c)
    for (std::size_t i = 0; i < f.maps[c].v.size(); ++i)
      field.comp[c][i] = f.maps[c].v[i];
  for (std::size_t i = 0; i < f.maps[6].v.size(); ++i)
    field.flags[i] = static_cast<std::uint8_t>(f.maps[6].v[i]);
  return field;
}

void write_checkpoint(const std::string& path, const NamedArrays& entries) {
  std::string out(kCheckpointMagic);
  for (const auto& [name, value] : entries) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_u32(out, static_cast<std::uint32_t>(value.rank()));
    for (std::size_t d = 0; d < value.rank(); ++d)
      put_u32(out, static_cast<std::uint32_t>(value.size(d)));
    for (std::size_t i = 0; i < value.numel(); ++i)
      put_f32(out, static_cast<float>(value[i]));
  }
  spill(path, out);
}

NamedArrays read_checkpoint(const std::string& path) {
  Reader r(slurp(path), path);
  r.expect_magic(kCheckpointMagic);
  NamedArrays entries;
  while (!r.eof()) {
    const std::uint32_t name_len = r.u32();
    if (name_len > 4096) throw DataError(path + ": unreasonable name length");
    const std::string name = r.str(name_len);
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw DataError(path + ": unreasonable rank for " + name);
    Shape shape(rank);
    for (auto& e : shape) e = r.u32();
    NdArray value(shape);
    for (std::size_t i = 0; i < value.numel(); ++i) value[i] = static_cast<real>(r.f32());
    entries.emplace_back(name, std::move(value));
  }
  return entries;
}

void write_pgm16(const std::string& path, const Image& img, double peak) {
  if (peak <= 0) {
    for (pix v : img.v) peak = std::max(peak, static_cast<double>(v));
    if (peak <= 0) peak = 1.0;
  }
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) +
                    "\n65535\n";
  for (pix v : img.v) {
    double s = static_cast<double>(v) / peak;
    s = std::clamp(s, 0.0, 1.0);
    const auto q = static_cast<std::uint16_t>(std::lround(s * 65535.0));
    out.push_back(static_cast<char>(q >> 8));  // PGM is big-endian
    out.push_back(static_cast<char>(q & 0xff));
  }
  spill(path, out);
}

void write_text(const std::string& path, const std::string& text) { spill(path, text); }

std::string read_text(const std::string& path) { return slurp(path); }

std::uint64_t fnv1a64_file(const std::string& path) {
  const std::string bytes = slurp(path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_manifest(const std::string& manifest_path,
                    const std::vector<std::pair<std::string, std::string>>& name_to_path) {
  std::vector<std::pair<std::string, std::string>> rows = name_to_path;
  std::sort(rows.begin(), rows.end());
  std::ostringstream out;
  for (const auto& [name, path] : rows) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(path)));
    out << hex << "  " << name << "\n";
  }
  spill(manifest_path, out.str());
}

}  // namespace wscnn::io
