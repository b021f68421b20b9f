// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include "wscnn/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "wscnn/io.hpp"
#include "wscnn/rng.hpp"

namespace wscnn {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v))
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + value + "'");
  return static_cast<long long>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: key '" + key + "' expects true/false, got '" + value + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

struct Key {
  std::string name;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

std::vector<Key> key_table() {
  std::vector<Key> keys;
  const auto add_double = [&keys](const char* name, auto member) {
    keys.push_back({name,
                    [name, member](PipelineConfig& c, const std::string& v) {
                      member(c) = parse_double(name, v);
                    },
                    [member](const PipelineConfig& c) {
                      return fmt(member(const_cast<PipelineConfig&>(c)));
                    }});
  };
  const auto add_real = [&keys](const char* name, auto member) {
    keys.push_back({name,
                    [name, member](PipelineConfig& c, const std::string& v) {
                      member(c) = static_cast<real>(parse_double(name, v));
                    },
                    [member](const PipelineConfig& c) {
                      return fmt(static_cast<double>(member(const_cast<PipelineConfig&>(c))));
                    }});
  };
  const auto add_int = [&keys](const char* name, auto member) {
    keys.push_back({name,
                    [name, member](PipelineConfig& c, const std::string& v) {
                      member(c) = static_cast<int>(parse_int(name, v));
                    },
                    [member](const PipelineConfig& c) {
                      return std::to_string(member(const_cast<PipelineConfig&>(c)));
                    }});
  };
  const auto add_u64 = [&keys](const char* name, auto member) {
    keys.push_back({name,
                    [name, member](PipelineConfig& c, const std::string& v) {
                      member(c) = static_cast<std::uint64_t>(parse_int(name, v));
                    },
                    [member](const PipelineConfig& c) {
                      return std::to_string(member(const_cast<PipelineConfig&>(c)));
                    }});
  };

  add_u64("seed", [](PipelineConfig& c) -> std::uint64_t& { return c.seed; });
  add_int("threads", [](PipelineConfig& c) -> int& { return c.threads; });

  add_int("phantom.height", [](PipelineConfig& c) -> int& { return c.phan.height; });
  add_int("phantom.width", [](PipelineConfig& c) -> int& { return c.phan.width; });
  add_double("phantom.cx", [](PipelineConfig& c) -> double& { return c.phan.cx; });
  add_double("phantom.cy", [](PipelineConfig& c) -> double& { return c.phan.cy; });
  add_double("phantom.r_inner", [](PipelineConfig& c) -> double& { return c.phan.r_inner; });
  add_double("phantom.r_outer", [](PipelineConfig& c) -> double& { return c.phan.r_outer; });
  add_double("phantom.ha_endo", [](PipelineConfig& c) -> double& { return c.phan.ha_endo_deg; });
  add_double("phantom.ha_epi", [](PipelineConfig& c) -> double& { return c.phan.ha_epi_deg; });
  add_double("phantom.lambda1", [](PipelineConfig& c) -> double& { return c.phan.lambda1; });
  add_double("phantom.lambda2", [](PipelineConfig& c) -> double& { return c.phan.lambda2; });
  add_double("phantom.lambda3", [](PipelineConfig& c) -> double& { return c.phan.lambda3; });
  add_double("phantom.s0_level", [](PipelineConfig& c) -> double& { return c.phan.s0_level; });
  add_double("phantom.texture", [](PipelineConfig& c) -> double& { return c.phan.texture; });
  add_double("phantom.noise_sigma",
             [](PipelineConfig& c) -> double& { return c.phan.noise_sigma; });
  add_double("phantom.b", [](PipelineConfig& c) -> double& { return c.phan.b; });
  add_u64("phantom.seed", [](PipelineConfig& c) -> std::uint64_t& { return c.phan.seed; });

  add_int("corrupt.n_tds", [](PipelineConfig& c) -> int& { return c.corruption.n_tds; });
  add_double("corrupt.amplitude",
             [](PipelineConfig& c) -> double& { return c.corruption.amplitude; });
  add_int("corrupt.grid_spacing",
          [](PipelineConfig& c) -> int& { return c.corruption.grid_spacing; });
  add_int("corrupt.band_count", [](PipelineConfig& c) -> int& { return c.corruption.band_count; });
  add_int("corrupt.band_width", [](PipelineConfig& c) -> int& { return c.corruption.band_width; });
  add_double("corrupt.attenuation",
             [](PipelineConfig& c) -> double& { return c.corruption.attenuation; });
  add_u64("corrupt.seed", [](PipelineConfig& c) -> std::uint64_t& { return c.corruption.seed; });

  add_int("bank.J", [](PipelineConfig& c) -> int& { return c.bank.J; });
  add_int("bank.L", [](PipelineConfig& c) -> int& { return c.bank.L; });
  add_double("bank.sigma0", [](PipelineConfig& c) -> double& { return c.bank.sigma0; });
  add_double("bank.xi0", [](PipelineConfig& c) -> double& { return c.bank.xi0; });
  add_double("bank.slant", [](PipelineConfig& c) -> double& { return c.bank.slant; });
  add_double("bank.phi_sigma0", [](PipelineConfig& c) -> double& { return c.bank.phi_sigma0; });

  add_int("net.base_channels", [](PipelineConfig& c) -> int& { return c.net.base_channels; });
  add_int("net.enblocks", [](PipelineConfig& c) -> int& { return c.net.enblocks; });
  add_int("net.deblocks", [](PipelineConfig& c) -> int& { return c.net.deblocks; });
  add_int("net.resblocks", [](PipelineConfig& c) -> int& { return c.net.resblocks_per_block; });
  add_int("net.kernel_size", [](PipelineConfig& c) -> int& { return c.net.kernel_size; });
  add_int("net.deconv_kernel_size",
          [](PipelineConfig& c) -> int& { return c.net.deconv_kernel_size; });

  add_real("train.lr", [](PipelineConfig& c) -> real& { return c.train.lr; });
  add_real("train.beta1", [](PipelineConfig& c) -> real& { return c.train.beta1; });
  add_real("train.beta2", [](PipelineConfig& c) -> real& { return c.train.beta2; });
  add_int("train.iterations", [](PipelineConfig& c) -> int& { return c.train.iterations; });
  add_int("train.batch_size", [](PipelineConfig& c) -> int& { return c.train.batch_size; });
  add_u64("train.seed", [](PipelineConfig& c) -> std::uint64_t& { return c.train.seed; });
  add_int("train.checkpoint_every",
          [](PipelineConfig& c) -> int& { return c.train.checkpoint_every; });
  keys.push_back({"train.enabled",
                  [](PipelineConfig& c, const std::string& v) {
                    c.train_enabled = parse_bool("train.enabled", v);
                  },
                  [](const PipelineConfig& c) {
                    return std::string(c.train_enabled ? "true" : "false");
                  }});
  keys.push_back({"checkpoint",
                  [](PipelineConfig& c, const std::string& v) { c.checkpoint = v; },
                  [](const PipelineConfig& c) { return c.checkpoint; }});

  add_int("register.window", [](PipelineConfig& c) -> int& { return c.register_window; });
  add_int("register.reference_td", [](PipelineConfig& c) -> int& { return c.reference_td; });
  return keys;
}

}  // namespace

PipelineConfig PipelineConfig::from_string(const std::string& text) {
  PipelineConfig cfg;
  const auto keys = key_table();
  bool saw_master_seed = false;
  bool saw_phantom_seed = false, saw_corrupt_seed = false, saw_train_seed = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value, got '" +
                        line + "'");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    bool found = false;
    for (const auto& k : keys) {
      if (k.name == key) {
        k.set(cfg, value);
        found = true;
        break;
      }
    }
    if (!found)
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (key == "seed") saw_master_seed = true;
    if (key == "phantom.seed") saw_phantom_seed = true;
    if (key == "corrupt.seed") saw_corrupt_seed = true;
    if (key == "train.seed") saw_train_seed = true;
  }

  if (saw_master_seed) {
    std::uint64_t state = cfg.seed;
    const std::uint64_t s1 = splitmix64(state);
    const std::uint64_t s2 = splitmix64(state);
    const std::uint64_t s3 = splitmix64(state);
    if (!saw_phantom_seed) cfg.phan.seed = s1;
    if (!saw_corrupt_seed) cfg.corruption.seed = s2;
    if (!saw_train_seed) cfg.train.seed = s3;
  }
  return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  try {
    return from_string(io::read_text(path));
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

std::string PipelineConfig::to_string() const {
  std::ostringstream out;
  for (const auto& k : key_table()) out << k.name << " = " << k.get(*this) << "\n";
  return out.str();
}

}  // namespace wscnn
