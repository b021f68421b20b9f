// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "wscnn/filter_bank.hpp"
#include "wscnn/invnet.hpp"
#include "wscnn/phantom.hpp"

namespace wscnn {

// Whole-pipeline configuration, parsed from key=value text. Unknown keys are
// rejected; every run writes a resolved copy of all keys next to its outputs.
struct PipelineConfig {
  phantom::PhantomSpec phan;
  phantom::CorruptionSpec corruption;
  BankParams bank;
  invnet::NetworkConfig net;
  invnet::TrainConfig train;

  int register_window = 8;
  int reference_td = 0;  // 1-based TD override; 0 selects the highest-energy TD
  bool train_enabled = true;
  std::string checkpoint;  // required when training is disabled
  int threads = 0;         // 0 = hardware concurrency
  std::uint64_t seed = 2026;  // master seed; unset sub-seeds derive from it

  static PipelineConfig from_string(const std::string& text);
  static PipelineConfig from_file(const std::string& path);

  // all keys in a fixed order with the resolved values
  std::string to_string() const;
};

}  // namespace wscnn
