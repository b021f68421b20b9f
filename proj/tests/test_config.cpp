// Copyright (c) 2026 the wscnn authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "wscnn/config.hpp"

using wscnn::PipelineConfig;

TEST_CASE("defaults mirror the module specs") {
  const PipelineConfig cfg = PipelineConfig::from_string("");
  CHECK(cfg.phan.height == 96);
  CHECK(cfg.phan.width == 160);
  CHECK(cfg.corruption.n_tds == 10);
  CHECK(cfg.bank.J == 2);
  CHECK(cfg.bank.L == 10);
  CHECK(cfg.net.base_channels == 64);
  CHECK(cfg.net.enblocks == 3);
  CHECK(cfg.net.deblocks == 2);
  CHECK(cfg.train.lr == doctest::Approx(0.0001));
  CHECK(cfg.train.beta1 == doctest::Approx(0.9));
  CHECK(cfg.train.beta2 == doctest::Approx(0.999));
  CHECK(cfg.register_window == 8);
  CHECK(cfg.train_enabled);
}

TEST_CASE("values parse with comments and whitespace") {
  const PipelineConfig cfg = PipelineConfig::from_string(
      "# full run\n"
      "  phantom.height = 48 # small\n"
      "corrupt.n_tds=4\n"
      "train.enabled = false\n"
      "checkpoint = /tmp/model.wsckpt\n"
      "\n");
  CHECK(cfg.phan.height == 48);
  CHECK(cfg.corruption.n_tds == 4);
  CHECK_FALSE(cfg.train_enabled);
  CHECK(cfg.checkpoint == "/tmp/model.wsckpt");
}

TEST_CASE("unknown keys and malformed values are rejected") {
  CHECK_THROWS_AS(PipelineConfig::from_string("phantom.radius = 4"), wscnn::ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_string("no equals sign"), wscnn::ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_string("phantom.height = tall"), wscnn::ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_string("corrupt.n_tds = 2.5"), wscnn::ConfigError);
  CHECK_THROWS_AS(PipelineConfig::from_string("train.enabled = maybe"), wscnn::ConfigError);
}

TEST_CASE("the master seed derives unset sub-seeds deterministically") {
  const PipelineConfig a = PipelineConfig::from_string("seed = 42");
  const PipelineConfig b = PipelineConfig::from_string("seed = 42");
  const PipelineConfig c = PipelineConfig::from_string("seed = 43");
  CHECK(a.phan.seed == b.phan.seed);
  CHECK(a.corruption.seed == b.corruption.seed);
  CHECK(a.train.seed == b.train.seed);
  CHECK(a.phan.seed != c.phan.seed);

  // an explicit sub-seed wins over the derivation
  const PipelineConfig d = PipelineConfig::from_string("seed = 42\nphantom.seed = 5");
  CHECK(d.phan.seed == 5);
  CHECK(d.corruption.seed == a.corruption.seed);
}

TEST_CASE("resolved config round-trips through the parser") {
  PipelineConfig cfg = PipelineConfig::from_string("phantom.height = 50\ntrain.lr = 0.002");
  const std::string text = cfg.to_string();
  const PipelineConfig back = PipelineConfig::from_string(text);
  CHECK(back.phan.height == 50);
  CHECK(back.train.lr == doctest::Approx(0.002));
  CHECK(back.to_string() == text);
}
