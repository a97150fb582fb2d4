// Copyright 2026 The signmuon Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "core/config.hpp"
#include "core/trace.hpp"

using namespace signmuon;
using config::ConfigError;
using config::RunConfig;

namespace {

const char* kMinimalConfig = R"(
# minimal experiment
[task]
rows = 8
cols = 8

[optimizer]
kind = "sign_muon"
lr = 0.1

[run]
steps = 100
)";

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

std::string temp_dir(const std::string& leaf) {
  const auto dir = std::filesystem::temp_directory_path() / leaf;
  std::filesystem::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("parse: defaults and overrides") {
  const RunConfig cfg = config::parse_config_text(kMinimalConfig);
  CHECK(cfg.rows == 8);
  CHECK(cfg.steps == 100);
  CHECK(cfg.optimizer_kind == "sign_muon");
  CHECK(cfg.workers == 1);
  CHECK(cfg.hp.lr == 0.1);
  CHECK(cfg.emit_csv == false);
  config::validate(cfg);
}

TEST_CASE("parse: unknown keys, malformed lines, duplicates") {
  CHECK_THROWS_AS(config::parse_config_text("[task]\nrows = 8\nbogus_key = 1\n"), ConfigError);
  try {
    config::parse_config_text("[task]\nbogus_key = 1\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("task.bogus_key") != std::string::npos);
  }
  CHECK_THROWS_AS(config::parse_config_text("[task\nrows = 8\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("[task]\nrows 8\n"), ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("[task]\nrows = 8\nrows = 9\n"), ConfigError);
}

TEST_CASE("validate: offending field is named") {
  RunConfig cfg = config::parse_config_text(kMinimalConfig);
  cfg.hp.momentum = 1.2;
  try {
    config::validate(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("optimizer.momentum") != std::string::npos);
  }

  cfg = config::parse_config_text(kMinimalConfig);
  cfg.path = "carrier_pigeon";
  CHECK_THROWS_AS(config::validate(cfg), ConfigError);

  cfg = config::parse_config_text(kMinimalConfig);
  cfg.workers = 4;
  cfg.optimizer_kind = "muon";
  CHECK_THROWS_AS(config::validate(cfg), ConfigError);

  cfg = config::parse_config_text(kMinimalConfig);
  cfg.workers = 128;
  CHECK_THROWS_AS(config::validate(cfg), ConfigError);

  cfg = config::parse_config_text(kMinimalConfig);
  cfg.task_kind = "rosenbrock";
  CHECK_THROWS_AS(config::validate(cfg), ConfigError);
}

TEST_CASE("cosine horizon and batch coupling resolve at parse time") {
  const RunConfig cfg = config::parse_config_text(R"(
[optimizer]
lr_schedule = "cosine"
[noise]
couple_batch_to_steps = true
[run]
steps = 64
)");
  CHECK(cfg.hp.schedule_horizon == 64);
  CHECK(cfg.batch_size == 64);
}

TEST_CASE("effective config round-trips through the parser") {
  RunConfig cfg = config::parse_config_text(kMinimalConfig);
  cfg.hp.momentum = 0.9;
  cfg.sigma = 0.75;
  cfg.workers = 4;
  cfg.path = "allgather_1bit";
  const std::string echoed = config::effective_config_toml(cfg);
  const RunConfig back = config::parse_config_text(echoed);
  CHECK(back.hp.momentum == cfg.hp.momentum);
  CHECK(back.sigma == cfg.sigma);
  CHECK(back.workers == cfg.workers);
  CHECK(back.path == cfg.path);
  CHECK(config::effective_config_toml(back) == echoed);
}

TEST_CASE("train_and_write: outputs exist and reruns are byte-identical") {
  RunConfig cfg = config::parse_config_text(kMinimalConfig);
  cfg.steps = 40;
  cfg.sigma = 0.5;
  cfg.workers = 3;
  cfg.emit_csv = true;

  const std::string out1 = temp_dir("sm_cfg_run1");
  const std::string out2 = temp_dir("sm_cfg_run2");
  (void)trace::train_and_write(cfg, out1);
  (void)trace::train_and_write(cfg, out2);

  CHECK(slurp(out1 + "/trace.jsonl") == slurp(out2 + "/trace.jsonl"));
  CHECK(slurp(out1 + "/trace.csv") == slurp(out2 + "/trace.csv"));
  CHECK(slurp(out1 + "/summary.json") == slurp(out2 + "/summary.json"));

  // Rerunning from the echoed config reproduces the trace exactly.
  const RunConfig echoed = config::load_config(out1 + "/config.effective.toml");
  const std::string out3 = temp_dir("sm_cfg_run3");
  (void)trace::train_and_write(echoed, out3);
  CHECK(slurp(out1 + "/trace.jsonl") == slurp(out3 + "/trace.jsonl"));

  const std::string csv = slurp(out1 + "/trace.csv");
  CHECK(csv.rfind("t,loss,l1_proxy,nuclear,lr,bytes_sent,bytes_recv\n", 0) == 0);

  std::filesystem::remove_all(out1);
  std::filesystem::remove_all(out2);
  std::filesystem::remove_all(out3);
}

TEST_CASE("per-entry sigma file") {
  const std::string sigma_path =
      (std::filesystem::temp_directory_path() / "sm_sigma.txt").string();
  {
    std::ofstream f(sigma_path);
    f << "0.5 1.0\n1.5 2.0\n";
  }
  RunConfig cfg = config::parse_config_text(kMinimalConfig);
  cfg.rows = 2;
  cfg.cols = 2;
  cfg.sigma = 0.0;
  cfg.sigma_file = sigma_path;
  const harness::ExperimentSpec spec = config::to_spec(cfg);
  CHECK(spec.noise.sigma(0, 0) == 0.5);
  CHECK(spec.noise.sigma(1, 1) == 2.0);
  std::filesystem::remove(sigma_path);

  cfg.sigma_file = "/nonexistent/sigma.txt";
  CHECK_THROWS_AS(config::to_spec(cfg), ConfigError);
}
