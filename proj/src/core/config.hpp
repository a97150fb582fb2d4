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

#ifndef SIGNMUON_CORE_CONFIG_HPP
#define SIGNMUON_CORE_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "core/harness.hpp"
#include "core/optim.hpp"

namespace signmuon::config {

// Raised for malformed or invalid configuration; the message names the
// offending field (section.key style).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Declarative experiment description, one experiment per file. Flat
// key-value text with [section] headers (TOML-compatible grammar); unknown
// keys are rejected.
struct RunConfig {
  std::string name = "experiment";

  // [task]
  std::string task_kind = "matrix_quadratic";
  int rows = 8;
  int cols = 8;
  std::uint64_t wstar_seed = 1;
  std::uint64_t w0_seed = 2;
  double init_scale = 1.0;

  // [optimizer]
  std::string optimizer_kind = "sign_muon";
  optim::Hyperparams hp;

  // [noise]
  double sigma = 0.0;
  std::string sigma_file;  // per-entry matrix, whitespace-separated rows
  std::int64_t batch_size = 1;
  std::uint64_t noise_seed = 3;
  bool couple_batch_to_steps = false;

  // [distributed]
  std::int64_t workers = 1;
  std::string path = "allreduce_int8";

  // [run]
  std::int64_t steps = 100;
  std::string out_dir = "out";
  std::uint64_t run_seed = 7;
  bool emit_csv = false;
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Full validation of every module precondition; throws ConfigError naming
// the field.
void validate(const RunConfig& cfg);

// The effective config (defaults applied, cosine horizon and batch coupling
// resolved) in a fixed key order; parsing it back reproduces the run.
std::string effective_config_toml(const RunConfig& cfg);

// Resolved experiment inputs (loads sigma_file if set).
harness::ExperimentSpec to_spec(const RunConfig& cfg);

optim::OptimizerKind parse_optimizer_kind(const std::string& kind);

}  // namespace signmuon::config

#endif  // SIGNMUON_CORE_CONFIG_HPP
