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

#include "core/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace signmuon::config {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Parsed key-value view: section.key -> raw value token.
using KvMap = std::map<std::string, std::string>;

KvMap tokenize(const std::string& text) {
  KvMap kv;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) throw ConfigError(full + ": duplicate key");
    kv[full] = value;
  }
  return kv;
}

class Extractor {
 public:
  explicit Extractor(KvMap kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::string raw = it->second;
    kv_.erase(it);
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"')
      return raw.substr(1, raw.size() - 2);
    if (raw.front() == '"' || raw.back() == '"')
      throw ConfigError(key + ": unbalanced quotes");
    return raw;
  }

  double get_double(const std::string& key, double fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string raw = it->second;
    kv_.erase(it);
    try {
      std::size_t pos = 0;
      const double v = std::stod(raw, &pos);
      if (pos != raw.size()) throw ConfigError(key + ": not a number: '" + raw + "'");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(key + ": not a number: '" + raw + "'");
    }
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string raw = it->second;
    kv_.erase(it);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size())
      throw ConfigError(key + ": not an integer: '" + raw + "'");
    return v;
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string raw = it->second;
    kv_.erase(it);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (ec != std::errc() || ptr != raw.data() + raw.size())
      throw ConfigError(key + ": not a nonnegative integer: '" + raw + "'");
    return v;
  }

  bool get_bool(const std::string& key, bool fallback) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string raw = it->second;
    kv_.erase(it);
    if (raw == "true") return true;
    if (raw == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + raw + "'");
  }

  void reject_leftovers() const {
    if (!kv_.empty()) throw ConfigError(kv_.begin()->first + ": unknown key");
  }

 private:
  KvMap kv_;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

optim::OptimizerKind parse_optimizer_kind(const std::string& kind) {
  if (kind == "sign_muon") return optim::OptimizerKind::kSignMuon;
  if (kind == "muon") return optim::OptimizerKind::kMuon;
  if (kind == "signsgd") return optim::OptimizerKind::kSignSgd;
  if (kind == "sgd_momentum") return optim::OptimizerKind::kSgdMomentum;
  throw ConfigError("optimizer.kind: unknown optimizer '" + kind + "'");
}

RunConfig parse_config_text(const std::string& text) {
  Extractor ex(tokenize(text));
  RunConfig cfg;

  cfg.name = ex.get_string("experiment.name", cfg.name);

  cfg.task_kind = ex.get_string("task.kind", cfg.task_kind);
  cfg.rows = static_cast<int>(ex.get_int("task.rows", cfg.rows));
  cfg.cols = static_cast<int>(ex.get_int("task.cols", cfg.cols));
  cfg.wstar_seed = ex.get_uint("task.wstar_seed", cfg.wstar_seed);
  cfg.w0_seed = ex.get_uint("task.w0_seed", cfg.w0_seed);
  cfg.init_scale = ex.get_double("task.init_scale", cfg.init_scale);

  cfg.optimizer_kind = ex.get_string("optimizer.kind", cfg.optimizer_kind);
  cfg.hp.lr = ex.get_double("optimizer.lr", cfg.hp.lr);
  const std::string sched = ex.get_string("optimizer.lr_schedule", "constant");
  if (sched == "constant") {
    cfg.hp.lr_schedule = optim::LrSchedule::kConstant;
  } else if (sched == "cosine") {
    cfg.hp.lr_schedule = optim::LrSchedule::kCosine;
  } else {
    throw ConfigError("optimizer.lr_schedule: expected constant or cosine, got '" + sched + "'");
  }
  cfg.hp.min_lr = ex.get_double("optimizer.min_lr", cfg.hp.min_lr);
  cfg.hp.schedule_horizon = static_cast<int>(ex.get_int("optimizer.schedule_horizon", 0));
  cfg.hp.momentum = ex.get_double("optimizer.momentum", cfg.hp.momentum);
  cfg.hp.weight_decay = ex.get_double("optimizer.weight_decay", cfg.hp.weight_decay);
  cfg.hp.ns_iters = static_cast<int>(ex.get_int("optimizer.ns_iters", cfg.hp.ns_iters));
  cfg.hp.stability_eps = ex.get_double("optimizer.eps", cfg.hp.stability_eps);
  const std::string scale = ex.get_string("optimizer.ns_scale", "spectral");
  if (scale == "spectral") {
    cfg.hp.ns_scale = linalg::NsScale::kSpectral;
  } else if (scale == "fro") {
    cfg.hp.ns_scale = linalg::NsScale::kFro;
  } else {
    throw ConfigError("optimizer.ns_scale: expected spectral or fro, got '" + scale + "'");
  }
  cfg.hp.power_iters = static_cast<int>(ex.get_int("optimizer.power_iters", cfg.hp.power_iters));
  const std::string mode = ex.get_string("optimizer.direction_mode", "raw_sign");
  if (mode == "raw_sign") {
    cfg.hp.direction_mode = optim::DirectionMode::kRawSign;
  } else if (mode == "normalized") {
    cfg.hp.direction_mode = optim::DirectionMode::kNormalized;
  } else {
    throw ConfigError("optimizer.direction_mode: expected raw_sign or normalized, got '" + mode + "'");
  }
  const std::string policy = ex.get_string("optimizer.zero_sign_policy", "zero");
  if (policy == "zero") {
    cfg.hp.zero_sign_policy = linalg::ZeroSignPolicy::kZero;
  } else if (policy == "plus_one") {
    cfg.hp.zero_sign_policy = linalg::ZeroSignPolicy::kPlusOne;
  } else {
    throw ConfigError("optimizer.zero_sign_policy: expected zero or plus_one, got '" + policy + "'");
  }

  cfg.sigma = ex.get_double("noise.sigma", cfg.sigma);
  cfg.sigma_file = ex.get_string("noise.sigma_file", cfg.sigma_file);
  cfg.batch_size = ex.get_int("noise.batch_size", cfg.batch_size);
  cfg.noise_seed = ex.get_uint("noise.seed", cfg.noise_seed);
  cfg.couple_batch_to_steps = ex.get_bool("noise.couple_batch_to_steps", cfg.couple_batch_to_steps);

  cfg.workers = ex.get_int("distributed.workers", cfg.workers);
  cfg.path = ex.get_string("distributed.path", cfg.path);

  cfg.steps = ex.get_int("run.steps", cfg.steps);
  cfg.out_dir = ex.get_string("run.out_dir", cfg.out_dir);
  cfg.run_seed = ex.get_uint("run.seed", cfg.run_seed);
  cfg.emit_csv = ex.get_bool("run.emit_csv", cfg.emit_csv);

  ex.reject_leftovers();

  // Resolve derived fields so the effective config is self-contained.
  if (cfg.hp.lr_schedule == optim::LrSchedule::kCosine && cfg.hp.schedule_horizon == 0)
    cfg.hp.schedule_horizon = static_cast<int>(cfg.steps);
  if (cfg.couple_batch_to_steps) cfg.batch_size = cfg.steps;

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

void validate(const RunConfig& cfg) {
  if (cfg.task_kind != "matrix_quadratic")
    throw ConfigError("task.kind: unknown task '" + cfg.task_kind + "'");
  if (cfg.rows < 1) throw ConfigError("task.rows: must be >= 1");
  if (cfg.cols < 1) throw ConfigError("task.cols: must be >= 1");
  if (!(cfg.init_scale > 0.0)) throw ConfigError("task.init_scale: must be positive");

  const optim::OptimizerKind kind = parse_optimizer_kind(cfg.optimizer_kind);
  try {
    optim::validate(cfg.hp);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (cfg.sigma < 0.0) throw ConfigError("noise.sigma: must be nonnegative");
  if (!cfg.sigma_file.empty() && cfg.sigma != 0.0)
    throw ConfigError("noise.sigma_file: give either a scalar sigma or a file, not both");
  if (cfg.batch_size < 1) throw ConfigError("noise.batch_size: must be >= 1");

  if (cfg.workers < 1) throw ConfigError("distributed.workers: must be >= 1");
  if (cfg.path != "allreduce_int8" && cfg.path != "allgather_1bit")
    throw ConfigError("distributed.path: expected allreduce_int8 or allgather_1bit, got '" +
                      cfg.path + "'");
  if (cfg.workers > 127 && cfg.path == "allreduce_int8")
    throw ConfigError("distributed.workers: int8 sum supports at most 127 workers");
  if (cfg.workers > 1 && kind != optim::OptimizerKind::kSignMuon &&
      kind != optim::OptimizerKind::kSignSgd)
    throw ConfigError("optimizer.kind: distributed runs need a sign-communicating optimizer");

  if (cfg.steps < 1) throw ConfigError("run.steps: must be >= 1");
  if (cfg.out_dir.empty()) throw ConfigError("run.out_dir: must not be empty");
}

std::string effective_config_toml(const RunConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "name = \"" << cfg.name << "\"\n\n";

  out << "[task]\n";
  out << "kind = \"" << cfg.task_kind << "\"\n";
  out << "rows = " << cfg.rows << "\n";
  out << "cols = " << cfg.cols << "\n";
  out << "wstar_seed = " << cfg.wstar_seed << "\n";
  out << "w0_seed = " << cfg.w0_seed << "\n";
  out << "init_scale = " << format_double(cfg.init_scale) << "\n\n";

  out << "[optimizer]\n";
  out << "kind = \"" << cfg.optimizer_kind << "\"\n";
  out << "lr = " << format_double(cfg.hp.lr) << "\n";
  out << "lr_schedule = \""
      << (cfg.hp.lr_schedule == optim::LrSchedule::kConstant ? "constant" : "cosine") << "\"\n";
  out << "min_lr = " << format_double(cfg.hp.min_lr) << "\n";
  out << "schedule_horizon = " << cfg.hp.schedule_horizon << "\n";
  out << "momentum = " << format_double(cfg.hp.momentum) << "\n";
  out << "weight_decay = " << format_double(cfg.hp.weight_decay) << "\n";
  out << "ns_iters = " << cfg.hp.ns_iters << "\n";
  out << "eps = " << format_double(cfg.hp.stability_eps) << "\n";
  out << "ns_scale = \"" << (cfg.hp.ns_scale == linalg::NsScale::kSpectral ? "spectral" : "fro")
      << "\"\n";
  out << "power_iters = " << cfg.hp.power_iters << "\n";
  out << "direction_mode = \""
      << (cfg.hp.direction_mode == optim::DirectionMode::kRawSign ? "raw_sign" : "normalized")
      << "\"\n";
  out << "zero_sign_policy = \""
      << (cfg.hp.zero_sign_policy == linalg::ZeroSignPolicy::kZero ? "zero" : "plus_one")
      << "\"\n\n";

  out << "[noise]\n";
  out << "sigma = " << format_double(cfg.sigma) << "\n";
  if (!cfg.sigma_file.empty()) out << "sigma_file = \"" << cfg.sigma_file << "\"\n";
  out << "batch_size = " << cfg.batch_size << "\n";
  out << "seed = " << cfg.noise_seed << "\n";
  out << "couple_batch_to_steps = " << (cfg.couple_batch_to_steps ? "true" : "false") << "\n\n";

  out << "[distributed]\n";
  out << "workers = " << cfg.workers << "\n";
  out << "path = \"" << cfg.path << "\"\n\n";

  out << "[run]\n";
  out << "steps = " << cfg.steps << "\n";
  out << "out_dir = \"" << cfg.out_dir << "\"\n";
  out << "seed = " << cfg.run_seed << "\n";
  out << "emit_csv = " << (cfg.emit_csv ? "true" : "false") << "\n";
  return out.str();
}

namespace {

DenseMatrix load_sigma_file(const std::string& path, int rows, int cols) {
  std::ifstream f(path);
  if (!f) throw ConfigError("noise.sigma_file: cannot read '" + path + "'");
  DenseMatrix sigma(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double v;
      if (!(f >> v))
        throw ConfigError("noise.sigma_file: expected " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " numbers in '" + path + "'");
      if (v < 0.0) throw ConfigError("noise.sigma_file: entries must be nonnegative");
      sigma(i, j) = v;
    }
  }
  return sigma;
}

}  // namespace

harness::ExperimentSpec to_spec(const RunConfig& cfg) {
  validate(cfg);
  harness::ExperimentSpec spec;
  spec.task = harness::make_quadratic_task(cfg.rows, cfg.cols, cfg.wstar_seed, cfg.init_scale);
  spec.start = harness::sample_start_point(cfg.rows, cfg.cols, cfg.w0_seed, cfg.init_scale);
  if (cfg.sigma_file.empty()) {
    spec.noise = harness::NoiseModel::scalar(cfg.sigma, cfg.rows, cfg.cols, cfg.batch_size,
                                             cfg.noise_seed);
  } else {
    spec.noise.sigma = load_sigma_file(cfg.sigma_file, cfg.rows, cfg.cols);
    spec.noise.batch_size = cfg.batch_size;
    spec.noise.seed = cfg.noise_seed;
  }
  spec.kind = parse_optimizer_kind(cfg.optimizer_kind);
  spec.workers = cfg.workers;
  if (cfg.workers > 1)
    spec.path = cfg.path == "allreduce_int8" ? collective::CommPath::kAllreduceInt8
                                             : collective::CommPath::kAllgather1Bit;
  spec.steps = cfg.steps;
  spec.hp = cfg.hp;
  spec.seed = cfg.run_seed;
  return spec;
}

}  // namespace signmuon::config
