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

#include "core/trace.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace signmuon::trace {

namespace {

using nlohmann::json;

json meta_json(const harness::TrainTrace& trace) {
  const optim::Hyperparams& hp = trace.meta.hp;
  return json{
      {"optimizer", trace.meta.optimizer},
      {"workers", trace.meta.workers},
      {"path", trace.meta.path},
      {"steps", trace.meta.steps},
      {"seed", trace.meta.seed},
      {"sigma_l1", trace.meta.sigma_l1},
      {"batch_size", trace.meta.batch_size},
      {"hyperparams",
       {{"lr", hp.lr},
        {"lr_schedule", hp.lr_schedule == optim::LrSchedule::kConstant ? "constant" : "cosine"},
        {"min_lr", hp.min_lr},
        {"schedule_horizon", hp.schedule_horizon},
        {"momentum", hp.momentum},
        {"weight_decay", hp.weight_decay},
        {"ns_iters", hp.ns_iters},
        {"eps", hp.stability_eps},
        {"ns_scale", hp.ns_scale == linalg::NsScale::kSpectral ? "spectral" : "fro"},
        {"power_iters", hp.power_iters},
        {"direction_mode",
         hp.direction_mode == optim::DirectionMode::kRawSign ? "raw_sign" : "normalized"},
        {"zero_sign_policy",
         hp.zero_sign_policy == linalg::ZeroSignPolicy::kZero ? "zero" : "plus_one"}}}};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

}  // namespace

void write_trace_jsonl(const std::string& path, const harness::TrainTrace& trace) {
  std::ofstream f = open_out(path);
  f << json{{"meta", meta_json(trace)}}.dump() << "\n";
  for (const harness::TraceRecord& r : trace.records) {
    f << json{{"t", r.t},
              {"loss", r.loss},
              {"l1_proxy", r.l1_proxy},
              {"nuclear", r.nuclear},
              {"lr", r.lr},
              {"bytes_sent", r.bytes_sent},
              {"bytes_recv", r.bytes_recv}}
             .dump()
      << "\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_trace_csv(const std::string& path, const harness::TrainTrace& trace) {
  std::ofstream f = open_out(path);
  f << "t,loss,l1_proxy,nuclear,lr,bytes_sent,bytes_recv\n";
  for (const harness::TraceRecord& r : trace.records) {
    // Reuse the JSON double formatter so CSV and JSONL agree byte for byte.
    f << r.t << ',' << json(r.loss).dump() << ',' << json(r.l1_proxy).dump() << ','
      << json(r.nuclear).dump() << ',' << json(r.lr).dump() << ',' << json(r.bytes_sent).dump()
      << ',' << json(r.bytes_recv).dump() << "\n";
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string summary_json(const harness::TrainTrace& trace) {
  double total_sent = 0.0;
  double total_recv = 0.0;
  for (const harness::TraceRecord& r : trace.records) {
    total_sent += r.bytes_sent;
    total_recv += r.bytes_recv;
  }
  json j{{"meta", meta_json(trace)},
         {"records", trace.records.size()},
         {"final_loss", trace.final_loss},
         {"stationarity_gt", harness::stationarity_metric(trace)},
         {"total_bytes_sent_per_worker", total_sent},
         {"total_bytes_recv_per_worker", total_recv},
         {"ledger",
          {{"collective", trace.ledger.collective},
           {"payload_bytes", trace.ledger.payload_bytes},
           {"total_send_bytes", trace.ledger.total_send_bytes},
           {"total_recv_bytes", trace.ledger.total_recv_bytes},
           {"operations", trace.ledger.operations}}}};
  return j.dump(2);
}

std::string train_and_write(const config::RunConfig& cfg, const std::string& out_dir_override) {
  config::RunConfig effective = cfg;
  if (!out_dir_override.empty()) effective.out_dir = out_dir_override;
  const harness::ExperimentSpec spec = config::to_spec(effective);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(effective.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + effective.out_dir);

  {
    std::ofstream f = open_out(effective.out_dir + "/config.effective.toml");
    f << config::effective_config_toml(effective);
  }

  harness::TrainTrace trace;
  try {
    trace = harness::run_experiment(spec);
  } catch (const harness::TrainAbort& abort) {
    write_trace_jsonl(effective.out_dir + "/trace.jsonl", abort.partial);
    throw;
  }

  write_trace_jsonl(effective.out_dir + "/trace.jsonl", trace);
  if (effective.emit_csv) write_trace_csv(effective.out_dir + "/trace.csv", trace);
  const std::string summary = summary_json(trace);
  {
    std::ofstream f = open_out(effective.out_dir + "/summary.json");
    f << summary << "\n";
  }
  return summary;
}

}  // namespace signmuon::trace
