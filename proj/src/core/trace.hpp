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

#ifndef SIGNMUON_CORE_TRACE_HPP
#define SIGNMUON_CORE_TRACE_HPP

#include <string>

#include "core/config.hpp"
#include "core/harness.hpp"

namespace signmuon::trace {

// One JSON object per line: a meta line first, then one line per record
// with keys t, loss, l1_proxy, nuclear, lr, bytes_sent, bytes_recv.
void write_trace_jsonl(const std::string& path, const harness::TrainTrace& trace);

// Flat CSV with the fixed header t,loss,l1_proxy,nuclear,lr,bytes_sent,bytes_recv.
void write_trace_csv(const std::string& path, const harness::TrainTrace& trace);

// Run summary (final loss, stationarity metric, simulated comm totals).
std::string summary_json(const harness::TrainTrace& trace);

// Drives one configured experiment end to end: creates the output directory,
// echoes the effective config, runs, writes trace files and the summary.
// Returns the summary JSON. On a non-finite loss the trace prefix is still
// written before the TrainAbort propagates.
std::string train_and_write(const config::RunConfig& cfg, const std::string& out_dir_override);

}  // namespace signmuon::trace

#endif  // SIGNMUON_CORE_TRACE_HPP
