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

#include "signmuon/signmuon.h"

#include <cstdlib>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "core/collective.hpp"
#include "core/config.hpp"
#include "core/costmodel.hpp"
#include "core/harness.hpp"
#include "core/linalg.hpp"
#include "core/matrix.hpp"
#include "core/signs.hpp"
#include "core/trace.hpp"
#include "core/verify.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Runs `fn`, translating exceptions into status codes and the thread-local
// error message.
template <typename Fn>
sm_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const signmuon::config::ConfigError& e) {
    set_error(e.what());
    return SM_ERROR_CONFIG;
  } catch (const std::invalid_argument& e) {
    set_error(e.what());
    return SM_ERROR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return SM_ERROR_RUNTIME;
  } catch (...) {
    set_error("unknown error");
    return SM_ERROR_RUNTIME;
  }
}

sm_status invalid(const char* msg) {
  set_error(msg);
  return SM_ERROR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct sm_matrix {
  signmuon::DenseMatrix m;
};

struct sm_sign_matrix {
  signmuon::SignMatrix s;
};

extern "C" {

const char* sm_version(void) { return "0.1.0"; }

const char* sm_last_error(void) { return g_last_error.c_str(); }

void sm_string_free(char* s) { std::free(s); }

/* ---------------------------------------------------------------- matrices */

sm_status sm_matrix_create(int64_t rows, int64_t cols, const double* data, sm_matrix** out) {
  if (out == nullptr) return invalid("sm_matrix_create: out is NULL");
  return guarded([&] {
    if (rows < 1 || cols < 1 || rows > 1 << 20 || cols > 1 << 20)
      throw std::invalid_argument("sm_matrix_create: invalid dimensions");
    signmuon::DenseMatrix m(static_cast<int>(rows), static_cast<int>(cols));
    if (data != nullptr) {
      std::memcpy(m.data().data(), data, static_cast<std::size_t>(rows * cols) * sizeof(double));
      signmuon::require_finite(m, "sm_matrix_create");
    }
    *out = new sm_matrix{std::move(m)};
    return SM_OK;
  });
}

void sm_matrix_destroy(sm_matrix* m) { delete m; }

int64_t sm_matrix_rows(const sm_matrix* m) { return m == nullptr ? 0 : m->m.rows(); }
int64_t sm_matrix_cols(const sm_matrix* m) { return m == nullptr ? 0 : m->m.cols(); }

sm_status sm_matrix_copy_data(const sm_matrix* m, double* out, int64_t out_len) {
  if (m == nullptr || out == nullptr) return invalid("sm_matrix_copy_data: NULL argument");
  if (out_len < m->m.size()) return invalid("sm_matrix_copy_data: buffer too small");
  std::memcpy(out, m->m.data().data(), static_cast<std::size_t>(m->m.size()) * sizeof(double));
  return SM_OK;
}

sm_status sm_norms(const sm_matrix* m, sm_norm_report* out) {
  if (m == nullptr || out == nullptr) return invalid("sm_norms: NULL argument");
  return guarded([&] {
    const signmuon::linalg::NormReport r = signmuon::linalg::norms(m->m);
    out->frobenius = r.frobenius;
    out->entrywise_l1 = r.entrywise_l1;
    out->spectral = r.spectral;
    out->nuclear = r.nuclear;
    return SM_OK;
  });
}

sm_status sm_power_iter_spectral(const sm_matrix* m, int iters, double eps, uint64_t seed,
                                 double* out) {
  if (m == nullptr || out == nullptr) return invalid("sm_power_iter_spectral: NULL argument");
  return guarded([&] {
    *out = signmuon::linalg::power_iter_spectral(m->m, iters, eps, seed);
    return SM_OK;
  });
}

sm_status sm_polar_newton_schulz(const sm_matrix* m, int iters, double eps, sm_ns_scale scale,
                                 int power_iters, uint64_t seed, sm_matrix** out) {
  if (m == nullptr || out == nullptr) return invalid("sm_polar_newton_schulz: NULL argument");
  return guarded([&] {
    const auto s = scale == SM_NS_SCALE_FRO ? signmuon::linalg::NsScale::kFro
                                            : signmuon::linalg::NsScale::kSpectral;
    *out = new sm_matrix{signmuon::linalg::polar_newton_schulz(m->m, iters, eps, s, power_iters, seed)};
    return SM_OK;
  });
}

sm_status sm_polar_svd(const sm_matrix* m, sm_matrix** out) {
  if (m == nullptr || out == nullptr) return invalid("sm_polar_svd: NULL argument");
  return guarded([&] {
    *out = new sm_matrix{signmuon::linalg::polar_svd(m->m)};
    return SM_OK;
  });
}

/* ------------------------------------------------------------ sign buffers */

sm_status sm_sign_matrix_create(int64_t rows, int64_t cols, const int8_t* entries,
                                sm_sign_matrix** out) {
  if (out == nullptr || entries == nullptr) return invalid("sm_sign_matrix_create: NULL argument");
  return guarded([&] {
    if (rows < 1 || cols < 1 || rows > 1 << 20 || cols > 1 << 20)
      throw std::invalid_argument("sm_sign_matrix_create: invalid dimensions");
    std::vector<std::int8_t> data(entries, entries + rows * cols);
    *out = new sm_sign_matrix{
        signmuon::SignMatrix(static_cast<int>(rows), static_cast<int>(cols), std::move(data))};
    return SM_OK;
  });
}

void sm_sign_matrix_destroy(sm_sign_matrix* s) { delete s; }

int64_t sm_sign_matrix_rows(const sm_sign_matrix* s) { return s == nullptr ? 0 : s->s.rows(); }
int64_t sm_sign_matrix_cols(const sm_sign_matrix* s) { return s == nullptr ? 0 : s->s.cols(); }

sm_status sm_sign_matrix_copy_entries(const sm_sign_matrix* s, int8_t* out, int64_t out_len) {
  if (s == nullptr || out == nullptr) return invalid("sm_sign_matrix_copy_entries: NULL argument");
  if (out_len < s->s.size()) return invalid("sm_sign_matrix_copy_entries: buffer too small");
  std::memcpy(out, s->s.entries().data(), static_cast<std::size_t>(s->s.size()));
  return SM_OK;
}

sm_status sm_sign_entrywise(const sm_matrix* m, sm_zero_sign_policy policy, sm_sign_matrix** out) {
  if (m == nullptr || out == nullptr) return invalid("sm_sign_entrywise: NULL argument");
  return guarded([&] {
    const auto p = policy == SM_ZERO_SIGN_PLUS_ONE ? signmuon::linalg::ZeroSignPolicy::kPlusOne
                                                   : signmuon::linalg::ZeroSignPolicy::kZero;
    *out = new sm_sign_matrix{signmuon::linalg::sign_entrywise(m->m, p)};
    return SM_OK;
  });
}

sm_status sm_majority_vote(const sm_sign_matrix* const* signs, int64_t count,
                           sm_sign_matrix** out) {
  if (signs == nullptr || out == nullptr) return invalid("sm_majority_vote: NULL argument");
  return guarded([&] {
    std::vector<signmuon::SignMatrix> list;
    list.reserve(static_cast<std::size_t>(count));
    for (int64_t i = 0; i < count; ++i) {
      if (signs[i] == nullptr) throw std::invalid_argument("sm_majority_vote: NULL sign matrix");
      list.push_back(signs[i]->s);
    }
    *out = new sm_sign_matrix{signmuon::collective::majority_vote(list)};
    return SM_OK;
  });
}

sm_status sm_signs_pack(const sm_sign_matrix* s, uint8_t** out_bytes, size_t* out_len) {
  if (s == nullptr || out_bytes == nullptr || out_len == nullptr)
    return invalid("sm_signs_pack: NULL argument");
  return guarded([&] {
    const auto wire = signmuon::packed_to_wire(signmuon::pack_bits(s->s));
    auto* buf = static_cast<uint8_t*>(std::malloc(wire.size()));
    if (buf == nullptr) throw std::runtime_error("out of memory");
    std::memcpy(buf, wire.data(), wire.size());
    *out_bytes = buf;
    *out_len = wire.size();
    return SM_OK;
  });
}

sm_status sm_signs_unpack(const uint8_t* bytes, size_t len, sm_sign_matrix** out) {
  if (bytes == nullptr || out == nullptr) return invalid("sm_signs_unpack: NULL argument");
  return guarded([&] {
    const signmuon::PackedBits b = signmuon::packed_from_wire(std::span(bytes, len));
    *out = new sm_sign_matrix{signmuon::unpack_bits(b)};
    return SM_OK;
  });
}

sm_status sm_signs_write_file(const sm_sign_matrix* s, const char* path) {
  if (s == nullptr || path == nullptr) return invalid("sm_signs_write_file: NULL argument");
  return guarded([&] {
    signmuon::write_packed_file(path, signmuon::pack_bits(s->s));
    return SM_OK;
  });
}

sm_status sm_signs_read_file(const char* path, sm_sign_matrix** out) {
  if (path == nullptr || out == nullptr) return invalid("sm_signs_read_file: NULL argument");
  return guarded([&] {
    *out = new sm_sign_matrix{signmuon::unpack_bits(signmuon::read_packed_file(path))};
    return SM_OK;
  });
}

/* -------------------------------------------------------------- cost model */

namespace {

signmuon::costmodel::Topology to_topology(sm_topology t) {
  return t == SM_TOPOLOGY_TREE ? signmuon::costmodel::Topology::kTree
                               : signmuon::costmodel::Topology::kRing;
}

signmuon::costmodel::Collective to_collective(sm_collective c) {
  switch (c) {
    case SM_COLLECTIVE_ALLGATHER: return signmuon::costmodel::Collective::kAllgather;
    case SM_COLLECTIVE_PS_STAR: return signmuon::costmodel::Collective::kPsStar;
    case SM_COLLECTIVE_PS_TREE: return signmuon::costmodel::Collective::kPsTree;
    case SM_COLLECTIVE_ALLREDUCE:
    default: return signmuon::costmodel::Collective::kAllreduce;
  }
}

}  // namespace

sm_status sm_cost_payload_bytes(int64_t entries, int bits_per_entry, uint64_t* out) {
  if (out == nullptr) return invalid("sm_cost_payload_bytes: out is NULL");
  return guarded([&] {
    *out = signmuon::costmodel::payload_bytes(entries, bits_per_entry);
    return SM_OK;
  });
}

sm_status sm_cost_rounds(sm_collective collective, sm_topology topology, int64_t workers,
                         int64_t* out) {
  if (out == nullptr) return invalid("sm_cost_rounds: out is NULL");
  return guarded([&] {
    *out = signmuon::costmodel::rounds(to_collective(collective), to_topology(topology), workers);
    return SM_OK;
  });
}

sm_status sm_cost_iter_time(const sm_cost_scenario* scenario, sm_cost_breakdown* out) {
  if (scenario == nullptr || out == nullptr) return invalid("sm_cost_iter_time: NULL argument");
  return guarded([&] {
    signmuon::costmodel::AlphaBetaScenario s;
    s.alpha = scenario->alpha;
    s.beta = scenario->beta;
    s.workers = scenario->workers;
    s.entries = scenario->entries;
    s.bits_per_entry = scenario->bits_per_entry;
    s.topology = to_topology(scenario->topology);
    s.collective = to_collective(scenario->collective);
    const signmuon::costmodel::CostBreakdown b = signmuon::costmodel::iter_time(s);
    out->latency_seconds = b.latency_seconds;
    out->bandwidth_seconds = b.bandwidth_seconds;
    out->total_seconds = b.total_seconds;
    out->payload_bytes = b.payload_bytes;
    out->rounds = b.rounds;
    out->per_worker_send_bytes = b.per_worker_send_bytes;
    out->per_worker_recv_bytes = b.per_worker_recv_bytes;
    out->server_bytes = b.server_bytes;
    return SM_OK;
  });
}

sm_status sm_cost_compression_factor(int bits_per_entry, double* out) {
  if (out == nullptr) return invalid("sm_cost_compression_factor: out is NULL");
  return guarded([&] {
    *out = signmuon::costmodel::compression_factor(bits_per_entry);
    return SM_OK;
  });
}

sm_status sm_cost_ag_over_ar_ratio(int64_t workers, double* out) {
  if (out == nullptr) return invalid("sm_cost_ag_over_ar_ratio: out is NULL");
  return guarded([&] {
    *out = signmuon::costmodel::ag_over_ar_bandwidth_ratio(workers);
    return SM_OK;
  });
}

sm_status sm_cost_ag_over_ar_ratio_ceil(int64_t workers, int64_t entries, double* out) {
  if (out == nullptr) return invalid("sm_cost_ag_over_ar_ratio_ceil: out is NULL");
  return guarded([&] {
    *out = signmuon::costmodel::ag_over_ar_bandwidth_ratio_ceil(workers, entries);
    return SM_OK;
  });
}

/* ------------------------------------------------------- train and verify */

sm_status sm_train_run(const char* config_path, const char* out_dir_override,
                       char** summary_json) {
  if (config_path == nullptr) return invalid("sm_train_run: config_path is NULL");
  return guarded([&] {
    const signmuon::config::RunConfig cfg = signmuon::config::load_config(config_path);
    signmuon::config::validate(cfg);
    const std::string summary = signmuon::trace::train_and_write(
        cfg, out_dir_override == nullptr ? std::string() : std::string(out_dir_override));
    if (summary_json != nullptr) {
      *summary_json = dup_string(summary);
      if (*summary_json == nullptr) throw std::runtime_error("out of memory");
    }
    return SM_OK;
  });
}

sm_status sm_verify_run(const char* suite, uint64_t seed, int jobs, sm_report_line_cb line_cb,
                        void* user, int* all_passed) {
  if (suite == nullptr) return invalid("sm_verify_run: suite is NULL");
  return guarded([&] {
    const auto results = signmuon::verify::run_suite(suite, seed, jobs);
    for (const auto& check : results) {
      if (line_cb != nullptr) line_cb(signmuon::verify::format_line(check).c_str(), user);
    }
    if (all_passed != nullptr) *all_passed = signmuon::verify::all_passed(results) ? 1 : 0;
    return SM_OK;
  });
}

}  // extern "C"
