/* Copyright 2026 The signmuon Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * =============================================================================
 *
 * C API for the signmuon toolkit: 1-bit matrix-aware sign descent with
 * majority-vote aggregation, an alpha-beta communication cost model, and a
 * numerical verification harness. All functions return sm_status; on failure
 * sm_last_error() describes the problem for the calling thread. Handles are
 * opaque and must be released with their destroy function.
 */

#ifndef SIGNMUON_SIGNMUON_H
#define SIGNMUON_SIGNMUON_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sm_status {
  SM_OK = 0,
  SM_ERROR_INVALID_ARGUMENT = 1,
  SM_ERROR_RUNTIME = 2,
  SM_ERROR_IO = 3,
  SM_ERROR_CONFIG = 4
} sm_status;

const char* sm_version(void);

/* Message for the last failure on this thread; empty string if none. */
const char* sm_last_error(void);

/* Frees strings returned through char** out-parameters. */
void sm_string_free(char* s);

/* ---------------------------------------------------------------- matrices */

typedef struct sm_matrix sm_matrix;

/* data is row-major rows*cols doubles; NULL means zero-initialized. */
sm_status sm_matrix_create(int64_t rows, int64_t cols, const double* data, sm_matrix** out);
void sm_matrix_destroy(sm_matrix* m);
int64_t sm_matrix_rows(const sm_matrix* m);
int64_t sm_matrix_cols(const sm_matrix* m);
/* Copies rows*cols doubles into out. */
sm_status sm_matrix_copy_data(const sm_matrix* m, double* out, int64_t out_len);

typedef struct sm_norm_report {
  double frobenius;
  double entrywise_l1;
  double spectral;
  double nuclear;
} sm_norm_report;

sm_status sm_norms(const sm_matrix* m, sm_norm_report* out);

sm_status sm_power_iter_spectral(const sm_matrix* m, int iters, double eps, uint64_t seed,
                                 double* out);

typedef enum sm_ns_scale { SM_NS_SCALE_SPECTRAL = 0, SM_NS_SCALE_FRO = 1 } sm_ns_scale;

sm_status sm_polar_newton_schulz(const sm_matrix* m, int iters, double eps, sm_ns_scale scale,
                                 int power_iters, uint64_t seed, sm_matrix** out);
sm_status sm_polar_svd(const sm_matrix* m, sm_matrix** out);

/* ------------------------------------------------------------ sign buffers */

typedef struct sm_sign_matrix sm_sign_matrix;

typedef enum sm_zero_sign_policy {
  SM_ZERO_SIGN_ZERO = 0,
  SM_ZERO_SIGN_PLUS_ONE = 1
} sm_zero_sign_policy;

/* entries are rows*cols int8 values in {-1, 0, +1}. */
sm_status sm_sign_matrix_create(int64_t rows, int64_t cols, const int8_t* entries,
                                sm_sign_matrix** out);
void sm_sign_matrix_destroy(sm_sign_matrix* s);
int64_t sm_sign_matrix_rows(const sm_sign_matrix* s);
int64_t sm_sign_matrix_cols(const sm_sign_matrix* s);
sm_status sm_sign_matrix_copy_entries(const sm_sign_matrix* s, int8_t* out, int64_t out_len);

sm_status sm_sign_entrywise(const sm_matrix* m, sm_zero_sign_policy policy, sm_sign_matrix** out);

/* Entrywise sign of the sum over workers; ties resolve to +1. */
sm_status sm_majority_vote(const sm_sign_matrix* const* signs, int64_t count,
                           sm_sign_matrix** out);

/* Canonical packed wire image: 8-byte little-endian logical length, then
 * ceil(d/8) payload bytes, LSB-first, zero padding. The buffer is allocated
 * with malloc; release it with free. Entries must be strictly +-1. */
sm_status sm_signs_pack(const sm_sign_matrix* s, uint8_t** out_bytes, size_t* out_len);
/* Unpacks a canonical wire image into a flat 1 x d sign matrix. */
sm_status sm_signs_unpack(const uint8_t* bytes, size_t len, sm_sign_matrix** out);
sm_status sm_signs_write_file(const sm_sign_matrix* s, const char* path);
sm_status sm_signs_read_file(const char* path, sm_sign_matrix** out);

/* -------------------------------------------------------------- cost model */

typedef enum sm_topology { SM_TOPOLOGY_RING = 0, SM_TOPOLOGY_TREE = 1 } sm_topology;

typedef enum sm_collective {
  SM_COLLECTIVE_ALLREDUCE = 0,
  SM_COLLECTIVE_ALLGATHER = 1,
  SM_COLLECTIVE_PS_STAR = 2,
  SM_COLLECTIVE_PS_TREE = 3
} sm_collective;

typedef struct sm_cost_scenario {
  double alpha;          /* seconds per message */
  double beta;           /* seconds per byte */
  int64_t workers;       /* M >= 1 */
  int64_t entries;       /* d >= 1 */
  int bits_per_entry;    /* 1, 8 or 32 */
  sm_topology topology;
  sm_collective collective;
} sm_cost_scenario;

typedef struct sm_cost_breakdown {
  double latency_seconds;
  double bandwidth_seconds;
  double total_seconds;
  double payload_bytes;
  int64_t rounds;
  double per_worker_send_bytes;
  double per_worker_recv_bytes;
  double server_bytes;
} sm_cost_breakdown;

sm_status sm_cost_payload_bytes(int64_t entries, int bits_per_entry, uint64_t* out);
sm_status sm_cost_rounds(sm_collective collective, sm_topology topology, int64_t workers,
                         int64_t* out);
sm_status sm_cost_iter_time(const sm_cost_scenario* scenario, sm_cost_breakdown* out);
sm_status sm_cost_compression_factor(int bits_per_entry, double* out);
/* Closed form (M/16, no ceiling). */
sm_status sm_cost_ag_over_ar_ratio(int64_t workers, double* out);
/* Ceiling variant with realistic byte counts. */
sm_status sm_cost_ag_over_ar_ratio_ceil(int64_t workers, int64_t entries, double* out);

/* ------------------------------------------------------- train and verify */

/* Runs one configured experiment: reads the config file, writes the
 * effective config echo, trace files and summary into the output directory
 * (out_dir_override, when non-NULL, replaces run.out_dir). On success
 * *summary_json receives the run summary (free with sm_string_free).
 * Config problems return SM_ERROR_CONFIG; runtime aborts SM_ERROR_RUNTIME. */
sm_status sm_train_run(const char* config_path, const char* out_dir_override,
                       char** summary_json);

typedef void (*sm_report_line_cb)(const char* line, void* user);

/* Runs a verification suite ("linalg", "collective", "bounds" or "all"),
 * streaming one machine-readable pass/fail line per check. *all_passed is
 * set to 1 iff every check passed. jobs > 1 shards suites across threads. */
sm_status sm_verify_run(const char* suite, uint64_t seed, int jobs, sm_report_line_cb line_cb,
                        void* user, int* all_passed);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SIGNMUON_SIGNMUON_H */
