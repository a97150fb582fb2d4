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

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "signmuon/signmuon.h"

namespace {

struct MatrixHandle {
  sm_matrix* m = nullptr;
  ~MatrixHandle() { sm_matrix_destroy(m); }
};

struct SignHandle {
  sm_sign_matrix* s = nullptr;
  ~SignHandle() { sm_sign_matrix_destroy(s); }
};

}  // namespace

TEST_CASE("capi: version and error text") {
  CHECK(std::string(sm_version()) == "0.1.0");
  CHECK(sm_last_error() != nullptr);
}

TEST_CASE("capi: matrix lifecycle and norms") {
  const double data[] = {3.0, 4.0};
  MatrixHandle h;
  REQUIRE(sm_matrix_create(1, 2, data, &h.m) == SM_OK);
  CHECK(sm_matrix_rows(h.m) == 1);
  CHECK(sm_matrix_cols(h.m) == 2);

  sm_norm_report norms{};
  REQUIRE(sm_norms(h.m, &norms) == SM_OK);
  CHECK(norms.frobenius == doctest::Approx(5.0));
  CHECK(norms.entrywise_l1 == doctest::Approx(7.0));
  CHECK(norms.spectral == doctest::Approx(5.0));
  CHECK(norms.nuclear == doctest::Approx(5.0));

  double out[2] = {0, 0};
  REQUIRE(sm_matrix_copy_data(h.m, out, 2) == SM_OK);
  CHECK(out[0] == 3.0);
  CHECK(out[1] == 4.0);
  CHECK(sm_matrix_copy_data(h.m, out, 1) == SM_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("capi: power iteration and polar factors") {
  const double diag[] = {3.0, 0.0, 0.0, 1.0};
  MatrixHandle h;
  REQUIRE(sm_matrix_create(2, 2, diag, &h.m) == SM_OK);

  double est = 0.0;
  REQUIRE(sm_power_iter_spectral(h.m, 20, 1e-12, 42, &est) == SM_OK);
  CHECK(est == doctest::Approx(3.0).epsilon(1e-6));

  MatrixHandle ns;
  REQUIRE(sm_polar_newton_schulz(h.m, 12, 1e-12, SM_NS_SCALE_SPECTRAL, 25, 7, &ns.m) == SM_OK);
  MatrixHandle exact;
  REQUIRE(sm_polar_svd(h.m, &exact.m) == SM_OK);
  double a[4], b[4];
  REQUIRE(sm_matrix_copy_data(ns.m, a, 4) == SM_OK);
  REQUIRE(sm_matrix_copy_data(exact.m, b, 4) == SM_OK);
  for (int i = 0; i < 4; ++i) CHECK(std::fabs(a[i] - b[i]) <= 1e-6);

  // polar of the zero matrix is an error with a message
  MatrixHandle zero;
  REQUIRE(sm_matrix_create(2, 2, nullptr, &zero.m) == SM_OK);
  MatrixHandle out;
  CHECK(sm_polar_svd(zero.m, &out.m) == SM_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(sm_last_error()).find("polar undefined") != std::string::npos);
}

TEST_CASE("capi: signs, vote, pack, file round-trip") {
  const double data[] = {2.5, 0.0, -0.1, 7.0};
  MatrixHandle m;
  REQUIRE(sm_matrix_create(2, 2, data, &m.m) == SM_OK);
  SignHandle s;
  REQUIRE(sm_sign_entrywise(m.m, SM_ZERO_SIGN_PLUS_ONE, &s.s) == SM_OK);
  int8_t entries[4];
  REQUIRE(sm_sign_matrix_copy_entries(s.s, entries, 4) == SM_OK);
  CHECK(entries[0] == 1);
  CHECK(entries[1] == 1);
  CHECK(entries[2] == -1);
  CHECK(entries[3] == 1);

  const int8_t a_entries[] = {1, 1, -1};
  const int8_t b_entries[] = {1, -1, -1};
  const int8_t c_entries[] = {-1, 1, -1};
  SignHandle a, b, c;
  REQUIRE(sm_sign_matrix_create(1, 3, a_entries, &a.s) == SM_OK);
  REQUIRE(sm_sign_matrix_create(1, 3, b_entries, &b.s) == SM_OK);
  REQUIRE(sm_sign_matrix_create(1, 3, c_entries, &c.s) == SM_OK);
  const sm_sign_matrix* voters[] = {a.s, b.s, c.s};
  SignHandle vote;
  REQUIRE(sm_majority_vote(voters, 3, &vote.s) == SM_OK);
  int8_t voted[3];
  REQUIRE(sm_sign_matrix_copy_entries(vote.s, voted, 3) == SM_OK);
  CHECK(voted[0] == 1);
  CHECK(voted[1] == 1);
  CHECK(voted[2] == -1);

  uint8_t* wire = nullptr;
  size_t wire_len = 0;
  REQUIRE(sm_signs_pack(a.s, &wire, &wire_len) == SM_OK);
  REQUIRE(wire_len == 9);
  CHECK(wire[0] == 3);
  CHECK(wire[8] == 0x03);  // bits (1,1,0) LSB-first
  SignHandle back;
  REQUIRE(sm_signs_unpack(wire, wire_len, &back.s) == SM_OK);
  int8_t unpacked[3];
  REQUIRE(sm_sign_matrix_copy_entries(back.s, unpacked, 3) == SM_OK);
  CHECK(std::memcmp(unpacked, a_entries, 3) == 0);
  std::free(wire);

  const std::string path =
      (std::filesystem::temp_directory_path() / "sm_capi_signs.bin").string();
  REQUIRE(sm_signs_write_file(a.s, path.c_str()) == SM_OK);
  SignHandle from_file;
  REQUIRE(sm_signs_read_file(path.c_str(), &from_file.s) == SM_OK);
  REQUIRE(sm_sign_matrix_copy_entries(from_file.s, unpacked, 3) == SM_OK);
  CHECK(std::memcmp(unpacked, a_entries, 3) == 0);
  std::filesystem::remove(path);

  // zeros cannot be packed
  const int8_t with_zero[] = {1, 0, -1};
  SignHandle z;
  REQUIRE(sm_sign_matrix_create(1, 3, with_zero, &z.s) == SM_OK);
  CHECK(sm_signs_pack(z.s, &wire, &wire_len) == SM_ERROR_INVALID_ARGUMENT);
  CHECK(std::string(sm_last_error()).find("unresolved zero sign") != std::string::npos);
}

TEST_CASE("capi: cost model surface") {
  uint64_t payload = 0;
  REQUIRE(sm_cost_payload_bytes(23500000, 1, &payload) == SM_OK);
  CHECK(payload == 2937500ULL);

  int64_t r = 0;
  REQUIRE(sm_cost_rounds(SM_COLLECTIVE_ALLREDUCE, SM_TOPOLOGY_RING, 4, &r) == SM_OK);
  CHECK(r == 6);

  sm_cost_scenario scenario{};
  scenario.alpha = 1e-6;
  scenario.beta = 1e-9;
  scenario.workers = 4;
  scenario.entries = 1000;
  scenario.bits_per_entry = 8;
  scenario.topology = SM_TOPOLOGY_RING;
  scenario.collective = SM_COLLECTIVE_ALLREDUCE;
  sm_cost_breakdown b{};
  REQUIRE(sm_cost_iter_time(&scenario, &b) == SM_OK);
  CHECK(b.total_seconds == doctest::Approx(7.5e-6));

  double factor = 0.0;
  REQUIRE(sm_cost_compression_factor(1, &factor) == SM_OK);
  CHECK(factor == 32.0);
  double ratio = 0.0;
  REQUIRE(sm_cost_ag_over_ar_ratio(16, &ratio) == SM_OK);
  CHECK(ratio == 1.0);
  CHECK(sm_cost_ag_over_ar_ratio(1, &ratio) == SM_ERROR_INVALID_ARGUMENT);
  REQUIRE(sm_cost_ag_over_ar_ratio_ceil(16, 64, &ratio) == SM_OK);
  CHECK(ratio == doctest::Approx(1.0));
}

TEST_CASE("capi: train run and config errors") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sm_capi_train";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg_path = (dir / "run.toml").string();
  {
    std::ofstream f(cfg_path);
    f << "[task]\nrows = 4\ncols = 4\n[run]\nsteps = 20\n";
  }
  const std::string out_dir = (dir / "out").string();
  char* summary = nullptr;
  REQUIRE(sm_train_run(cfg_path.c_str(), out_dir.c_str(), &summary) == SM_OK);
  REQUIRE(summary != nullptr);
  CHECK(std::string(summary).find("\"records\": 20") != std::string::npos);
  sm_string_free(summary);
  CHECK(fs::exists(out_dir + "/trace.jsonl"));
  CHECK(fs::exists(out_dir + "/config.effective.toml"));
  CHECK(fs::exists(out_dir + "/summary.json"));

  const std::string bad_path = (dir / "bad.toml").string();
  {
    std::ofstream f(bad_path);
    f << "[optimizer]\nmomentum = 1.2\n";
  }
  CHECK(sm_train_run(bad_path.c_str(), out_dir.c_str(), nullptr) == SM_ERROR_CONFIG);
  CHECK(std::string(sm_last_error()).find("optimizer.momentum") != std::string::npos);

  CHECK(sm_train_run((dir / "missing.toml").string().c_str(), nullptr, nullptr) ==
        SM_ERROR_CONFIG);
  fs::remove_all(dir);
}

TEST_CASE("capi: unknown verify suite is rejected") {
  int all_passed = -1;
  CHECK(sm_verify_run("nonsense", 1, 1, nullptr, nullptr, &all_passed) ==
        SM_ERROR_INVALID_ARGUMENT);
}
