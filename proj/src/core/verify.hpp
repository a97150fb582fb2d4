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

#ifndef SIGNMUON_CORE_VERIFY_HPP
#define SIGNMUON_CORE_VERIFY_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/harness.hpp"

namespace signmuon::verify {

// Numerical property suites. Every check is deterministic given the seed and
// carries (estimate, bound) machine-readably.
std::vector<harness::CheckResult> linalg_suite(std::uint64_t seed);
std::vector<harness::CheckResult> collective_suite(std::uint64_t seed);
std::vector<harness::CheckResult> bounds_suite(std::uint64_t seed);

// suite in {linalg, collective, bounds, all}; jobs > 1 shards checks across
// threads (results keep a fixed order). Throws std::invalid_argument for an
// unknown suite name.
std::vector<harness::CheckResult> run_suite(const std::string& suite, std::uint64_t seed, int jobs);

std::string format_line(const harness::CheckResult& check);
bool all_passed(std::span<const harness::CheckResult> checks);

}  // namespace signmuon::verify

#endif  // SIGNMUON_CORE_VERIFY_HPP
