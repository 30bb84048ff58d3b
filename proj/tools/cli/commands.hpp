// Copyright 2026 The gkpb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gkpb/breeding.hpp"
#include "gkpb/io.hpp"

namespace gkpb::cli {

/// Exit codes of the gkpb executable.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Parses argv and runs one subcommand. Results go to `out`, diagnostics to `err`.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// Value of GKPB_SEED if set. Throws UsageError when it is not a non-negative integer.
std::optional<std::uint64_t> seed_from_env(const char *value);

/// The two states entering the root beam splitter of an exact-zero tree for cfg.
std::pair<WaveFunction, WaveFunction> root_inputs(const ProtocolConfig &cfg);

/// r-grid spanning the outcome sampler's window for the given inputs.
Grid default_r_grid(const WaveFunction &mode1, const WaveFunction &mode2);

const std::vector<std::string> &oracle_suite_names();

/// {"suite", "passed", "max_error", "checks": [{"name", "max_error", "tolerance", "passed"}]}.
/// Throws UsageError for unknown names.
nlohmann::json run_oracle_suite(const std::string &name);

}  // namespace gkpb::cli
