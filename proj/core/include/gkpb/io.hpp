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

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gkpb/breeding.hpp"
#include "gkpb/gaussian.hpp"

namespace gkpb {

/// {"basis": ..., "terms": [{coeff_re, coeff_im, var_re, var_im, mean_re, mean_im,
/// log_coeff_re, log_coeff_im}, ...]}. The log_coeff pair is exact where coeff under/overflows.
nlohmann::json to_json(const WaveFunction &psi);
/// Reads the format above; log_coeff_* take precedence over coeff_* when present.
WaveFunction wave_function_from_json(const nlohmann::json &j);

nlohmann::json to_json(const ProtocolConfig &cfg);
/// Field names match ProtocolConfig. Missing fields keep their defaults; unknown fields are an error.
ProtocolConfig protocol_config_from_json(const nlohmann::json &j);
ProtocolConfig load_protocol_config(const std::string &path);

nlohmann::json to_json(const BreedRecord &rec);
/// One compact JSON object per line, '\n' terminated.
std::string to_json_lines(const std::vector<BreedRecord> &records);

/// Locale-independent rendering with 17 significant digits (printf %.17g).
std::string format_number(double value);

/// Uniform grid description "min,max,n".
struct Grid {
    double lo = -8.0;
    double hi = 8.0;
    std::size_t points = 1601;

    double at(std::size_t k) const;
    std::vector<double> values() const;
};

Grid parse_grid(const std::string &text);

/// CSV with header x,re_psi,im_psi,abs2_psi for the normalized state.
std::string wave_function_csv(const WaveFunction &psi, const Grid &grid);

}  // namespace gkpb
