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

#include <optional>

#include "gkpb/gaussian.hpp"

namespace gkpb {

/// Half-width of the correctable shift window, sqrt(pi)/6.
inline constexpr double kShiftWindowHalfWidth = kSqrtPi / 6.0;

/// Approximate GKP codeword: peaks of width delta at 2 s sqrt(pi) (+ sqrt(pi) for logical 1) under
/// an envelope exp(-(2 s kappa sqrt(pi))^2 / 2).
struct GkpTarget {
    double delta = 0.15;
    double kappa = 0.15;
    int logical = 0;
    /// Sum runs over |s| <= s_max. Unset picks default_truncation(kappa).
    std::optional<int> s_max;

    void validate() const;
};

/// Smallest s_max whose omitted envelope terms carry under 1e-16 of the probability weight,
/// and never below ceil(5 / (2 kappa sqrt(pi))) + 2.
int default_truncation(double kappa);

/// Normalized truncated GKP state.
WaveFunction gkp_target(const GkpTarget &target);

/// |<a|b>|^2 / (<a|a><b|b>), clamped to [0, 1].
double fidelity(const WaveFunction &a, const WaveFunction &b);

enum class Quadrature { x, p };

/// Lattice period of the no-error windows: 2 sqrt(pi) in x, sqrt(pi) in p.
double window_period(Quadrature quadrature);

/// Probability that a measurement of `quadrature` lands within sqrt(pi)/6 of offset + k * period.
///
/// Uses the Fourier series of the periodic window indicator, whose coefficients pair with the
/// closed-form characteristic function <psi| exp(i k Q) |psi>. The series is summed until a bound on
/// the remaining terms drops below 1e-17. Works for unnormalized input.
double no_error_probability(const WaveFunction &psi, Quadrature quadrature, double offset = 0.0);

/// <psi| exp(i k Q) |psi> / <psi|psi>.
cplx characteristic_function(const WaveFunction &psi, Quadrature quadrature, double k);

/// 10 log10(e^{-2 zeta}).
double zeta_to_db(double zeta);
double db_to_zeta(double db);

}  // namespace gkpb
