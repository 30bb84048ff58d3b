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

// Brute-force numerical counterparts of the closed forms in gkpb::core. Everything here works from
// pointwise evaluation of the input wave functions and adaptive Gauss-Kronrod quadrature; no
// closed-form overlap, transform, or projection formula is reused.

#include <functional>
#include <utility>
#include <vector>

#include "gkpb/gaussian.hpp"
#include "gkpb/metrics.hpp"

namespace gkpb::oracle {

/// Where a term's magnitude peaks and its standard deviation there.
struct Peak {
    double centre;
    double sigma;
};

std::vector<Peak> peaks_of(const WaveFunction &psi);

/// Integral of f over the union of [centre - 12 sigma, centre + 12 sigma], split at every peak.
cplx integrate(const std::function<cplx(double)> &f, const std::vector<Peak> &peaks, double tol = 1e-13);

/// Integral of conj(psi(q)) phi(q) dq.
cplx inner_product(const WaveFunction &psi, const WaveFunction &phi);

/// (2 pi)^{-1/2} integral exp(-i p q) psi(q) dq.
cplx fourier_at(const WaveFunction &psi, double p);

/// Mode-1 conditional wave function at x1 after the 50/50 beam splitter and p2 = r:
/// (2 pi)^{-1/2} integral exp(-i r x2) psi1((x1 + x2)/sqrt2) psi2((x1 - x2)/sqrt2) dx2.
cplx projection_at(const WaveFunction &mode1, const WaveFunction &mode2, double r, double x1);

/// Outcome density at r: integral over x1 of |projection_at|^2 divided by both input norms.
double outcome_density(const WaveFunction &mode1, const WaveFunction &mode2, double r);

/// Probability mass of |psi(x)|^2 inside the x no-error windows, by direct quadrature.
double window_probability_x(const WaveFunction &psi, double offset = 0.0);

/// Same for |psi~(p)|^2, with psi~ itself computed by quadrature at each p.
double window_probability_p(const WaveFunction &psi, double offset = 0.0);

}  // namespace gkpb::oracle
