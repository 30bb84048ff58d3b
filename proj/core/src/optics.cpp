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

#include "gkpb/optics.hpp"

#include <cmath>

namespace gkpb {

namespace {

void require_position(const WaveFunction &a, const WaveFunction &b) {
    if (a.basis() != Basis::position || b.basis() != Basis::position) {
        throw BasisMismatchError("breed: both inputs must be position-basis wave functions");
    }
    if (a.empty() || b.empty()) {
        throw DegenerateStateError("breed: empty input state");
    }
}

GaussianTerm project_terms(const GaussianTerm &t1, const GaussianTerm &t2, double r) {
    const cplx i{0.0, 1.0};
    const cplx a1 = 1.0 / (2.0 * t1.variance);
    const cplx a2 = 1.0 / (2.0 * t2.variance);
    const cplx a22 = (a1 + a2) / 2.0;
    const cplx a12 = (a1 - a2) / 2.0;
    const cplx v_out = (t1.variance + t2.variance) / 2.0;

    // Mode coordinates at which both input Gaussians peak.
    const cplx s1 = (t1.mean + t2.mean) / kSqrt2;
    const cplx s2 = (t1.mean - t2.mean) / kSqrt2;
    const cplx beta = i * r * a12 / a22;

    GaussianTerm out;
    out.variance = v_out;
    out.mean = s1 + beta * v_out;
    out.log_coeff = t1.log_coeff + t2.log_coeff - 0.5 * std::log(a1 + a2) - i * r * s2 - r * r / (4.0 * a22) +
                    beta * beta * v_out / 2.0;
    return out;
}

}  // namespace

WaveFunction make_cat(const CatSpec &spec) {
    if (!(spec.alpha >= 0.0) || !std::isfinite(spec.zeta)) {
        throw std::invalid_argument("make_cat: alpha must be real and non-negative");
    }
    const double v = std::exp(-2.0 * spec.zeta);
    const double mu = kSqrt2 * spec.alpha * std::exp(-spec.zeta);
    return WaveFunction({GaussianTerm{{0.0, 0.0}, v, -mu}, GaussianTerm{{0.0, 0.0}, v, mu}});
}

double cat_amplitude(int m, double zeta) {
    return std::pow(kSqrt2, m - 1) * kSqrtPi * std::exp(zeta);
}

WaveFunction project_pair(const WaveFunction &mode1, const WaveFunction &mode2, double r) {
    require_position(mode1, mode2);
    std::vector<GaussianTerm> terms;
    terms.reserve(mode1.size() * mode2.size());
    for (const auto &t1 : mode1.terms()) {
        for (const auto &t2 : mode2.terms()) {
            terms.push_back(project_terms(t1, t2, r));
        }
    }
    return WaveFunction(std::move(terms));
}

HomodyneOutcome breed_pair(const WaveFunction &mode1, const WaveFunction &mode2, double r) {
    HomodyneOutcome out;
    out.r = r;
    out.conditional = merge_prune(project_pair(mode1, mode2, r), 0.0).state;
    if (out.conditional.empty()) {
        return out;
    }
    out.density =
        std::exp(out.conditional.log_squared_norm() - mode1.log_squared_norm() - mode2.log_squared_norm());
    return out;
}

double outcome_density(const WaveFunction &mode1, const WaveFunction &mode2, double r) {
    return breed_pair(mode1, mode2, r).density;
}

}  // namespace gkpb
