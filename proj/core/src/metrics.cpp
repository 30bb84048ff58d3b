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

#include "gkpb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gkpb {

namespace {

constexpr double kSeriesTolerance = 1e-17;
constexpr long kMaxSeriesTerms = 10'000'000;

// Physical position-basis wave function of psi. A momentum-basis psi~ has x wave function
// fourier(psi~)(-x).
WaveFunction as_position(const WaveFunction &psi) {
    if (psi.basis() == Basis::position) {
        return psi;
    }
    std::vector<GaussianTerm> terms = fourier(psi).terms();
    for (auto &t : terms) {
        t.mean = -t.mean;
    }
    return WaveFunction(std::move(terms), Basis::position);
}

// log <t_j| exp(i k Q) |t_k> = c0 + c1 k + c2 k^2 for a position-basis pair.
struct PairPolynomial {
    cplx c0;
    cplx c1;
    cplx c2;

    cplx at(double k) const { return c0 + k * (c1 + k * c2); }
    double magnitude_log(double k) const { return c0.real() + k * (c1.real() + k * c2.real()); }
};

std::vector<PairPolynomial> pair_polynomials(const WaveFunction &psi, Quadrature quadrature) {
    const cplx i{0.0, 1.0};
    std::vector<PairPolynomial> out;
    out.reserve(psi.size() * psi.size());
    for (const auto &a : psi.terms()) {
        for (const auto &b : psi.terms()) {
            const cplx va = std::conj(a.variance);
            const cplx ma = std::conj(a.mean);
            const cplx w = va + b.variance;
            const cplx d = ma - b.mean;
            PairPolynomial poly;
            poly.c0 = log_overlap(a, b);
            if (quadrature == Quadrature::x) {
                // exp(i k x) multiplies the product Gaussian centred at mc with variance va vb / w.
                const cplx mc = (ma * b.variance + b.mean * va) / w;
                poly.c1 = i * mc;
                poly.c2 = -va * b.variance / (2.0 * w);
            } else {
                // exp(i k p) maps psi(x) to psi(x + k): the overlap exponent -(d + k)^2 / (2 w).
                poly.c1 = -d / w;
                poly.c2 = -1.0 / (2.0 * w);
            }
            out.push_back(poly);
        }
    }
    return out;
}

ScaledComplex sum_at(const std::vector<PairPolynomial> &polys, double k) {
    std::vector<cplx> logs;
    logs.reserve(polys.size());
    for (const auto &poly : polys) {
        logs.push_back(poly.at(k));
    }
    return sum_exp(logs);
}

}  // namespace

void GkpTarget::validate() const {
    if (!(delta > 0.0) || !(kappa > 0.0)) {
        throw std::invalid_argument("GkpTarget: delta and kappa must be positive");
    }
    if (logical != 0 && logical != 1) {
        throw std::invalid_argument("GkpTarget: logical must be 0 or 1");
    }
    if (s_max && *s_max < 0) {
        throw std::invalid_argument("GkpTarget: s_max must be non-negative");
    }
}

int default_truncation(double kappa) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("default_truncation: kappa must be positive");
    }
    const double unit = 2.0 * kappa * kSqrtPi;
    const double floor_rule = std::ceil(5.0 / unit) + 2.0;
    const double weight_rule = std::ceil(std::sqrt(std::log(1e16)) / unit);
    return static_cast<int>(std::max(floor_rule, weight_rule));
}

WaveFunction gkp_target(const GkpTarget &target) {
    target.validate();
    const int s_max = target.s_max.value_or(default_truncation(target.kappa));
    const double v = target.delta * target.delta;
    const double offset = target.logical == 1 ? kSqrtPi : 0.0;
    std::vector<GaussianTerm> terms;
    terms.reserve(2 * static_cast<std::size_t>(s_max) + 1);
    for (int s = -s_max; s <= s_max; ++s) {
        const double e = 2.0 * s * target.kappa * kSqrtPi;
        terms.push_back(GaussianTerm{{-e * e / 2.0, 0.0}, v, 2.0 * s * kSqrtPi + offset});
    }
    return normalize(WaveFunction(std::move(terms)));
}

double fidelity(const WaveFunction &a, const WaveFunction &b) {
    const double la = a.log_squared_norm();
    const double lb = b.log_squared_norm();
    if (!(la >= std::log(kDegenerateNorm)) || !(lb >= std::log(kDegenerateNorm))) {
        throw DegenerateStateError("fidelity: degenerate input state");
    }
    const ScaledComplex s = inner_product_scaled(a, b);
    const double l = 2.0 * s.log_abs() - la - lb;
    return std::clamp(std::exp(l), 0.0, 1.0);
}

double window_period(Quadrature quadrature) {
    return quadrature == Quadrature::x ? 2.0 * kSqrtPi : kSqrtPi;
}

cplx characteristic_function(const WaveFunction &psi, Quadrature quadrature, double k) {
    const WaveFunction phi = as_position(psi);
    const auto polys = pair_polynomials(phi, quadrature);
    const ScaledComplex num = sum_at(polys, k);
    const ScaledComplex den = sum_at(polys, 0.0);
    if (!(den.mantissa.real() > 0.0)) {
        throw DegenerateStateError("characteristic_function: state is not normalizable");
    }
    return num.mantissa / den.mantissa.real() * std::exp(num.log_scale - den.log_scale);
}

double no_error_probability(const WaveFunction &psi, Quadrature quadrature, double offset) {
    const WaveFunction phi = as_position(psi);
    if (phi.empty()) {
        throw DegenerateStateError("no_error_probability: empty state");
    }
    const auto polys = pair_polynomials(phi, quadrature);
    const ScaledComplex norm = sum_at(polys, 0.0);
    if (!(norm.mantissa.real() > 0.0) || !std::isfinite(norm.mantissa.real())) {
        throw DegenerateStateError("no_error_probability: state is not normalizable");
    }
    const double norm_value = norm.mantissa.real();
    const double scale = norm.log_scale;

    const double period = window_period(quadrature);
    const double h = kShiftWindowHalfWidth;
    const double dk = 2.0 * kPi / period;

    double vertex = 0.0;
    for (const auto &poly : polys) {
        vertex = std::max(vertex, -poly.c1.real() / (2.0 * poly.c2.real()));
    }

    double total = 2.0 * h / period;
    for (long n = 1; n <= kMaxSeriesTerms; ++n) {
        const double k = dk * static_cast<double>(n);
        const ScaledComplex c = sum_at(polys, k);
        const cplx value = c.mantissa * std::exp(c.log_scale - scale) / norm_value;
        const double a_n = 2.0 * std::sin(k * h) / (k * period);
        total += 2.0 * a_n * (std::exp(cplx{0.0, -k * offset}) * value).real();

        if (k <= vertex) {
            continue;
        }
        // Past every vertex each pair term decays monotonically; bound the rest of the series by a
        // geometric tail using the slowest per-step decay ratio.
        double bound = 0.0;
        double ratio = 0.0;
        for (const auto &poly : polys) {
            const double here = poly.magnitude_log(k);
            bound += std::exp(here - scale);
            ratio = std::max(ratio, std::exp(poly.magnitude_log(k + dk) - here));
        }
        bound /= norm_value;
        if (ratio < 1.0 && 2.0 * bound * ratio / (1.0 - ratio) < kSeriesTolerance) {
            return std::clamp(total, 0.0, 1.0);
        }
    }
    throw std::runtime_error("no_error_probability: window series did not converge");
}

double zeta_to_db(double zeta) {
    return 10.0 * std::log10(std::exp(-2.0 * zeta));
}

double db_to_zeta(double db) {
    return -db * std::log(10.0) / 20.0;
}

}  // namespace gkpb
