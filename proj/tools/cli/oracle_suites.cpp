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

#include <algorithm>
#include <cmath>
#include <random>

#include "commands.hpp"
#include "gkpb/metrics.hpp"
#include "gkpb/optics.hpp"
#include "quadrature.hpp"

namespace gkpb::cli {

namespace {

using nlohmann::json;

/// Random superposition whose terms all peak at magnitude O(1) on the real line.
WaveFunction random_state(std::mt19937_64 &rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<GaussianTerm> terms;
    for (std::size_t k = 0; k < n; ++k) {
        const double vr = 0.05 + 1.95 * u(rng);
        const cplx v{vr, 0.5 * vr * (2.0 * u(rng) - 1.0)};
        const cplx mu{6.0 * (2.0 * u(rng) - 1.0), 2.0 * u(rng) - 1.0};
        const cplx a = 1.0 / (2.0 * v);
        const cplx b = mu / v;
        const double peak = (-mu * mu / (2.0 * v)).real() + b.real() * b.real() / (4.0 * a.real());
        terms.push_back(GaussianTerm{{std::log(0.2 + 0.8 * u(rng)) - peak, 2.0 * kPi * u(rng)}, v, mu});
    }
    return WaveFunction(std::move(terms));
}

struct Check {
    std::string name;
    double tolerance;
    double max_error = 0.0;

    void observe(double err) { max_error = std::max(max_error, std::isnan(err) ? INFINITY : err); }
    json report() const {
        return {{"name", name}, {"max_error", max_error}, {"tolerance", tolerance}, {"passed", max_error <= tolerance}};
    }
};

/// Largest |got - want| / |want| over x, ignoring points where |want| is below 1e-3 of the largest.
double pointwise_error(const std::vector<cplx> &got, const std::vector<cplx> &want) {
    double scale = 0.0;
    for (const auto &w : want) {
        scale = std::max(scale, std::abs(w));
    }
    double err = 0.0;
    for (std::size_t k = 0; k < want.size(); ++k) {
        if (std::abs(want[k]) >= 1e-3 * scale) {
            err = std::max(err, std::abs(got[k] - want[k]) / std::abs(want[k]));
        }
    }
    return err;
}

std::vector<Check> overlap_suite() {
    std::mt19937_64 rng(1);
    Check overlap{"inner_product", 1e-10};
    Check transform{"fourier", 1e-10};
    for (int k = 0; k < 20; ++k) {
        const WaveFunction a = random_state(rng, 1 + k % 4);
        const WaveFunction b = random_state(rng, 1 + (k + 2) % 4);
        const cplx want = oracle::inner_product(a, b);
        overlap.observe(std::abs(inner_product(a, b) - want) / std::abs(want));
        const WaveFunction ft = fourier(a);
        std::vector<cplx> got;
        std::vector<cplx> ref;
        for (double p = -3.0; p <= 3.0; p += 0.75) {
            got.push_back(evaluate(ft, p));
            ref.push_back(oracle::fourier_at(a, p));
        }
        transform.observe(pointwise_error(got, ref));
    }
    return {overlap, transform};
}

std::vector<Check> breed_suite() {
    Check pascal{"pascal_row", 1e-12};
    for (int m = 1; m <= 3; ++m) {
        const WaveFunction bm = binomial_state({m, 1.9, 2.0 * kSqrtPi});
        std::vector<GaussianTerm> terms = breed_step(bm, bm, 0.0).terms();
        std::sort(terms.begin(), terms.end(),
                  [](const GaussianTerm &x, const GaussianTerm &y) { return x.mean.real() < y.mean.real(); });
        const auto row = log_pascal_row(m + 1);
        if (terms.size() != row.size()) {
            pascal.observe(INFINITY);
            continue;
        }
        for (std::size_t q = 0; q < row.size(); ++q) {
            const double ratio = std::exp(terms[q].log_coeff.real() - terms[0].log_coeff.real());
            pascal.observe(std::abs(ratio / std::exp(row[q]) - 1.0));
        }
    }

    Check general{"projection_general_r", 1e-8};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        const WaveFunction a = random_state(rng, 2);
        const WaveFunction b = random_state(rng, 2);
        const double r = u(rng);
        const WaveFunction cond = project_pair(a, b, r);
        std::vector<cplx> got;
        std::vector<cplx> ref;
        for (const auto &peak : oracle::peaks_of(cond)) {
            for (double s : {-1.0, 0.0, 1.0}) {
                const double x = peak.centre + s * peak.sigma;
                got.push_back(evaluate(cond, x));
                ref.push_back(oracle::projection_at(a, b, r, x));
            }
        }
        general.observe(pointwise_error(got, ref));
    }

    Check density{"outcome_density", 1e-8};
    const WaveFunction cat = make_cat({cat_amplitude(1, 1.0), 1.0});
    for (double r : {0.0, 0.2, 0.7}) {
        const double want = oracle::outcome_density(cat, cat, r);
        density.observe(std::abs(outcome_density(cat, cat, r) - want) / want);
    }
    return {pascal, general, density};
}

std::vector<Check> fidelity_suite() {
    Check regression{"binomial_vs_gkp", 1e-12};
    const WaveFunction b3 = binomial_state({3, 1.9, 2.0 * kSqrtPi});
    const WaveFunction target = gkp_target({0.15, 0.15, 0, std::nullopt});
    auto oracle_fidelity = [](const WaveFunction &a, const WaveFunction &b) {
        return std::norm(oracle::inner_product(a, b)) /
               (oracle::inner_product(a, a).real() * oracle::inner_product(b, b).real());
    };
    regression.observe(std::abs(fidelity(b3, target) - oracle_fidelity(b3, target)));
    std::mt19937_64 rng(3);
    for (int k = 0; k < 10; ++k) {
        const WaveFunction a = random_state(rng, 2);
        const WaveFunction b = random_state(rng, 3);
        regression.observe(std::abs(fidelity(a, b) - oracle_fidelity(a, b)));
    }
    return {regression};
}

std::vector<Check> windows_suite() {
    Check x{"window_x", 1e-9};
    Check p{"window_p", 1e-9};
    const WaveFunction target = gkp_target({0.15, 0.15, 0, std::nullopt});
    x.observe(std::abs(no_error_probability(target, Quadrature::x) - oracle::window_probability_x(target)));
    const WaveFunction coarse = gkp_target({0.3, 0.3, 0, std::nullopt});
    p.observe(std::abs(no_error_probability(coarse, Quadrature::p) - oracle::window_probability_p(coarse)));
    std::mt19937_64 rng(4);
    for (int k = 0; k < 3; ++k) {
        const WaveFunction psi = random_state(rng, 2);
        x.observe(std::abs(no_error_probability(psi, Quadrature::x, 0.3) - oracle::window_probability_x(psi, 0.3)));
        p.observe(std::abs(no_error_probability(psi, Quadrature::p, -0.2) - oracle::window_probability_p(psi, -0.2)));
    }
    return {x, p};
}

}  // namespace

const std::vector<std::string> &oracle_suite_names() {
    static const std::vector<std::string> names{"overlap", "breed", "fidelity", "windows"};
    return names;
}

json run_oracle_suite(const std::string &name) {
    std::vector<Check> checks;
    if (name == "overlap") {
        checks = overlap_suite();
    } else if (name == "breed") {
        checks = breed_suite();
    } else if (name == "fidelity") {
        checks = fidelity_suite();
    } else if (name == "windows") {
        checks = windows_suite();
    } else {
        throw UsageError("unknown oracle suite '" + name + "'");
    }
    json out = {{"suite", name}, {"passed", true}, {"max_error", 0.0}, {"checks", json::array()}};
    for (const auto &c : checks) {
        out["checks"].push_back(c.report());
        out["passed"] = out["passed"].get<bool>() && c.max_error <= c.tolerance;
        out["max_error"] = std::max(out["max_error"].get<double>(), c.max_error);
    }
    return out;
}

}  // namespace gkpb::cli
