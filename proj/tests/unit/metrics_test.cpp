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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gkpb/breeding.hpp"
#include "quadrature.hpp"
#include "test_util.hpp"

using namespace gkpb;

TEST(Metrics, gkp_target_is_normalized) {
    for (double d : {0.1, 0.15, 0.3}) {
        const WaveFunction t = gkp_target({d, d, 0, {}});
        EXPECT_NEAR(t.squared_norm(), 1.0, 1e-14) << d;
    }
}

TEST(Metrics, gkp_target_truncation_is_stable) {
    const int s = default_truncation(0.15);
    EXPECT_GE(s, static_cast<int>(std::ceil(5.0 / (2 * 0.15 * kSqrtPi))) + 2);
    const WaveFunction a = gkp_target({0.15, 0.15, 0, s});
    const WaveFunction b = gkp_target({0.15, 0.15, 0, s + 5});
    EXPECT_GE(fidelity(a, b), 1.0 - 1e-15);
    EXPECT_EQ(a.size(), static_cast<std::size_t>(2 * s + 1));
}

TEST(Metrics, gkp_target_respects_explicit_truncation) {
    const WaveFunction t = gkp_target({0.15, 0.15, 0, 0});
    ASSERT_EQ(t.size(), 1u);
    EXPECT_NEAR(fidelity(t, gaussian(0.15 * 0.15, 0.0)), 1.0, 1e-15);
}

TEST(Metrics, gkp_logical_one_sits_between_zero_peaks) {
    const WaveFunction one = gkp_target({0.15, 0.15, 1, 3});
    for (const auto &term : one.terms()) {
        const double k = (term.mean.real() - kSqrtPi) / (2 * kSqrtPi);
        EXPECT_NEAR(k, std::round(k), 1e-14);
    }
    EXPECT_LT(fidelity(one, gkp_target({0.15, 0.15, 0, {}})), 1e-20);
}

TEST(Metrics, gkp_target_rejects_bad_parameters) {
    EXPECT_THROW(gkp_target({0.0, 0.15, 0, {}}), std::invalid_argument);
    EXPECT_THROW(gkp_target({0.15, -1.0, 0, {}}), std::invalid_argument);
    EXPECT_THROW(gkp_target({0.15, 0.15, 2, {}}), std::invalid_argument);
    EXPECT_THROW(gkp_target({0.15, 0.15, 0, -1}), std::invalid_argument);
}

TEST(Metrics, fidelity_properties) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        const WaveFunction a = gkpb::testing::random_state(rng, 3);
        const WaveFunction b = gkpb::testing::random_state(rng, 4);
        const double f = fidelity(a, b);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0);
        EXPECT_NEAR(f, fidelity(b, a), 1e-12);
        EXPECT_NEAR(fidelity(a, a), 1.0, 1e-13);
        EXPECT_NEAR(fidelity(a, normalize(a)), 1.0, 1e-13);
    }
}

TEST(Metrics, fidelity_of_displaced_vacuum) {
    for (double dx : {0.1, 0.5, 2.0}) {
        EXPECT_NEAR(fidelity(vacuum(), displace(vacuum(), dx, 0.0)), std::exp(-dx * dx / 2), 1e-14);
        EXPECT_NEAR(fidelity(vacuum(), displace(vacuum(), 0.0, dx)), std::exp(-dx * dx / 2), 1e-14);
    }
}

TEST(Metrics, fidelity_requires_a_nonzero_state) {
    const WaveFunction empty({}, Basis::position);
    EXPECT_THROW(fidelity(empty, vacuum()), DegenerateStateError);
    EXPECT_THROW(fidelity(vacuum(), vacuum(Basis::momentum)), BasisMismatchError);
}

TEST(Metrics, binomial_fidelity_to_gkp_regression) {
    const WaveFunction b3 = binomial_state({3, 1.9, 2 * kSqrtPi});
    const WaveFunction target = gkp_target({0.15, 0.15, 0, {}});
    // Frozen from the quadrature oracle.
    EXPECT_NEAR(fidelity(b3, target), 0.96757971507899543, 1e-12);
    const double via_quadrature = std::norm(oracle::inner_product(b3, target)) /
                                  (oracle::inner_product(b3, b3).real() * oracle::inner_product(target, target).real());
    EXPECT_NEAR(fidelity(b3, target), via_quadrature, 1e-12);
}

TEST(Metrics, narrow_comb_never_errs) {
    const WaveFunction t = gkp_target({0.01, 0.01, 0, 2});
    EXPECT_NEAR(no_error_probability(t, Quadrature::x), 1.0, 1e-12);
}

TEST(Metrics, wide_gaussian_is_uniform_over_windows) {
    const WaveFunction wide = gaussian(400.0, 0.0);
    EXPECT_NEAR(no_error_probability(wide, Quadrature::x), 1.0 / 6.0, 1e-10);
    const WaveFunction narrow = gaussian(1.0 / 400.0, 0.0);
    EXPECT_NEAR(no_error_probability(narrow, Quadrature::p), 1.0 / 3.0, 1e-10);
}

TEST(Metrics, gkp_target_passes_both_windows) {
    const WaveFunction t = gkp_target({0.15, 0.15, 0, {}});
    const double px = no_error_probability(t, Quadrature::x);
    const double pp = no_error_probability(t, Quadrature::p);
    EXPECT_GE(px * pp, 0.98);
    EXPECT_NEAR(px, oracle::window_probability_x(t), 1e-12);
}

TEST(Metrics, window_probability_is_lattice_periodic) {
    std::mt19937_64 rng(5);
    const WaveFunction psi = gkpb::testing::random_state(rng, 3, {0.05, 1.0, 0.3, 6.0, 1.0});
    for (Quadrature q : {Quadrature::x, Quadrature::p}) {
        const double T = window_period(q);
        const double base = no_error_probability(psi, q, 0.3);
        EXPECT_NEAR(no_error_probability(psi, q, 0.3 + T), base, 1e-12);
        const WaveFunction shifted = q == Quadrature::x ? displace(psi, T, 0.0) : displace(psi, 0.0, T);
        EXPECT_NEAR(no_error_probability(shifted, q, 0.3), base, 1e-12);
    }
    EXPECT_DOUBLE_EQ(window_period(Quadrature::x), 2 * kSqrtPi);
    EXPECT_DOUBLE_EQ(window_period(Quadrature::p), kSqrtPi);
}

TEST(Metrics, window_probability_matches_quadrature) {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 5; ++k) {
        const WaveFunction psi = gkpb::testing::random_state(rng, 3, {0.05, 1.0, 0.3, 6.0, 1.0});
        EXPECT_NEAR(no_error_probability(psi, Quadrature::x, 0.2), oracle::window_probability_x(psi, 0.2), 1e-10);
        EXPECT_NEAR(no_error_probability(psi, Quadrature::p, -0.1), oracle::window_probability_p(psi, -0.1), 1e-9);
    }
    const WaveFunction small = gkp_target({0.3, 0.3, 0, {}});
    EXPECT_NEAR(no_error_probability(small, Quadrature::p), oracle::window_probability_p(small), 1e-10);
}

TEST(Metrics, momentum_basis_input_is_measured_physically) {
    std::mt19937_64 rng(23);
    const WaveFunction psi = gkpb::testing::random_state(rng, 2, {0.1, 1.0, 0.3, 4.0, 0.5});
    const WaveFunction tilde = fourier(psi);
    EXPECT_NEAR(no_error_probability(tilde, Quadrature::x, 0.4), no_error_probability(psi, Quadrature::x, 0.4), 1e-12);
    EXPECT_NEAR(no_error_probability(tilde, Quadrature::p, 0.4), no_error_probability(psi, Quadrature::p, 0.4), 1e-12);
}

TEST(Metrics, characteristic_function_of_vacuum) {
    for (double k : {0.0, 0.5, 2.0}) {
        const cplx cx = characteristic_function(vacuum(), Quadrature::x, k);
        const cplx cp = characteristic_function(vacuum(), Quadrature::p, k);
        EXPECT_NEAR(std::abs(cx - std::exp(-k * k / 4)), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(cp - std::exp(-k * k / 4)), 0.0, 1e-15);
    }
    const cplx shifted = characteristic_function(displace(vacuum(), 1.5, 0.0), Quadrature::x, 2.0);
    EXPECT_NEAR(std::abs(shifted - std::exp(cplx{0.0, 3.0}) * std::exp(-1.0)), 0.0, 1e-14);
}

TEST(Metrics, decibel_conversion) {
    EXPECT_EQ(zeta_to_db(0.0), 0.0);
    EXPECT_NEAR(zeta_to_db(1.9), -16.50, 5e-3);
    EXPECT_NEAR(db_to_zeta(-3.0), 0.3454, 1e-4);
    EXPECT_NEAR(db_to_zeta(zeta_to_db(0.7)), 0.7, 1e-15);
}

TEST(Metrics, fidelity_ignores_joint_displacement_and_phase) {
    std::mt19937_64 rng(29);
    const WaveFunction a = gkpb::testing::random_state(rng, 3);
    const WaveFunction b = gkpb::testing::random_state(rng, 2);
    const double base = fidelity(a, b);
    EXPECT_NEAR(fidelity(displace(a, 0.7, -1.3), displace(b, 0.7, -1.3)), base, 1e-12);
    std::vector<GaussianTerm> rotated = b.terms();
    for (auto &t : rotated) {
        t.log_coeff += cplx{0.0, 1.1};
    }
    EXPECT_NEAR(fidelity(a, WaveFunction(rotated)), base, 1e-14);
}
