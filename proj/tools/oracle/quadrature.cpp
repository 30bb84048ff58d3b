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

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gkpb::oracle {

namespace {

constexpr double kReach = 12.0;

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;

// Bisects until each piece's Kronrod error is below tol relative to its own value or to `scale`.
// The absolute floor matters where the integrand is vanishingly small against the total.
cplx adapt(const std::function<cplx(double)> &f, double a, double b, double tol, double scale, int depth) {
    double err = 0.0;
    const cplx value = Kronrod::integrate(f, a, b, 0, 0.0, &err);
    if (depth == 0 || err <= tol * std::max(std::abs(value), scale)) {
        return value;
    }
    const double mid = 0.5 * (a + b);
    return adapt(f, a, mid, tol, scale, depth - 1) + adapt(f, mid, b, tol, scale, depth - 1);
}

cplx integrate_pieces(const std::function<cplx(double)> &f, const std::vector<std::pair<double, double>> &pieces,
                      double tol) {
    double scale = 0.0;
    for (const auto &[a, b] : pieces) {
        double err = 0.0;
        scale += std::abs(Kronrod::integrate(f, a, b, 0, 0.0, &err));
    }
    cplx total{0.0, 0.0};
    for (const auto &[a, b] : pieces) {
        total += adapt(f, a, b, tol, scale, 30);
    }
    return total;
}

double norm2(const WaveFunction &psi) {
    return oracle::inner_product(psi, psi).real();
}

}  // namespace

std::vector<Peak> peaks_of(const WaveFunction &psi) {
    std::vector<Peak> out;
    out.reserve(psi.size());
    for (const auto &t : psi.terms()) {
        // |exp(-(q - mu)^2 / (2V))| = exp(-Re(a) q^2 + Re(b) q + ...), a = 1/(2V), b = mu/V.
        const cplx a = 1.0 / (2.0 * t.variance);
        const cplx b = t.mean / t.variance;
        out.push_back({b.real() / (2.0 * a.real()), 1.0 / std::sqrt(2.0 * a.real())});
    }
    return out;
}

cplx integrate(const std::function<cplx(double)> &f, const std::vector<Peak> &peaks, double tol) {
    std::vector<double> cuts;
    for (const auto &p : peaks) {
        for (double s : {-kReach, -3.0, -1.0, 0.0, 1.0, 3.0, kReach}) {
            cuts.push_back(p.centre + s * p.sigma);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<std::pair<double, double>> pieces;
    for (std::size_t k = 1; k < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k - 1] + cuts[k]);
        const bool covered = std::any_of(peaks.begin(), peaks.end(), [&](const Peak &p) {
            return std::abs(mid - p.centre) <= kReach * p.sigma;
        });
        if (covered && cuts[k] > cuts[k - 1]) {
            pieces.emplace_back(cuts[k - 1], cuts[k]);
        }
    }
    return integrate_pieces(f, pieces, tol);
}

cplx inner_product(const WaveFunction &psi, const WaveFunction &phi) {
    auto peaks = peaks_of(psi);
    const auto more = peaks_of(phi);
    peaks.insert(peaks.end(), more.begin(), more.end());
    return integrate([&](double q) { return std::conj(evaluate(psi, q)) * evaluate(phi, q); }, peaks);
}

cplx fourier_at(const WaveFunction &psi, double p) {
    const cplx value = integrate(
        [&](double q) { return std::exp(cplx{0.0, -p * q}) * evaluate(psi, q); }, peaks_of(psi));
    return value / std::sqrt(2.0 * kPi);
}

cplx projection_at(const WaveFunction &mode1, const WaveFunction &mode2, double r, double x1) {
    std::vector<Peak> peaks;
    for (const auto &p : peaks_of(mode1)) {
        peaks.push_back({kSqrt2 * p.centre - x1, kSqrt2 * p.sigma});
    }
    for (const auto &p : peaks_of(mode2)) {
        peaks.push_back({x1 - kSqrt2 * p.centre, kSqrt2 * p.sigma});
    }
    const cplx value = integrate(
        [&](double x2) {
            return std::exp(cplx{0.0, -r * x2}) * evaluate(mode1, (x1 + x2) / kSqrt2) *
                   evaluate(mode2, (x1 - x2) / kSqrt2);
        },
        peaks);
    return value / std::sqrt(2.0 * kPi);
}

double outcome_density(const WaveFunction &mode1, const WaveFunction &mode2, double r) {
    // Mode-1 support: (mu1 + mu2)/sqrt2 for every pair of peaks.
    std::vector<Peak> peaks;
    for (const auto &p1 : peaks_of(mode1)) {
        for (const auto &p2 : peaks_of(mode2)) {
            peaks.push_back({(p1.centre + p2.centre) / kSqrt2, std::max(p1.sigma, p2.sigma) * 2.0});
        }
    }
    const cplx mass = integrate([&](double x1) { return cplx{std::norm(oracle::projection_at(mode1, mode2, r, x1)), 0.0}; },
                                peaks, 1e-12);
    return mass.real() / (norm2(mode1) * norm2(mode2));
}

double window_probability_x(const WaveFunction &psi, double offset) {
    const double period = window_period(Quadrature::x);
    const double h = kShiftWindowHalfWidth;
    const auto peaks = peaks_of(psi);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto &p : peaks) {
        lo = std::min(lo, p.centre - kReach * p.sigma);
        hi = std::max(hi, p.centre + kReach * p.sigma);
    }
    auto density = [&](double q) { return cplx{std::norm(evaluate(psi, q)), 0.0}; };
    std::vector<std::pair<double, double>> pieces;
    const long s_lo = static_cast<long>(std::floor((lo - offset) / period)) - 1;
    const long s_hi = static_cast<long>(std::ceil((hi - offset) / period)) + 1;
    for (long s = s_lo; s <= s_hi; ++s) {
        const double c = offset + period * static_cast<double>(s);
        const double a = std::max(c - h, lo);
        const double b = std::min(c + h, hi);
        if (b <= a) {
            continue;
        }
        // Split at interior peaks so narrow features are not skipped.
        std::vector<double> cuts{a, b};
        for (const auto &p : peaks) {
            for (double k : {-3.0, 0.0, 3.0}) {
                const double x = p.centre + k * p.sigma;
                if (x > a && x < b) {
                    cuts.push_back(x);
                }
            }
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 1; k < cuts.size(); ++k) {
            if (cuts[k] > cuts[k - 1]) {
                pieces.emplace_back(cuts[k - 1], cuts[k]);
            }
        }
    }
    return integrate_pieces(density, pieces, 1e-13).real() / norm2(psi);
}

double window_probability_p(const WaveFunction &psi, double offset) {
    // |psi~(p)|^2 decays on the scale of the narrowest x feature: sigma_p = 1 / (sqrt2 sigma_x).
    double sigma_x = std::numeric_limits<double>::infinity();
    double max_abs_centre = 0.0;
    for (const auto &t : psi.terms()) {
        sigma_x = std::min(sigma_x, std::sqrt(std::abs(t.variance)));
        max_abs_centre = std::max(max_abs_centre, std::abs(t.mean.imag()) / std::abs(t.variance));
    }
    const double reach = kReach / (kSqrt2 * sigma_x) + max_abs_centre;
    const double period = window_period(Quadrature::p);
    const double h = kShiftWindowHalfWidth;
    auto density = [&](double p) { return cplx{std::norm(oracle::fourier_at(psi, p)), 0.0}; };
    std::vector<std::pair<double, double>> pieces;
    const long s_max = static_cast<long>(std::ceil((reach + std::abs(offset)) / period)) + 1;
    for (long s = -s_max; s <= s_max; ++s) {
        const double c = offset + period * static_cast<double>(s);
        pieces.emplace_back(c - h, c + h);
    }
    return integrate_pieces(density, pieces, 1e-12).real() / norm2(psi);
}

}  // namespace gkpb::oracle
