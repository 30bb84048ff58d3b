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

#include "gkpb/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gkpb {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate_term(const GaussianTerm &t) {
    if (!(t.variance.real() > 0.0) || !std::isfinite(t.variance.imag())) {
        throw std::invalid_argument("GaussianTerm variance must have a positive real part");
    }
    if (!std::isfinite(t.mean.real()) || !std::isfinite(t.mean.imag())) {
        throw std::invalid_argument("GaussianTerm mean must be finite");
    }
    if (std::isnan(t.log_coeff.real()) || std::isnan(t.log_coeff.imag())) {
        throw std::invalid_argument("GaussianTerm coefficient is NaN");
    }
}

// Translates the Gaussian by d.
GaussianTerm shifted(GaussianTerm t, double d) {
    t.mean += d;
    return t;
}

// Multiplies the term by exp(i k q).
GaussianTerm modulated(GaussianTerm t, double k) {
    const cplx i{0.0, 1.0};
    t.log_coeff += i * k * t.mean - t.variance * (k * k / 2.0);
    t.mean += i * t.variance * k;
    return t;
}

}  // namespace

const char *basis_name(Basis basis) {
    return basis == Basis::position ? "position" : "momentum";
}

Basis parse_basis(const std::string &name) {
    if (name == "position" || name == "x") {
        return Basis::position;
    }
    if (name == "momentum" || name == "p") {
        return Basis::momentum;
    }
    throw std::invalid_argument("unknown basis '" + name + "'");
}

GaussianTerm GaussianTerm::from_coeff(cplx coeff, cplx variance, cplx mean) {
    GaussianTerm t;
    t.log_coeff = coeff == cplx{0.0, 0.0} ? cplx{kNegInf, 0.0} : std::log(coeff);
    t.variance = variance;
    t.mean = mean;
    return t;
}

cplx GaussianTerm::coeff() const {
    if (log_coeff.real() == kNegInf) {
        return {0.0, 0.0};
    }
    return std::exp(log_coeff);
}

cplx GaussianTerm::log_value(double q) const {
    const cplx d = q - mean;
    return log_coeff - d * d / (2.0 * variance);
}

cplx GaussianTerm::value(double q) const {
    const cplx l = log_value(q);
    if (l.real() == kNegInf) {
        return {0.0, 0.0};
    }
    return std::exp(l);
}

cplx ScaledComplex::value() const {
    if (mantissa == cplx{0.0, 0.0}) {
        return mantissa;
    }
    return mantissa * std::exp(log_scale);
}

double ScaledComplex::log_abs() const {
    const double a = std::abs(mantissa);
    return a == 0.0 ? kNegInf : std::log(a) + log_scale;
}

ScaledComplex sum_exp(const std::vector<cplx> &logs) {
    double top = kNegInf;
    for (const auto &l : logs) {
        top = std::max(top, l.real());
    }
    ScaledComplex out;
    if (top == kNegInf) {
        return out;
    }
    for (const auto &l : logs) {
        if (l.real() != kNegInf) {
            out.mantissa += std::exp(l - top);
        }
    }
    out.log_scale = top;
    return out;
}

WaveFunction::WaveFunction(std::vector<GaussianTerm> terms, Basis basis) : terms_(std::move(terms)), basis_(basis) {
    for (const auto &t : terms_) {
        validate_term(t);
    }
}

WaveFunction::WaveFunction(const WaveFunction &other)
    : terms_(other.terms_), basis_(other.basis_), log_norm2_cache_(other.log_norm2_cache_.load(std::memory_order_relaxed)) {
}

WaveFunction::WaveFunction(WaveFunction &&other) noexcept
    : terms_(std::move(other.terms_)),
      basis_(other.basis_),
      log_norm2_cache_(other.log_norm2_cache_.load(std::memory_order_relaxed)) {
    other.log_norm2_cache_.store(kNotComputed, std::memory_order_relaxed);
}

WaveFunction &WaveFunction::operator=(const WaveFunction &other) {
    if (this != &other) {
        terms_ = other.terms_;
        basis_ = other.basis_;
        log_norm2_cache_.store(other.log_norm2_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    }
    return *this;
}

WaveFunction &WaveFunction::operator=(WaveFunction &&other) noexcept {
    if (this != &other) {
        terms_ = std::move(other.terms_);
        basis_ = other.basis_;
        log_norm2_cache_.store(other.log_norm2_cache_.load(std::memory_order_relaxed), std::memory_order_relaxed);
        other.log_norm2_cache_.store(kNotComputed, std::memory_order_relaxed);
    }
    return *this;
}

double WaveFunction::log_squared_norm() const {
    double cached = log_norm2_cache_.load(std::memory_order_relaxed);
    if (cached != kNotComputed) {
        return cached;
    }
    double result = kNegInf;
    if (!terms_.empty()) {
        const ScaledComplex s = inner_product_scaled(*this, *this);
        if (s.mantissa.real() > 0.0) {
            result = std::log(s.mantissa.real()) + s.log_scale;
        }
    }
    log_norm2_cache_.store(result, std::memory_order_relaxed);
    return result;
}

double WaveFunction::squared_norm() const {
    return std::exp(log_squared_norm());
}

WaveFunction gaussian(double variance, double mean, Basis basis) {
    return WaveFunction({GaussianTerm{{0.0, 0.0}, variance, mean}}, basis);
}

WaveFunction vacuum(Basis basis) {
    return gaussian(1.0, 0.0, basis);
}

cplx evaluate(const WaveFunction &psi, double q) {
    if (psi.empty()) {
        throw std::invalid_argument("evaluate: empty wave function");
    }
    cplx total{0.0, 0.0};
    for (const auto &t : psi.terms()) {
        total += t.value(q);
    }
    return total;
}

cplx log_overlap(const GaussianTerm &a, const GaussianTerm &b) {
    // integral of conj(a) b: conj(a) is a Gaussian with conjugated parameters.
    const cplx va = std::conj(a.variance);
    const cplx ma = std::conj(a.mean);
    const cplx w = va + b.variance;
    const cplx d = ma - b.mean;
    return std::conj(a.log_coeff) + b.log_coeff + 0.5 * std::log(2.0 * kPi * va * b.variance / w) - d * d / (2.0 * w);
}

ScaledComplex inner_product_scaled(const WaveFunction &psi, const WaveFunction &phi) {
    if (psi.basis() != phi.basis()) {
        throw BasisMismatchError("inner_product: basis mismatch");
    }
    std::vector<cplx> logs;
    logs.reserve(psi.size() * phi.size());
    for (const auto &a : psi.terms()) {
        for (const auto &b : phi.terms()) {
            logs.push_back(log_overlap(a, b));
        }
    }
    return sum_exp(logs);
}

cplx inner_product(const WaveFunction &psi, const WaveFunction &phi) {
    return inner_product_scaled(psi, phi).value();
}

WaveFunction normalize(const WaveFunction &psi) {
    const double ln2 = psi.log_squared_norm();
    if (!(ln2 >= std::log(kDegenerateNorm))) {
        throw DegenerateStateError("normalize: state has zero norm");
    }
    std::vector<GaussianTerm> terms = psi.terms();
    for (auto &t : terms) {
        t.log_coeff -= 0.5 * ln2;
    }
    return WaveFunction(std::move(terms), psi.basis());
}

WaveFunction fourier(const WaveFunction &psi) {
    const cplx i{0.0, 1.0};
    std::vector<GaussianTerm> out;
    out.reserve(psi.size());
    for (const auto &t : psi.terms()) {
        // integral exp(-(q-mu)^2/(2V) - i p q) dq / sqrt(2 pi) = sqrt(V) exp(-i p mu - V p^2 / 2)
        GaussianTerm f;
        f.variance = 1.0 / t.variance;
        f.mean = -i * t.mean / t.variance;
        f.log_coeff = t.log_coeff + 0.5 * std::log(t.variance) - t.mean * t.mean / (2.0 * t.variance);
        out.push_back(f);
    }
    const Basis flipped = psi.basis() == Basis::position ? Basis::momentum : Basis::position;
    return WaveFunction(std::move(out), flipped);
}

WaveFunction scale(const WaveFunction &psi, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("scale: factor must be positive");
    }
    std::vector<GaussianTerm> terms = psi.terms();
    for (auto &t : terms) {
        t.log_coeff -= 0.5 * std::log(s);
        t.variance *= s * s;
        t.mean *= s;
    }
    return WaveFunction(std::move(terms), psi.basis());
}

WaveFunction modulate(const WaveFunction &psi, double k) {
    std::vector<GaussianTerm> terms;
    terms.reserve(psi.size());
    for (const auto &t : psi.terms()) {
        terms.push_back(modulated(t, k));
    }
    return WaveFunction(std::move(terms), psi.basis());
}

WaveFunction displace(const WaveFunction &psi, double dx, double dp) {
    const cplx i{0.0, 1.0};
    std::vector<GaussianTerm> terms;
    terms.reserve(psi.size());
    for (const auto &t : psi.terms()) {
        if (psi.basis() == Basis::position) {
            terms.push_back(modulated(shifted(t, dx), dp));
        } else {
            // Image of exp(i dp x) psi(x - dx): exp(i dp dx) exp(-i dx p) psi~(p - dp).
            GaussianTerm u = modulated(shifted(t, dp), -dx);
            u.log_coeff += i * dp * dx;
            terms.push_back(u);
        }
    }
    return WaveFunction(std::move(terms), psi.basis());
}

MergeReport merge_prune(const WaveFunction &psi, double tol) {
    if (!(tol >= 0.0)) {
        throw std::invalid_argument("merge_prune: tolerance must be non-negative");
    }
    const auto &in = psi.terms();
    const std::size_t n = in.size();
    MergeReport report;
    if (n == 0) {
        report.state = WaveFunction({}, psi.basis());
        return report;
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return in[a].mean.real() < in[b].mean.real();
    });

    constexpr std::size_t kUnassigned = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> group_of(n, kUnassigned);
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t oi = 0; oi < n; ++oi) {
        const std::size_t a = order[oi];
        if (group_of[a] != kUnassigned) {
            continue;
        }
        group_of[a] = groups.size();
        groups.push_back({a});
        for (std::size_t oj = oi + 1; oj < n; ++oj) {
            const std::size_t b = order[oj];
            if (in[b].mean.real() - in[a].mean.real() > kMergeTolerance) {
                break;
            }
            if (group_of[b] == kUnassigned && std::abs(in[b].mean - in[a].mean) <= kMergeTolerance &&
                std::abs(in[b].variance - in[a].variance) <= kMergeTolerance) {
                group_of[b] = group_of[a];
                groups.back().push_back(b);
            }
        }
    }
    // First-occurrence order.
    for (auto &g : groups) {
        std::sort(g.begin(), g.end());
    }
    std::sort(groups.begin(), groups.end(), [](const auto &x, const auto &y) { return x.front() < y.front(); });

    std::vector<GaussianTerm> merged;
    std::vector<cplx> dropped_norm_logs;
    merged.reserve(groups.size());
    for (const auto &g : groups) {
        GaussianTerm t = in[g.front()];
        if (g.size() > 1) {
            std::vector<cplx> logs;
            logs.reserve(g.size());
            for (auto k : g) {
                logs.push_back(in[k].log_coeff);
            }
            const ScaledComplex s = sum_exp(logs);
            double magnitude = 0.0;
            for (const auto &l : logs) {
                if (l.real() != kNegInf) {
                    magnitude += std::exp(l.real() - s.log_scale);
                }
            }
            report.merged += g.size() - 1;
            if (std::abs(s.mantissa) <= 16.0 * std::numeric_limits<double>::epsilon() * magnitude) {
                continue;
            }
            t.log_coeff = std::log(s.mantissa) + s.log_scale;
        }
        if (t.log_coeff.real() == kNegInf) {
            continue;
        }
        merged.push_back(t);
    }

    std::vector<GaussianTerm> kept;
    kept.reserve(merged.size());
    if (tol > 0.0 && !merged.empty()) {
        double top = kNegInf;
        for (const auto &t : merged) {
            top = std::max(top, t.log_coeff.real());
        }
        const double cutoff = top + std::log(tol);
        for (const auto &t : merged) {
            if (t.log_coeff.real() < cutoff) {
                dropped_norm_logs.push_back(0.5 * log_overlap(t, t).real());
                ++report.pruned;
            } else {
                kept.push_back(t);
            }
        }
    } else {
        kept = std::move(merged);
    }

    report.degenerate = kept.empty();
    if (!dropped_norm_logs.empty()) {
        const double dropped = sum_exp(dropped_norm_logs).log_abs();
        report.dropped_norm_ratio = std::exp(dropped - 0.5 * psi.log_squared_norm());
    }
    report.state = WaveFunction(std::move(kept), psi.basis());
    return report;
}

}  // namespace gkpb
