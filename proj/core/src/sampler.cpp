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
#include <limits>

#include "gkpb/optics.hpp"
#include "gkpb/rng.hpp"

namespace gkpb {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(stream >> 32),
    };
    engine_.seed(seq);
}

namespace {

constexpr double kCdfTolerance = 1e-6;
constexpr std::size_t kInitialIntervals = 256;
constexpr std::size_t kMaxIntervals = std::size_t{1} << 18;
constexpr int kMaxWidenings = 8;

struct Window {
    double lo;
    double hi;
};

// Each term pair contributes an amplitude exp(q r^2 - i s2 r) in r. Its squared magnitude is a
// Gaussian with mean Im(s2) / (-2 Re q) and standard deviation 1 / (2 sqrt(-Re q)).
Window initial_window(const WaveFunction &mode1, const WaveFunction &mode2) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto &t1 : mode1.terms()) {
        for (const auto &t2 : mode2.terms()) {
            const cplx a1 = 1.0 / (2.0 * t1.variance);
            const cplx a2 = 1.0 / (2.0 * t2.variance);
            const cplx a22 = (a1 + a2) / 2.0;
            const cplx a12 = (a1 - a2) / 2.0;
            const cplx v_out = (t1.variance + t2.variance) / 2.0;
            const cplx q = -1.0 / (4.0 * a22) - a12 * a12 * v_out / (2.0 * a22 * a22);
            const double s2_im = ((t1.mean - t2.mean) / kSqrt2).imag();
            const double curvature = std::max(-q.real(), 1e-300);
            const double centre = s2_im / (2.0 * curvature);
            const double sigma = 1.0 / (2.0 * std::sqrt(curvature));
            lo = std::min(lo, centre - 10.0 * sigma);
            hi = std::max(hi, centre + 10.0 * sigma);
        }
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
        throw GridConstructionError("sampler: cannot determine outcome window");
    }
    return {lo, hi};
}

// outcome_density as a function of r alone. Every conditional term has a log coefficient quadratic
// in r and a mean linear in r, so those coefficients are computed once. Terms sharing a variance and
// mean line are summed before the pairwise overlaps, as merge_prune would.
class DensityKernel {
   public:
    DensityKernel(const WaveFunction &mode1, const WaveFunction &mode2)
        : log_norms_(mode1.log_squared_norm() + mode2.log_squared_norm()) {
        const cplx i{0.0, 1.0};
        for (const auto &t1 : mode1.terms()) {
            for (const auto &t2 : mode2.terms()) {
                const cplx a1 = 1.0 / (2.0 * t1.variance);
                const cplx a2 = 1.0 / (2.0 * t2.variance);
                const cplx a22 = (a1 + a2) / 2.0;
                const cplx a12 = (a1 - a2) / 2.0;
                const cplx v = (t1.variance + t2.variance) / 2.0;
                const cplx s1 = (t1.mean + t2.mean) / kSqrt2;
                const cplx s2 = (t1.mean - t2.mean) / kSqrt2;
                const cplx slope = i * a12 * v / a22;
                Member m{t1.log_coeff + t2.log_coeff - 0.5 * std::log(a1 + a2), -i * s2,
                         -1.0 / (4.0 * a22) - a12 * a12 * v / (2.0 * a22 * a22)};
                group_for(v, s1, slope).members.push_back(m);
            }
        }
        for (const auto &g : groups_) {
            for (const auto &h : groups_) {
                const cplx vg = std::conj(g.variance);
                const cplx w = vg + h.variance;
                Pair p;
                p.k0 = 0.5 * std::log(2.0 * kPi * vg * h.variance / w);
                p.d0 = std::conj(g.mean0) - h.mean0;
                p.d1 = std::conj(g.slope) - h.slope;
                p.inv_2w = 1.0 / (2.0 * w);
                pairs_.push_back(p);
            }
        }
        scale_.resize(groups_.size());
        mantissa_.resize(groups_.size());
        exponents_.resize(pairs_.size());
    }

    double operator()(double r) {
        const std::size_t n = groups_.size();
        for (std::size_t g = 0; g < n; ++g) {
            const auto &members = groups_[g].members;
            double top = -std::numeric_limits<double>::infinity();
            for (const auto &m : members) {
                top = std::max(top, (m.l0 + r * (m.l1 + r * m.l2)).real());
            }
            cplx sum{0.0, 0.0};
            if (std::isfinite(top)) {
                for (const auto &m : members) {
                    sum += std::exp(m.l0 + r * (m.l1 + r * m.l2) - top);
                }
            }
            scale_[g] = top;
            mantissa_[g] = sum;
        }
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < n; ++g) {
            for (std::size_t h = 0; h < n; ++h) {
                const Pair &p = pairs_[g * n + h];
                const cplx d = p.d0 + r * p.d1;
                const cplx e = scale_[g] + scale_[h] + p.k0 - d * d * p.inv_2w;
                exponents_[g * n + h] = e;
                if (mantissa_[g] != 0.0 && mantissa_[h] != 0.0) {
                    top = std::max(top, e.real());
                }
            }
        }
        if (!std::isfinite(top)) {
            return 0.0;
        }
        cplx total{0.0, 0.0};
        for (std::size_t g = 0; g < n; ++g) {
            for (std::size_t h = 0; h < n; ++h) {
                if (mantissa_[g] != 0.0 && mantissa_[h] != 0.0) {
                    total += std::conj(mantissa_[g]) * mantissa_[h] * std::exp(exponents_[g * n + h] - top);
                }
            }
        }
        if (!(total.real() > 0.0)) {
            return 0.0;
        }
        return std::exp(top + std::log(total.real()) - log_norms_);
    }

   private:
    struct Member {
        cplx l0, l1, l2;
    };
    struct Group {
        cplx variance;
        cplx mean0;
        cplx slope;
        std::vector<Member> members;
    };
    struct Pair {
        cplx k0, d0, d1, inv_2w;
    };

    static bool close(cplx a, cplx b) {
        return std::abs(a - b) <= kMergeTolerance * std::max(1.0, std::abs(a));
    }

    Group &group_for(cplx variance, cplx mean0, cplx slope) {
        for (auto &g : groups_) {
            if (close(g.variance, variance) && close(g.mean0, mean0) && close(g.slope, slope)) {
                return g;
            }
        }
        groups_.push_back(Group{variance, mean0, slope, {}});
        return groups_.back();
    }

    double log_norms_;
    std::vector<Group> groups_;
    std::vector<Pair> pairs_;
    std::vector<double> scale_;
    std::vector<cplx> mantissa_;
    std::vector<cplx> exponents_;
};

// Cumulative integral at every node. Simpson over each pair of intervals; an odd node takes the
// first half of its panel's quadratic. n must be even.
std::vector<double> cumulative_simpson(const std::vector<double> &f, double h) {
    std::vector<double> c(f.size(), 0.0);
    for (std::size_t k = 2; k < f.size(); k += 2) {
        c[k - 1] = c[k - 2] + h / 12.0 * (5.0 * f[k - 2] + 8.0 * f[k - 1] - f[k]);
        c[k] = c[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
    }
    return c;
}

}  // namespace

OutcomeSampler::OutcomeSampler(WaveFunction mode1, WaveFunction mode2)
    : mode1_(std::move(mode1)), mode2_(std::move(mode2)) {
    if (mode1_.basis() != Basis::position || mode2_.basis() != Basis::position) {
        throw BasisMismatchError("sampler: inputs must be position-basis wave functions");
    }
    Window w = initial_window(mode1_, mode2_);
    DensityKernel f(mode1_, mode2_);

    for (int widen = 0; widen <= kMaxWidenings; ++widen) {
        std::size_t n = kInitialIntervals;
        std::vector<double> values(n + 1);
        double h = (w.hi - w.lo) / static_cast<double>(n);
        for (std::size_t k = 0; k <= n; ++k) {
            values[k] = f(w.lo + h * static_cast<double>(k));
        }
        bool converged = false;
        while (!converged) {
            if (2 * n > kMaxIntervals) {
                throw GridConstructionError("sampler: density grid did not converge");
            }
            std::vector<double> finer(2 * n + 1);
            const double hf = h / 2.0;
            for (std::size_t k = 0; k <= n; ++k) {
                finer[2 * k] = values[k];
            }
            for (std::size_t k = 0; k < n; ++k) {
                finer[2 * k + 1] = f(w.lo + hf * static_cast<double>(2 * k + 1));
            }
            // Compare the cumulative integrals of the two resolutions at the coarse nodes.
            const std::vector<double> coarse = cumulative_simpson(values, h);
            const std::vector<double> fine = cumulative_simpson(finer, hf);
            double worst = 0.0;
            for (std::size_t k = 0; k <= n; ++k) {
                worst = std::max(worst, std::abs(coarse[k] - fine[2 * k]));
            }
            converged = worst < kCdfTolerance;
            values = std::move(finer);
            n *= 2;
            h = hf;
        }

        std::vector<double> cdf = cumulative_simpson(values, h);
        const double mass = cdf.back();
        if (std::abs(mass - 1.0) <= kCdfTolerance) {
            mass_ = mass;
            grid_.resize(n + 1);
            for (std::size_t k = 0; k <= n; ++k) {
                grid_[k] = w.lo + h * static_cast<double>(k);
            }
            density_ = std::move(values);
            cdf_ = std::move(cdf);
            for (std::size_t k = 0; k <= n; ++k) {
                cdf_[k] = k == 0 ? 0.0 : std::max(cdf_[k] / mass, cdf_[k - 1]);
            }
            cdf_.back() = 1.0;
            return;
        }
        const double half = w.hi - w.lo;
        w.lo -= half / 2.0;
        w.hi += half / 2.0;
    }
    throw GridConstructionError("sampler: outcome window does not capture the density");
}

double OutcomeSampler::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t k = static_cast<std::size_t>(std::distance(cdf_.begin(), it));
    if (k == 0) {
        return grid_.front();
    }
    if (k >= cdf_.size()) {
        return grid_.back();
    }
    // Within the cell the density is taken as linear and rescaled to the cell's tabulated mass,
    // so the inverse CDF is the root of a quadratic in the offset t.
    const double h = grid_[k] - grid_[k - 1];
    const double f0 = density_[k - 1];
    const double f1 = density_[k];
    const double cell = cdf_[k] - cdf_[k - 1];
    const double linear = 0.5 * h * (f0 + f1);
    if (!(cell > 0.0) || !(linear > 0.0)) {
        return grid_[k - 1] + 0.5 * h;
    }
    const double target = (u - cdf_[k - 1]) / cell * linear;
    const double slope = (f1 - f0) / h;
    double t;
    if (std::abs(slope) * h <= 1e-12 * std::max(f0, 1e-300)) {
        t = target / f0;
    } else {
        const double disc = std::max(f0 * f0 + 2.0 * slope * target, 0.0);
        t = 2.0 * target / (f0 + std::sqrt(disc));
    }
    return grid_[k - 1] + std::clamp(t, 0.0, h);
}

double OutcomeSampler::draw(RngStream &rng) const {
    return quantile(rng.uniform());
}

HomodyneOutcome OutcomeSampler::outcome(double r) const {
    return breed_pair(mode1_, mode2_, r);
}

HomodyneOutcome sample_outcome(const WaveFunction &mode1, const WaveFunction &mode2, RngStream &rng) {
    OutcomeSampler sampler(mode1, mode2);
    return sampler.outcome(sampler.draw(rng));
}

}  // namespace gkpb
