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

#include <atomic>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gkpb {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kSqrtPi = 1.77245385090551602729816748334114518;
inline constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

/// Absolute tolerance on (variance, mean) under which two terms are considered the same Gaussian.
inline constexpr double kMergeTolerance = 1e-12;
/// Default relative coefficient threshold used when pruning.
inline constexpr double kDefaultPruneTolerance = 1e-14;
/// Squared norms below this are treated as zero.
inline constexpr double kDegenerateNorm = 1e-300;

/// Quadrature basis a wave function is written in.
enum class Basis { position, momentum };

const char *basis_name(Basis basis);
Basis parse_basis(const std::string &name);

struct BasisMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when a state has (numerically) zero norm, e.g. after exact cancellation.
struct DegenerateStateError : std::domain_error {
    using std::domain_error::domain_error;
};

/// One complex-weighted Gaussian  coeff * exp(-(q - mean)^2 / (2 variance)).
///
/// The amplitude is kept as its logarithm. Fourier images of narrow peaks far from the origin carry
/// amplitudes like exp(-4000) paired with exponents of the opposite size; storing log(coeff) keeps
/// both representable.
struct GaussianTerm {
    cplx log_coeff{0.0, 0.0};
    cplx variance{1.0, 0.0};
    cplx mean{0.0, 0.0};

    static GaussianTerm from_coeff(cplx coeff, cplx variance, cplx mean);

    cplx coeff() const;
    /// log of this term's value at q.
    cplx log_value(double q) const;
    cplx value(double q) const;
};

/// A value m * exp(log_scale), used where sums of many terms would overflow a double.
struct ScaledComplex {
    cplx mantissa{0.0, 0.0};
    double log_scale = 0.0;

    /// Collapses to a plain complex number (may overflow to inf or underflow to 0).
    cplx value() const;
    /// log|value|, -inf for zero.
    double log_abs() const;
};

/// Adds exp(l) for every l in `logs` without overflow.
ScaledComplex sum_exp(const std::vector<cplx> &logs);

/// A finite superposition of Gaussians in one quadrature basis. Stored unnormalized.
///
/// Immutable after construction. The squared norm is computed lazily and cached; concurrent first
/// reads may both compute it, which is harmless because the computation is deterministic.
class WaveFunction {
   public:
    WaveFunction() = default;
    explicit WaveFunction(std::vector<GaussianTerm> terms, Basis basis = Basis::position);

    WaveFunction(const WaveFunction &other);
    WaveFunction(WaveFunction &&other) noexcept;
    WaveFunction &operator=(const WaveFunction &other);
    WaveFunction &operator=(WaveFunction &&other) noexcept;

    const std::vector<GaussianTerm> &terms() const { return terms_; }
    Basis basis() const { return basis_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// log of the squared L2 norm; -inf for an empty state.
    double log_squared_norm() const;
    double squared_norm() const;

   private:
    std::vector<GaussianTerm> terms_;
    Basis basis_ = Basis::position;
    mutable std::atomic<double> log_norm2_cache_{kNotComputed};

    static constexpr double kNotComputed = 1.0e308;
};

/// G(q, variance, mean) with unit coefficient.
WaveFunction gaussian(double variance, double mean, Basis basis = Basis::position);
/// The unnormalized vacuum G(q, 1, 0).
WaveFunction vacuum(Basis basis = Basis::position);

/// Sum of coeff_i * exp(-(q - mean_i)^2 / (2 V_i)).
cplx evaluate(const WaveFunction &psi, double q);

/// <psi|phi> = integral of conj(psi(q)) phi(q) dq, closed form.
cplx inner_product(const WaveFunction &psi, const WaveFunction &phi);
ScaledComplex inner_product_scaled(const WaveFunction &psi, const WaveFunction &phi);

/// Overlap of two single terms, as a logarithm.
cplx log_overlap(const GaussianTerm &a, const GaussianTerm &b);

WaveFunction normalize(const WaveFunction &psi);

/// Applies psi~(p) = (2 pi)^{-1/2} * integral exp(-i p q) psi(q) dq and flips the basis tag.
/// Applying it twice gives psi(-q).
WaveFunction fourier(const WaveFunction &psi);

/// psi(q) -> s^{-1/2} psi(q / s). Squeezing by zeta is scale(psi, exp(-zeta)).
WaveFunction scale(const WaveFunction &psi, double s);

/// Phase-space displacement psi(x) -> exp(i dp x) psi(x - dx).
///
/// Defined for both bases so that fourier(displace(psi, dx, dp)) == displace(fourier(psi), dx, dp)
/// for position-basis psi.
WaveFunction displace(const WaveFunction &psi, double dx, double dp);

/// Multiplies the wave function by exp(i k q) in its own basis.
WaveFunction modulate(const WaveFunction &psi, double k);

struct MergeReport {
    WaveFunction state;
    /// (sum of norms of pruned or cancelled terms) / norm of the input. The relative change of the
    /// squared norm is at most 2 r + r^2 for this ratio r.
    double dropped_norm_ratio = 0.0;
    std::size_t merged = 0;
    std::size_t pruned = 0;
    /// True when nothing survived (exact cancellation).
    bool degenerate = false;
};

/// Sums terms with the same (variance, mean) and drops terms whose |coeff| is below tol times the
/// largest |coeff|. Term order follows the first occurrence of each distinct Gaussian.
MergeReport merge_prune(const WaveFunction &psi, double tol = kDefaultPruneTolerance);

}  // namespace gkpb
