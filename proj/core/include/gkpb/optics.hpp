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

#include <stdexcept>
#include <vector>

#include "gkpb/gaussian.hpp"
#include "gkpb/rng.hpp"

namespace gkpb {

/// Squeezed cat |-alpha> + |alpha>, squeezed by zeta. Both real.
struct CatSpec {
    double alpha = 0.0;
    double zeta = 0.0;
};

/// G(x, e^{-2 zeta}, -sqrt2 alpha e^{-zeta}) + G(x, e^{-2 zeta}, +sqrt2 alpha e^{-zeta}), unnormalized.
WaveFunction make_cat(const CatSpec &spec);

/// alpha = sqrt2^{m-1} sqrt(pi) e^zeta: puts the squeezed cat's peaks at +-sqrt2^m sqrt(pi).
double cat_amplitude(int m, double zeta);

/// Result of interfering two modes on a 50/50 beam splitter and reading p of mode 2.
struct HomodyneOutcome {
    double r = 0.0;
    /// Probability density of reading r, for normalized inputs.
    double density = 0.0;
    /// Unnormalized state of mode 1 given p2 = r. Empty if every branch cancelled.
    WaveFunction conditional;
};

/// The raw conditional state of mode 1, one term per input term pair, with no merging.
///
/// Beam splitter x1 -> (x1 + x2)/sqrt2, x2 -> (x1 - x2)/sqrt2, then projection of mode 2 onto
/// <p2 = r| with kernel exp(-i r x2) / sqrt(2 pi). For equal variances V at r = 0 each pair maps to
/// sqrt(V) G(x1, V, (mu1 + mu2)/sqrt2).
WaveFunction project_pair(const WaveFunction &mode1, const WaveFunction &mode2, double r);

/// project_pair followed by merging identical Gaussians, plus the outcome density.
HomodyneOutcome breed_pair(const WaveFunction &mode1, const WaveFunction &mode2, double r);

double outcome_density(const WaveFunction &mode1, const WaveFunction &mode2, double r);

struct GridConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Inverse-CDF sampler for the homodyne outcome of a fixed pair of inputs.
///
/// The density is tabulated on a uniform grid over [lo, hi]; the window starts at every pair's
/// outcome mean +- 10 standard deviations and widens until the tabulated mass is within 1e-6 of 1.
/// The grid is refined by halving until the cumulative Simpson integral moves by less than 1e-6 at
/// every node.
class OutcomeSampler {
   public:
    OutcomeSampler(WaveFunction mode1, WaveFunction mode2);

    /// Draws one outcome r. Consumes exactly one uniform from the stream.
    double draw(RngStream &rng) const;
    /// Maps u in [0, 1) to r.
    double quantile(double u) const;
    HomodyneOutcome outcome(double r) const;

    const std::vector<double> &grid() const { return grid_; }
    const std::vector<double> &density() const { return density_; }
    /// Simpson mass of the tabulated density before renormalization.
    double tabulated_mass() const { return mass_; }

   private:
    WaveFunction mode1_;
    WaveFunction mode2_;
    std::vector<double> grid_;
    std::vector<double> density_;
    std::vector<double> cdf_;
    double mass_ = 0.0;
};

HomodyneOutcome sample_outcome(const WaveFunction &mode1, const WaveFunction &mode2, RngStream &rng);

}  // namespace gkpb
