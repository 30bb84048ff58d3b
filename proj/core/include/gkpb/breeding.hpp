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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkpb/gaussian.hpp"

namespace gkpb {

/// Largest binomial-state order whose coefficients are tabulated.
inline constexpr int kMaxBinomialOrder = 20;

/// Comb of 2^m + 1 Gaussians with Pascal-row amplitudes.
struct BinomialSpec {
    int m = 1;
    double zeta = 0.0;
    /// Distance between adjacent peaks.
    double spacing = 2.0 * kSqrtPi;
};

/// log binom(2^m, n) for n = 0..2^m. Exact integers below 2^m = 128, long double recurrence above.
std::vector<double> log_pascal_row(int m);

/// sum_n binom(2^m, n) G(x, e^{-2 zeta}, spacing (n - 2^{m-1})), unnormalized.
WaveFunction binomial_state(const BinomialSpec &spec);

/// One breeding round: beam splitter, homodyne outcome r, then merge_prune with prune_tol.
WaveFunction breed_step(const WaveFunction &a, const WaveFunction &b, double r,
                        double prune_tol = kDefaultPruneTolerance);

enum class Policy {
    /// Every homodyne reading is taken to be exactly 0.
    postselect_exact_zero,
    /// Outcomes are sampled; |r| > window_epsilon rejects the node and its whole subtree is rebuilt.
    window,
    /// Outcomes are sampled and always kept.
    sample,
};

const char *policy_name(Policy policy);
Policy parse_policy(const std::string &name);

struct ProtocolConfig {
    int m_target = 1;
    double zeta = 1.9;
    /// Peak separation of the input cats. When unset, 2 sqrt2^{m_target} sqrt(pi), which makes the
    /// final spacing 2 sqrt(pi).
    std::optional<double> base_spacing;
    double window_epsilon = 0.1;
    double prune_tol = kDefaultPruneTolerance;
    std::uint64_t seed = 0;
    /// Number of subtree rebuilds the window policy may spend before giving up.
    int max_restarts = 1000;

    void validate() const;
    double initial_spacing() const;
    /// Cat amplitude producing initial_spacing() after squeezing.
    double cat_alpha() const;
};

struct BreedRecord {
    /// Tree level, 1 for the first beam splitter above the cats.
    int round = 0;
    /// Position of the node within its level.
    int node = 0;
    /// Attempt number at this node, counting restarts.
    int attempt = 0;
    double r = 0.0;
    bool accepted = false;
    double density = 0.0;
    /// Raw term-pair count of the conditional state, then the count after merge_prune.
    std::size_t terms_before = 0;
    std::size_t terms_after = 0;
    /// Cats consumed by the run so far, including this node's subtree.
    std::int64_t cats_consumed = 0;
};

struct ProtocolResult {
    WaveFunction state;
    std::vector<BreedRecord> records;
    std::int64_t cats_consumed = 0;
    int restarts = 0;
};

/// Thrown by the window policy when max_restarts is exhausted.
struct RejectedRunError : std::runtime_error {
    RejectedRunError(const std::string &what, std::vector<BreedRecord> records)
        : std::runtime_error(what), records(std::move(records)) {}
    std::vector<BreedRecord> records;
};

/// Runs a balanced breed tree of depth m_target over 2^{m_target} squeezed cats.
/// The random stream is (cfg.seed, stream).
ProtocolResult run_protocol(const ProtocolConfig &cfg, Policy policy, std::uint64_t stream = 0);

/// The r = 0 state every run approximates.
WaveFunction reference_state(const ProtocolConfig &cfg);

struct YieldStatistics {
    std::int64_t trials = 0;
    std::int64_t node_attempts = 0;
    std::int64_t node_acceptances = 0;
    /// node_acceptances / node_attempts and its binomial standard error.
    double acceptance = 0.0;
    double acceptance_stderr = 0.0;
    /// Acceptance per tree level (index 0 is round 1).
    std::vector<double> level_acceptance;
    double mean_cats = 0.0;
    double cats_stderr = 0.0;
    std::int64_t min_cats = 0;
    std::int64_t max_cats = 0;
    /// Trials that finished without a single rejection.
    std::int64_t first_attempt_successes = 0;
    /// Mean fidelity of the accepted outputs against reference_state(cfg).
    double mean_fidelity = 0.0;
};

/// Monte-Carlo estimate of the window policy's cost. Trial k uses stream k; results do not depend
/// on the thread count.
YieldStatistics yield_estimate(const ProtocolConfig &cfg, std::int64_t n_trials, unsigned threads = 0);

/// p-quadrature displacement by gain * r applied to a state bred with outcome r.
WaveFunction correction_hook(const WaveFunction &state, double r, double gain);

struct GainPoint {
    double gain = 0.0;
    double fidelity = 0.0;
};

/// Fidelity to `reference` of correction_hook(state, r, g) for each g in gains.
std::vector<GainPoint> correction_sweep(const WaveFunction &state, const WaveFunction &reference, double r,
                                        const std::vector<double> &gains);

}  // namespace gkpb
