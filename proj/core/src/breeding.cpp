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

#include "gkpb/breeding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "gkpb/metrics.hpp"
#include "gkpb/optics.hpp"
#include "gkpb/rng.hpp"

namespace gkpb {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr int kMaxProtocolDepth = 16;
constexpr int kYieldRestartBudget = 1'000'000;

class TreeRunner {
   public:
    TreeRunner(const ProtocolConfig &cfg, Policy policy, std::uint64_t stream,
               std::shared_ptr<const OutcomeSampler> cat_sampler)
        : cfg_(cfg),
          policy_(policy),
          rng_(cfg.seed, stream),
          cat_(make_cat({cfg.cat_alpha(), cfg.zeta})),
          cat_sampler_(std::move(cat_sampler)) {}

    ProtocolResult run() {
        ProtocolResult result;
        result.state = build(cfg_.m_target, 0);
        result.records = std::move(records_);
        result.cats_consumed = cats_;
        result.restarts = restarts_;
        return result;
    }

   private:
    WaveFunction build(int level, int node) {
        if (level == 0) {
            ++cats_;
            return cat_;
        }
        if (policy_ == Policy::postselect_exact_zero) {
            return build_exact(level, node);
        }
        for (int attempt = 0;; ++attempt) {
            const WaveFunction a = build(level - 1, 2 * node);
            const WaveFunction b = build(level - 1, 2 * node + 1);
            double r;
            if (level == 1 && cat_sampler_) {
                r = cat_sampler_->draw(rng_);
            } else {
                r = OutcomeSampler(a, b).draw(rng_);
            }
            const bool accepted = policy_ == Policy::sample || std::abs(r) <= cfg_.window_epsilon;
            HomodyneOutcome outcome = breed_pair(a, b, r);
            BreedRecord rec{level, node, attempt, r, accepted, outcome.density, a.size() * b.size(), 0, cats_};
            if (accepted) {
                WaveFunction state = finish(outcome);
                rec.terms_after = state.size();
                records_.push_back(rec);
                return state;
            }
            records_.push_back(rec);
            if (++restarts_ > cfg_.max_restarts) {
                throw RejectedRunError("window policy exhausted its restart budget", std::move(records_));
            }
        }
    }

    // Nodes of one level are identical under exact post-selection; each level is bred once and
    // its cat cost replayed for the sibling subtrees.
    WaveFunction build_exact(int level, int node) {
        if (static_cast<int>(exact_levels_.size()) < level) {
            const WaveFunction a = build(level - 1, 2 * node);
            const WaveFunction b = build(level - 1, 2 * node + 1);
            HomodyneOutcome outcome = breed_pair(a, b, 0.0);
            WaveFunction state = finish(outcome);
            records_.push_back(
                BreedRecord{level, node, 0, 0.0, true, outcome.density, a.size() * b.size(), state.size(), cats_});
            exact_levels_.push_back({state, records_.back()});
            return state;
        }
        replay(level, node);
        return exact_levels_[static_cast<std::size_t>(level - 1)].first;
    }

    void replay(int level, int node) {
        if (level == 0) {
            ++cats_;
            return;
        }
        replay(level - 1, 2 * node);
        replay(level - 1, 2 * node + 1);
        BreedRecord rec = exact_levels_[static_cast<std::size_t>(level - 1)].second;
        rec.node = node;
        rec.cats_consumed = cats_;
        records_.push_back(rec);
    }

    WaveFunction finish(const HomodyneOutcome &outcome) const {
        MergeReport report = merge_prune(outcome.conditional, cfg_.prune_tol);
        if (report.degenerate) {
            throw DegenerateStateError("breeding produced a state with zero norm");
        }
        return std::move(report.state);
    }

    const ProtocolConfig &cfg_;
    Policy policy_;
    RngStream rng_;
    WaveFunction cat_;
    std::shared_ptr<const OutcomeSampler> cat_sampler_;
    std::vector<BreedRecord> records_;
    std::vector<std::pair<WaveFunction, BreedRecord>> exact_levels_;
    std::int64_t cats_ = 0;
    int restarts_ = 0;
};

}  // namespace

std::vector<double> log_pascal_row(int m) {
    if (m < 0 || m > kMaxBinomialOrder) {
        throw std::invalid_argument("binomial order must be in [0, " + std::to_string(kMaxBinomialOrder) + "]");
    }
    const std::size_t n = std::size_t{1} << m;
    std::vector<double> out(n + 1);
    if (n <= 128) {
        std::vector<u128> row{1};
        for (std::size_t k = 1; k <= n; ++k) {
            std::vector<u128> next(k + 1, 1);
            for (std::size_t j = 1; j < k; ++j) {
                next[j] = row[j - 1] + row[j];
            }
            row = std::move(next);
        }
        for (std::size_t j = 0; j <= n; ++j) {
            out[j] = static_cast<double>(std::log(static_cast<long double>(row[j])));
        }
        return out;
    }
    // Compensated long double sum of log((n - j) / (j + 1)).
    long double sum = 0.0L;
    long double carry = 0.0L;
    out[0] = 0.0;
    for (std::size_t j = 0; j < n / 2; ++j) {
        const long double step =
            std::log(static_cast<long double>(n - j)) - std::log(static_cast<long double>(j + 1));
        const long double y = step - carry;
        const long double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        out[j + 1] = static_cast<double>(sum);
    }
    for (std::size_t j = n / 2 + 1; j <= n; ++j) {
        out[j] = out[n - j];
    }
    return out;
}

WaveFunction binomial_state(const BinomialSpec &spec) {
    if (!(spec.spacing > 0.0) || !std::isfinite(spec.zeta)) {
        throw std::invalid_argument("binomial_state: spacing must be positive and zeta finite");
    }
    const std::vector<double> logs = log_pascal_row(spec.m);
    const double v = std::exp(-2.0 * spec.zeta);
    const double centre = std::ldexp(1.0, spec.m - 1);
    std::vector<GaussianTerm> terms;
    terms.reserve(logs.size());
    for (std::size_t n = 0; n < logs.size(); ++n) {
        terms.push_back(GaussianTerm{{logs[n], 0.0}, v, spec.spacing * (static_cast<double>(n) - centre)});
    }
    return WaveFunction(std::move(terms));
}

WaveFunction breed_step(const WaveFunction &a, const WaveFunction &b, double r, double prune_tol) {
    MergeReport report = merge_prune(project_pair(a, b, r), prune_tol);
    if (report.degenerate) {
        throw DegenerateStateError("breed_step: every branch cancelled");
    }
    return std::move(report.state);
}

const char *policy_name(Policy policy) {
    switch (policy) {
        case Policy::postselect_exact_zero:
            return "exact-zero";
        case Policy::window:
            return "window";
        case Policy::sample:
            return "sample";
    }
    return "?";
}

Policy parse_policy(const std::string &name) {
    if (name == "exact-zero" || name == "postselect_exact_zero") {
        return Policy::postselect_exact_zero;
    }
    if (name == "window") {
        return Policy::window;
    }
    if (name == "sample") {
        return Policy::sample;
    }
    throw std::invalid_argument("unknown policy '" + name + "'");
}

void ProtocolConfig::validate() const {
    if (m_target < 1 || m_target > kMaxProtocolDepth) {
        throw std::invalid_argument("m_target must be in [1, " + std::to_string(kMaxProtocolDepth) + "]");
    }
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
        throw std::invalid_argument("zeta must be finite and non-negative");
    }
    if (base_spacing && !(*base_spacing > 0.0 && std::isfinite(*base_spacing))) {
        throw std::invalid_argument("base_spacing must be positive");
    }
    if (!(window_epsilon >= 0.0)) {
        throw std::invalid_argument("window_epsilon must be non-negative");
    }
    if (!(prune_tol >= 0.0)) {
        throw std::invalid_argument("prune_tol must be non-negative");
    }
    if (max_restarts < 0) {
        throw std::invalid_argument("max_restarts must be non-negative");
    }
}

double ProtocolConfig::initial_spacing() const {
    return base_spacing.value_or(2.0 * std::pow(kSqrt2, m_target) * kSqrtPi);
}

double ProtocolConfig::cat_alpha() const {
    return initial_spacing() * std::exp(zeta) / (2.0 * kSqrt2);
}

ProtocolResult run_protocol(const ProtocolConfig &cfg, Policy policy, std::uint64_t stream) {
    cfg.validate();
    std::shared_ptr<const OutcomeSampler> cat_sampler;
    if (policy != Policy::postselect_exact_zero) {
        const WaveFunction cat = make_cat({cfg.cat_alpha(), cfg.zeta});
        cat_sampler = std::make_shared<const OutcomeSampler>(cat, cat);
    }
    return TreeRunner(cfg, policy, stream, std::move(cat_sampler)).run();
}

WaveFunction reference_state(const ProtocolConfig &cfg) {
    return run_protocol(cfg, Policy::postselect_exact_zero).state;
}

YieldStatistics yield_estimate(const ProtocolConfig &cfg, std::int64_t n_trials, unsigned threads) {
    cfg.validate();
    if (!(cfg.window_epsilon > 0.0)) {
        throw std::invalid_argument("yield_estimate: window_epsilon must be positive");
    }
    if (n_trials < 1) {
        throw std::invalid_argument("yield_estimate: n_trials must be at least 1");
    }
    ProtocolConfig trial_cfg = cfg;
    trial_cfg.max_restarts = kYieldRestartBudget;

    const WaveFunction reference = reference_state(cfg);
    const WaveFunction cat = make_cat({cfg.cat_alpha(), cfg.zeta});
    const auto cat_sampler = std::make_shared<const OutcomeSampler>(cat, cat);

    struct Trial {
        std::int64_t cats = 0;
        bool clean = false;
        double fidelity = 0.0;
        std::vector<std::int64_t> attempts;
        std::vector<std::int64_t> accepted;
    };
    std::vector<Trial> trials(static_cast<std::size_t>(n_trials));
    std::atomic<std::int64_t> next{0};

    auto worker = [&] {
        for (std::int64_t k = next++; k < n_trials; k = next++) {
            ProtocolResult res =
                TreeRunner(trial_cfg, Policy::window, static_cast<std::uint64_t>(k), cat_sampler).run();
            Trial &t = trials[static_cast<std::size_t>(k)];
            t.cats = res.cats_consumed;
            t.clean = res.restarts == 0;
            t.fidelity = fidelity(res.state, reference);
            t.attempts.assign(static_cast<std::size_t>(cfg.m_target), 0);
            t.accepted.assign(static_cast<std::size_t>(cfg.m_target), 0);
            for (const auto &rec : res.records) {
                const auto level = static_cast<std::size_t>(rec.round - 1);
                ++t.attempts[level];
                t.accepted[level] += rec.accepted ? 1 : 0;
            }
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, n_trials));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    YieldStatistics stats;
    stats.trials = n_trials;
    std::vector<std::int64_t> level_attempts(static_cast<std::size_t>(cfg.m_target), 0);
    std::vector<std::int64_t> level_accepted(static_cast<std::size_t>(cfg.m_target), 0);
    double cats_sum = 0.0;
    double cats_sq = 0.0;
    double fid_sum = 0.0;
    stats.min_cats = trials.front().cats;
    stats.max_cats = trials.front().cats;
    for (const auto &t : trials) {
        for (std::size_t l = 0; l < level_attempts.size(); ++l) {
            level_attempts[l] += t.attempts[l];
            level_accepted[l] += t.accepted[l];
        }
        cats_sum += static_cast<double>(t.cats);
        cats_sq += static_cast<double>(t.cats) * static_cast<double>(t.cats);
        fid_sum += t.fidelity;
        stats.min_cats = std::min(stats.min_cats, t.cats);
        stats.max_cats = std::max(stats.max_cats, t.cats);
        stats.first_attempt_successes += t.clean ? 1 : 0;
    }
    for (std::size_t l = 0; l < level_attempts.size(); ++l) {
        stats.node_attempts += level_attempts[l];
        stats.node_acceptances += level_accepted[l];
        stats.level_acceptance.push_back(static_cast<double>(level_accepted[l]) /
                                         static_cast<double>(level_attempts[l]));
    }
    const double n = static_cast<double>(n_trials);
    const double attempts = static_cast<double>(stats.node_attempts);
    stats.acceptance = static_cast<double>(stats.node_acceptances) / attempts;
    stats.acceptance_stderr = std::sqrt(stats.acceptance * (1.0 - stats.acceptance) / attempts);
    stats.mean_cats = cats_sum / n;
    const double var = n > 1.0 ? std::max(0.0, (cats_sq - cats_sum * cats_sum / n) / (n - 1.0)) : 0.0;
    stats.cats_stderr = std::sqrt(var / n);
    stats.mean_fidelity = fid_sum / n;
    return stats;
}

WaveFunction correction_hook(const WaveFunction &state, double r, double gain) {
    return displace(state, 0.0, gain * r);
}

std::vector<GainPoint> correction_sweep(const WaveFunction &state, const WaveFunction &reference, double r,
                                        const std::vector<double> &gains) {
    std::vector<GainPoint> out;
    out.reserve(gains.size());
    for (double g : gains) {
        out.push_back({g, fidelity(correction_hook(state, r, g), reference)});
    }
    return out;
}

}  // namespace gkpb
