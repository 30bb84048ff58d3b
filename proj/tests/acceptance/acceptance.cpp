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

// Runs the acceptance criteria end to end and prints one PASS/FAIL line for each.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "gkpb/breeding.hpp"
#include "gkpb/metrics.hpp"
#include "gkpb/optics.hpp"
#include "quadrature.hpp"

using namespace gkpb;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

fs::path scratch(const std::string &name) {
    const fs::path dir = fs::temp_directory_path() / ("gkpb_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path &path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string write_config(const fs::path &dir, const json &cfg) {
    const fs::path path = dir / "config.json";
    std::ofstream(path) << cfg.dump();
    return path.string();
}

int cli(std::vector<std::string> args, std::string *out = nullptr) {
    args.insert(args.begin(), "gkpb");
    std::vector<const char *> argv;
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream o;
    std::ostringstream e;
    const int code = gkpb::cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out != nullptr) {
        *out = o.str();
    }
    if (code != 0) {
        std::fprintf(stderr, "%s", e.str().c_str());
    }
    return code;
}

std::vector<std::vector<double>> parse_csv(const std::string &text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            // strtod, unlike stod, accepts subnormal values in the tails.
            row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        rows.push_back(row);
    }
    return rows;
}

double trapezoid(const std::vector<std::vector<double>> &rows, std::size_t col) {
    double s = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        s += 0.5 * (rows[k][col] + rows[k - 1][col]) * (rows[k][0] - rows[k - 1][0]);
    }
    return s;
}

/// (position, height) of the vertex of the parabola through ln(y) at k-1, k, k+1.
std::pair<double, double> log_parabola_peak(const std::vector<std::vector<double>> &rows, std::size_t k,
                                            std::size_t col) {
    const double h = rows[k + 1][0] - rows[k][0];
    const double a = std::log(rows[k - 1][col]);
    const double b = std::log(rows[k][col]);
    const double c = std::log(rows[k + 1][col]);
    const double shift = 0.5 * (a - c) / (a - 2 * b + c);
    const double top = b - 0.25 * (a - c) * shift;
    return {rows[k][0] + shift * h, std::exp(top)};
}

std::vector<std::pair<double, double>> sorted_terms(const json &dump) {
    std::vector<std::pair<double, double>> peaks;
    for (const auto &t : dump["terms"]) {
        peaks.emplace_back(t["mean_re"].get<double>(), t["log_coeff_re"].get<double>());
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

Outcome closed_form_reduction() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double v = 0.05 + 2.0 * u(rng);
        const double m1 = 10.0 * (2 * u(rng) - 1);
        const double m2 = 10.0 * (2 * u(rng) - 1);
        const cplx c1 = std::polar(0.2 + u(rng), 2 * kPi * u(rng));
        const cplx c2 = std::polar(0.2 + u(rng), 2 * kPi * u(rng));
        const WaveFunction a({GaussianTerm::from_coeff(c1, v, m1)});
        const WaveFunction b({GaussianTerm::from_coeff(c2, v, m2)});
        const HomodyneOutcome out = breed_pair(a, b, 0.0);
        if (out.conditional.size() != 1) {
            return {false, "merged to " + std::to_string(out.conditional.size()) + " terms"};
        }
        const GaussianTerm &t = out.conditional.terms()[0];
        const cplx want_c = c1 * c2 * std::sqrt(v);
        const double want_mean = (m1 + m2) / kSqrt2;
        worst = std::max({worst, std::abs(t.coeff() - want_c) / std::abs(want_c), std::abs(t.variance - v) / v,
                          std::abs(t.mean - want_mean) / std::max(std::abs(want_mean), 1.0)});
    }
    return {worst <= 1e-12, "max rel err " + num(worst)};
}

Outcome vandermonde() {
    double worst = 0.0;
    double spacing_err = 0.0;
    for (int m = 1; m <= 3; ++m) {
        const double spacing = 2 * kSqrtPi;
        const WaveFunction bm = binomial_state({m, 1.9, spacing});
        std::vector<std::pair<double, double>> peaks;
        const WaveFunction bred = breed_step(bm, bm, 0.0);
        for (const auto &t : bred.terms()) {
            peaks.emplace_back(t.mean.real(), t.log_coeff.real());
        }
        std::sort(peaks.begin(), peaks.end());
        const auto row = log_pascal_row(m + 1);
        if (peaks.size() != row.size()) {
            return {false, "m=" + std::to_string(m) + " gave " + std::to_string(peaks.size()) + " peaks"};
        }
        for (std::size_t q = 0; q < row.size(); ++q) {
            worst = std::max(worst, std::abs(std::exp(peaks[q].second - peaks[0].second - row[q]) - 1.0));
            if (q > 0) {
                const double gap = peaks[q].first - peaks[q - 1].first;
                spacing_err = std::max(spacing_err, std::abs(gap / (spacing / kSqrt2) - 1.0));
            }
        }
    }
    return {worst <= 1e-12 && spacing_err <= 1e-12,
            "coeff rel err " + num(worst) + ", spacing rel err " + num(spacing_err)};
}

Outcome gkp_curve() {
    std::string csv;
    if (cli({"gkp", "--delta", "0.15", "--kappa", "0.15", "--grid", "-8,8,1601"}, &csv) != 0) {
        return {false, "gkp command failed"};
    }
    const auto rows = parse_csv(csv);
    const double step = rows[1][0] - rows[0][0];
    const double kappa = 0.15;
    std::vector<std::pair<double, double>> maxima;
    for (std::size_t k = 1; k + 1 < rows.size(); ++k) {
        if (rows[k][1] > rows[k - 1][1] && rows[k][1] >= rows[k + 1][1] && rows[k][1] > 1e-3) {
            maxima.push_back(log_parabola_peak(rows, k, 1));
        }
    }
    if (maxima.size() != 5) {
        return {false, std::to_string(maxima.size()) + " local maxima instead of 5"};
    }
    double pos_err = 0.0;
    double ratio_err = 0.0;
    for (int s = -2; s <= 2; ++s) {
        const auto &[x, height] = maxima[s + 2];
        pos_err = std::max(pos_err, std::abs(x - 2 * s * kSqrtPi));
        const double want = std::exp(-std::pow(2 * s * kappa * kSqrtPi, 2) / 2);
        ratio_err = std::max(ratio_err, std::abs(height / maxima[2].second - want));
    }
    return {pos_err <= step && ratio_err <= 1e-6, "max position err " + num(pos_err) + ", ratio err " + num(ratio_err)};
}

Outcome first_round() {
    const fs::path dir = scratch("fig2");
    const std::string cfg = write_config(dir, {{"m_target", 1}, {"zeta", 1.9}});
    if (cli({"breed", "--config", cfg, "--policy", "exact-zero", "--out", (dir / "breed").string()}) != 0) {
        return {false, "breed command failed"};
    }
    const auto peaks = sorted_terms(json::parse(slurp(dir / "breed" / "terms.json")));
    if (peaks.size() != 3) {
        return {false, std::to_string(peaks.size()) + " terms instead of 3"};
    }
    double err = 0.0;
    const double want_ratio[] = {1.0, 2.0, 1.0};
    for (int k = 0; k < 3; ++k) {
        err = std::max(err, std::abs(peaks[k].first - 2 * kSqrtPi * (k - 1)));
        err = std::max(err, std::abs(std::exp(peaks[k].second - peaks[0].second) - want_ratio[k]));
    }
    // The emitted curve shows the same three maxima.
    const auto state = parse_csv(slurp(dir / "breed" / "state.csv"));
    std::vector<double> heights;
    for (std::size_t k = 1; k + 1 < state.size(); ++k) {
        if (state[k][1] > state[k - 1][1] && state[k][1] >= state[k + 1][1] && state[k][1] > 1e-3) {
            heights.push_back(log_parabola_peak(state, k, 1).second);
        }
    }
    if (heights.size() != 3) {
        return {false, std::to_string(heights.size()) + " maxima on the curve"};
    }
    err = std::max({err, std::abs(heights[1] / heights[0] - 2.0), std::abs(heights[2] / heights[0] - 1.0)});

    std::string density;
    if (cli({"density", "--config", cfg}, &density) != 0) {
        return {false, "density command failed"};
    }
    const auto rows = parse_csv(density);
    const double mass = trapezoid(rows, 1);
    double odd = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        odd = std::max(odd, std::abs(rows[k][1] - rows[rows.size() - 1 - k][1]));
    }
    const json summary = json::parse(slurp(dir / "breed" / "summary.json"));
    const double db = summary["squeezing_db"].get<double>();
    const bool db_ok = std::abs(db - -16.50) < 5e-3;
    return {err <= 1e-9 && std::abs(mass - 1.0) <= 1e-4 && odd <= 1e-10 && db_ok,
            "peak err " + num(err) + ", density mass " + num(mass) + ", asymmetry " + num(odd) + ", " +
                num(db) + " dB"};
}

Outcome third_round() {
    const fs::path dir = scratch("fig3");
    const std::string cfg = write_config(dir, {{"m_target", 3}, {"zeta", 1.9}});
    if (cli({"breed", "--config", cfg, "--policy", "exact-zero", "--out", (dir / "breed").string()}) != 0) {
        return {false, "breed command failed"};
    }
    const json summary = json::parse(slurp(dir / "breed" / "summary.json"));
    const auto peaks = sorted_terms(json::parse(slurp(dir / "breed" / "terms.json")));
    const std::int64_t cats = summary["cats_consumed"].get<std::int64_t>();
    const double alpha = summary["cat_alpha"].get<double>();
    const double alpha_err = std::abs(alpha / (2 * kSqrtPi * std::exp(1.9)) - 1.0);
    if (peaks.size() != 9) {
        return {false, std::to_string(peaks.size()) + " terms instead of 9"};
    }
    const double outer = std::max(std::abs(peaks.front().first + 8 * kSqrtPi), std::abs(peaks.back().first - 8 * kSqrtPi));
    const double ratio = std::exp(peaks.front().second - peaks[4].second);
    const double ratio_err = std::abs(ratio * 70.0 - 1.0);
    return {cats == 8 && alpha_err <= 1e-12 && outer <= 1e-12 && ratio_err <= 1e-12,
            std::to_string(cats) + " cats, alpha rel err " + num(alpha_err) + ", outer peak err " + num(outer) +
                ", ratio 1/" + num(1.0 / ratio)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto random_state = [&](int n) {
        std::vector<GaussianTerm> terms;
        for (int k = 0; k < n; ++k) {
            const double vr = 0.05 + 1.5 * u(rng);
            const cplx v{vr, 0.4 * vr * (2 * u(rng) - 1)};
            const double mu = 6.0 * (2 * u(rng) - 1);
            terms.push_back(GaussianTerm::from_coeff(std::polar(0.2 + u(rng), 2 * kPi * u(rng)), v, mu));
        }
        return WaveFunction(std::move(terms));
    };
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const WaveFunction a = random_state(1 + k % 3);
        const WaveFunction b = random_state(1 + (k + 1) % 3);
        const double r = 2.0 * (2 * u(rng) - 1);
        const WaveFunction cond = breed_pair(a, b, r).conditional;
        std::vector<cplx> got;
        std::vector<cplx> want;
        double scale = 0.0;
        for (const auto &peak : oracle::peaks_of(cond)) {
            for (double s : {-1.5, -0.5, 0.0, 0.5, 1.5}) {
                const double x = peak.centre + s * peak.sigma;
                got.push_back(evaluate(cond, x));
                want.push_back(oracle::projection_at(a, b, r, x));
                scale = std::max(scale, std::abs(want.back()));
            }
        }
        for (std::size_t j = 0; j < got.size(); ++j) {
            if (std::abs(want[j]) >= 1e-3 * scale) {
                worst = std::max(worst, std::abs(got[j] - want[j]) / std::abs(want[j]));
            }
        }
    }
    return {worst <= 1e-8, "max pointwise rel err " + num(worst)};
}

Outcome shift_error_proxy() {
    const WaveFunction target = gkp_target({0.15, 0.15, 0, std::nullopt});
    const double px = no_error_probability(target, Quadrature::x);
    const double pp = no_error_probability(target, Quadrature::p);
    return {px * pp >= 0.98, "P_x " + num(px) + " * P_p " + num(pp) + " = " + num(px * pp)};
}

Outcome yield_property() {
    bool exact = true;
    std::string detail;
    for (int m = 1; m <= 3; ++m) {
        ProtocolConfig cfg;
        cfg.m_target = m;
        cfg.window_epsilon = 1e6;
        const YieldStatistics s = yield_estimate(cfg, m < 3 ? 200 : 50);
        exact = exact && s.mean_cats == std::ldexp(1.0, m) && s.min_cats == s.max_cats;
    }
    detail = exact ? "huge window costs 2^m cats" : "huge window cat count differs from 2^m";

    ProtocolConfig cfg;
    cfg.m_target = 1;
    cfg.window_epsilon = 0.1;
    cfg.seed = 31337;
    const YieldStatistics s = yield_estimate(cfg, 10000);
    const auto [a, b] = gkpb::cli::root_inputs(cfg);
    const int n = 2000;
    double mass = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double r = -cfg.window_epsilon + 2 * cfg.window_epsilon * k / n;
        mass += (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0)) * outcome_density(a, b, r);
    }
    mass *= 2 * cfg.window_epsilon / n / 3.0;
    const double sigma = std::sqrt(mass * (1 - mass) / static_cast<double>(s.node_attempts));
    const double z = (s.acceptance - mass) / sigma;
    return {exact && std::abs(z) <= 3.0,
            detail + "; acceptance " + num(s.acceptance) + " vs window mass " + num(mass) + " (" + num(z) + " sigma)"};
}

Outcome determinism() {
    const fs::path dir = scratch("determinism");
    const std::string cfg = write_config(dir, {{"m_target", 2}, {"zeta", 1.9}, {"window_epsilon", 0.3}, {"seed", 12345}});
    const std::string exe = GKPB_CLI_PATH;
    std::vector<std::string> differing;
    std::size_t compared = 0;
    for (const char *run : {"a", "b"}) {
        const fs::path out = dir / run;
        const std::string cmds[] = {
            exe + " breed --policy window --config " + cfg + " --out " + (out / "breed").string(),
            exe + " breed --policy sample --config " + cfg + " --out " + (out / "sample_policy").string(),
            exe + " density --config " + cfg + " --out " + (out / "density").string(),
            exe + " sample --config " + cfg + " --draws 500 --trials 20 --out " + (out / "sample").string(),
            exe + " gkp --out " + (out / "gkp").string(),
        };
        for (const auto &c : cmds) {
            if (std::system((c + " > /dev/null").c_str()) != 0) {
                return {false, "command failed: " + c};
            }
        }
    }
    for (const auto &entry : fs::recursive_directory_iterator(dir / "a")) {
        if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") {
            continue;
        }
        const fs::path twin = dir / "b" / fs::relative(entry.path(), dir / "a");
        ++compared;
        if (slurp(entry.path()) != slurp(twin)) {
            differing.push_back(fs::relative(entry.path(), dir / "a").string());
        }
    }
    return {differing.empty() && compared > 0,
            std::to_string(compared) + " files compared, " + std::to_string(differing.size()) + " differ"};
}

struct Criterion {
    int id;
    const char *name;
    double time_limit;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "equal-variance merge reduction", 1.0, closed_form_reduction},
        {2, "Pascal rows and spacing contraction", 1.0, vandermonde},
        {3, "GKP curve peaks and envelope", 1.0, gkp_curve},
        {4, "first breeding round", 5.0, first_round},
        {5, "third breeding round", 10.0, third_round},
        {6, "general outcome vs quadrature", 60.0, oracle_equivalence},
        {7, "shift-error window product", 1.0, shift_error_proxy},
        {8, "window-policy yield", 60.0, yield_property},
        {9, "byte-identical reruns", 1e9, determinism},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.time_limit;
        const bool pass = o.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %d: %s: %s; %.3f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    seconds, in_time ? "" : " (over time limit)");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
