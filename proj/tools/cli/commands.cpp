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

#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>

#include "CLI11.hpp"
#include "gkpb/metrics.hpp"
#include "gkpb/optics.hpp"
#include "gkpb/version.hpp"

namespace gkpb::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Collects the files one command writes and finishes with manifest.json.
class Artifacts {
   public:
    Artifacts(std::string command, std::string dir)
        : command_(std::move(command)), dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
        if (!dir_.empty()) {
            std::error_code ec;
            fs::create_directories(dir_, ec);
            if (ec) {
                throw std::runtime_error("cannot create output directory '" + dir_ + "': " + ec.message());
            }
        }
    }

    bool enabled() const { return !dir_.empty(); }

    void write(const std::string &name, const std::string &body) {
        const fs::path path = fs::path(dir_) / name;
        std::ofstream f(path, std::ios::binary);
        f << body;
        if (!f) {
            throw std::runtime_error("cannot write '" + path.string() + "'");
        }
        files_.push_back(path.string());
    }

    void finish(const json &config, std::optional<std::uint64_t> seed) {
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json manifest = {
            {"command", command_},
            {"version", kVersion},
            {"config", config},
            {"seed", seed ? json(*seed) : json(nullptr)},
            {"outputs", files_},
            {"duration_seconds", seconds},
        };
        write("manifest.json", manifest.dump(2) + "\n");
    }

   private:
    std::string command_;
    std::string dir_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> files_;
};

ProtocolConfig resolve_config(const std::string &path) {
    ProtocolConfig cfg = path.empty() ? ProtocolConfig{} : load_protocol_config(path);
    if (auto seed = seed_from_env(std::getenv("GKPB_SEED"))) {
        cfg.seed = *seed;
    }
    cfg.validate();
    return cfg;
}

Grid grid_option(const std::string &text) {
    try {
        return parse_grid(text);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
}

json peak_table(const WaveFunction &psi) {
    double biggest = -std::numeric_limits<double>::infinity();
    for (const auto &t : psi.terms()) {
        biggest = std::max(biggest, t.log_coeff.real());
    }
    std::vector<std::pair<double, double>> rows;
    for (const auto &t : psi.terms()) {
        rows.emplace_back(t.mean.real(), std::exp(t.log_coeff.real() - biggest));
    }
    std::sort(rows.begin(), rows.end());
    json out = json::array();
    for (const auto &[x, w] : rows) {
        out.push_back({{"x", x}, {"relative_weight", w}});
    }
    return out;
}

std::string density_csv(const WaveFunction &a, const WaveFunction &b, const Grid &grid) {
    std::string out = "r,density\n";
    for (double r : grid.values()) {
        out += format_number(r);
        out += ',';
        out += format_number(outcome_density(a, b, r));
        out += '\n';
    }
    return out;
}

struct GkpArgs {
    double delta = 0.15;
    double kappa = 0.15;
    int logical = 0;
    int s_max = -1;
    std::string grid = "-8,8,1601";
    std::string out;
};

int cmd_gkp(const GkpArgs &args, std::ostream &out) {
    GkpTarget target{args.delta, args.kappa, args.logical, std::nullopt};
    if (args.s_max >= 0) {
        target.s_max = args.s_max;
    }
    try {
        target.validate();
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    const Grid grid = grid_option(args.grid);
    Artifacts artifacts("gkp", args.out);
    const std::string csv = wave_function_csv(gkp_target(target), grid);
    if (!artifacts.enabled()) {
        out << csv;
        return kExitOk;
    }
    artifacts.write("gkp.csv", csv);
    artifacts.finish({{"delta", args.delta},
                      {"kappa", args.kappa},
                      {"logical", args.logical},
                      {"s_max", target.s_max ? json(*target.s_max) : json(nullptr)},
                      {"grid", args.grid}},
                     std::nullopt);
    return kExitOk;
}

struct BreedArgs {
    std::string config;
    std::string policy = "exact-zero";
    std::string grid = "-8,8,1601";
    std::uint64_t stream = 0;
    double target_delta = 0.15;
    double target_kappa = 0.15;
    std::string out;
};

int cmd_breed(const BreedArgs &args, std::ostream &out, std::ostream &err) {
    const ProtocolConfig cfg = resolve_config(args.config);
    Policy policy;
    try {
        policy = parse_policy(args.policy);
    } catch (const std::invalid_argument &e) {
        throw UsageError(e.what());
    }
    const Grid grid = grid_option(args.grid);
    const GkpTarget target{args.target_delta, args.target_kappa, 0, std::nullopt};
    Artifacts artifacts("breed", args.out);
    const json echo = {{"protocol", to_json(cfg)},
                       {"policy", policy_name(policy)},
                       {"stream", args.stream},
                       {"grid", args.grid},
                       {"target_delta", args.target_delta},
                       {"target_kappa", args.target_kappa}};

    ProtocolResult result;
    try {
        result = run_protocol(cfg, policy, args.stream);
    } catch (const RejectedRunError &e) {
        json report = {{"error", "rejected"}, {"message", e.what()}, {"records", json::array()}};
        for (const auto &rec : e.records) {
            report["records"].push_back(to_json(rec));
        }
        if (artifacts.enabled()) {
            artifacts.write("error.json", report.dump(2) + "\n");
            artifacts.finish(echo, cfg.seed);
        }
        err << report.dump() << "\n";
        return kExitFailure;
    }

    json summary = {
        {"policy", policy_name(policy)},
        {"m_target", cfg.m_target},
        {"zeta", cfg.zeta},
        {"squeezing_db", zeta_to_db(cfg.zeta)},
        {"cat_alpha", cfg.cat_alpha()},
        {"cats_consumed", result.cats_consumed},
        {"restarts", result.restarts},
        {"terms", result.state.size()},
        {"fidelity_to_target", fidelity(result.state, gkp_target(target))},
        {"no_error_x", no_error_probability(result.state, Quadrature::x)},
        {"no_error_p", no_error_probability(result.state, Quadrature::p)},
        {"peaks", peak_table(result.state)},
    };
    summary["no_error_product"] = summary["no_error_x"].get<double>() * summary["no_error_p"].get<double>();
    if (!artifacts.enabled()) {
        out << summary.dump(2) << "\n";
        return kExitOk;
    }
    artifacts.write("state.csv", wave_function_csv(result.state, grid));
    artifacts.write("terms.json", to_json(result.state).dump(2) + "\n");
    artifacts.write("records.jsonl", to_json_lines(result.records));
    artifacts.write("summary.json", summary.dump(2) + "\n");
    artifacts.finish(echo, cfg.seed);
    return kExitOk;
}

struct DensityArgs {
    std::string config;
    std::string r_grid;
    std::string out;
};

int cmd_density(const DensityArgs &args, std::ostream &out) {
    const ProtocolConfig cfg = resolve_config(args.config);
    const auto [a, b] = root_inputs(cfg);
    const Grid grid = args.r_grid.empty() ? default_r_grid(a, b) : grid_option(args.r_grid);
    Artifacts artifacts("density", args.out);
    const std::string csv = density_csv(a, b, grid);
    if (!artifacts.enabled()) {
        out << csv;
        return kExitOk;
    }
    artifacts.write("density.csv", csv);
    artifacts.finish({{"protocol", to_json(cfg)},
                      {"r_grid", format_number(grid.lo) + "," + format_number(grid.hi) + "," +
                                     std::to_string(grid.points)}},
                     cfg.seed);
    return kExitOk;
}

struct OracleArgs {
    std::vector<std::string> suites;
    std::string out;
};

int cmd_oracle(const OracleArgs &args, std::ostream &out) {
    std::vector<std::string> names;
    for (const auto &s : args.suites) {
        if (s == "all") {
            const auto &all = oracle_suite_names();
            names.insert(names.end(), all.begin(), all.end());
        } else if (std::find(oracle_suite_names().begin(), oracle_suite_names().end(), s) !=
                   oracle_suite_names().end()) {
            names.push_back(s);
        } else {
            throw UsageError("unknown oracle suite '" + s + "'");
        }
    }
    Artifacts artifacts("oracle", args.out);
    json report = {{"suites", json::array()}, {"passed", true}};
    for (const auto &name : names) {
        json r = run_oracle_suite(name);
        report["passed"] = report["passed"].get<bool>() && r["passed"].get<bool>();
        report["suites"].push_back(std::move(r));
    }
    if (artifacts.enabled()) {
        artifacts.write("oracle.json", report.dump(2) + "\n");
        artifacts.finish({{"suites", names}}, std::nullopt);
    } else {
        out << report.dump(2) << "\n";
    }
    return report["passed"].get<bool>() ? kExitOk : kExitFailure;
}

struct SampleArgs {
    std::string config;
    std::int64_t draws = 1000;
    std::int64_t trials = 1000;
    unsigned threads = 0;
    std::string out;
};

int cmd_sample(const SampleArgs &args, std::ostream &out) {
    const ProtocolConfig cfg = resolve_config(args.config);
    if (args.draws < 0 || args.trials < 1) {
        throw UsageError("--draws must be >= 0 and --trials >= 1");
    }
    const auto [a, b] = root_inputs(cfg);
    const OutcomeSampler sampler(a, b);
    RngStream rng(cfg.seed, 0);
    std::string csv = "index,r,density\n";
    for (std::int64_t k = 0; k < args.draws; ++k) {
        const double r = sampler.draw(rng);
        csv += std::to_string(k) + "," + format_number(r) + "," + format_number(outcome_density(a, b, r)) + "\n";
    }
    const YieldStatistics s = yield_estimate(cfg, args.trials, args.threads);
    const json yield = {
        {"trials", s.trials},
        {"window_epsilon", cfg.window_epsilon},
        {"node_attempts", s.node_attempts},
        {"node_acceptances", s.node_acceptances},
        {"acceptance", s.acceptance},
        {"acceptance_stderr", s.acceptance_stderr},
        {"level_acceptance", s.level_acceptance},
        {"mean_cats", s.mean_cats},
        {"cats_stderr", s.cats_stderr},
        {"min_cats", s.min_cats},
        {"max_cats", s.max_cats},
        {"first_attempt_successes", s.first_attempt_successes},
        {"mean_fidelity", s.mean_fidelity},
    };
    Artifacts artifacts("sample", args.out);
    if (!artifacts.enabled()) {
        out << yield.dump(2) << "\n";
        return kExitOk;
    }
    artifacts.write("outcomes.csv", csv);
    artifacts.write("yield.json", yield.dump(2) + "\n");
    artifacts.finish({{"protocol", to_json(cfg)}, {"draws", args.draws}, {"trials", args.trials}}, cfg.seed);
    return kExitOk;
}

}  // namespace

std::optional<std::uint64_t> seed_from_env(const char *value) {
    if (value == nullptr) {
        return std::nullopt;
    }
    const std::string text(value);
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw UsageError("GKPB_SEED must be a non-negative integer, got '" + text + "'");
    }
    return seed;
}

std::pair<WaveFunction, WaveFunction> root_inputs(const ProtocolConfig &cfg) {
    if (cfg.m_target == 1) {
        const WaveFunction cat = make_cat({cfg.cat_alpha(), cfg.zeta});
        return {cat, cat};
    }
    ProtocolConfig child = cfg;
    child.m_target = cfg.m_target - 1;
    child.base_spacing = cfg.initial_spacing();
    const WaveFunction half = run_protocol(child, Policy::postselect_exact_zero).state;
    return {half, half};
}

Grid default_r_grid(const WaveFunction &mode1, const WaveFunction &mode2) {
    const OutcomeSampler sampler(mode1, mode2);
    Grid g;
    g.lo = sampler.grid().front();
    g.hi = sampler.grid().back();
    g.points = 4001;
    return g;
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Simulates GKP state preparation by breeding squeezed cat states."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    GkpArgs gkp;
    auto *gkp_cmd = app.add_subcommand("gkp", "Tabulate the approximate GKP wave function.");
    gkp_cmd->add_option("--delta", gkp.delta, "Peak width");
    gkp_cmd->add_option("--kappa", gkp.kappa, "Inverse envelope width");
    gkp_cmd->add_option("--logical", gkp.logical, "Logical value, 0 or 1");
    gkp_cmd->add_option("--s-max", gkp.s_max, "Largest |s| kept (default: automatic)");
    gkp_cmd->add_option("--grid", gkp.grid, "x grid as min,max,n");
    gkp_cmd->add_option("--out", gkp.out, "Output directory (default: CSV on stdout)");

    BreedArgs breed;
    auto *breed_cmd = app.add_subcommand("breed", "Run the breeding protocol.");
    breed_cmd->add_option("--config", breed.config, "Protocol config JSON");
    breed_cmd->add_option("--policy", breed.policy, "exact-zero, window, or sample");
    breed_cmd->add_option("--grid", breed.grid, "x grid for state.csv as min,max,n");
    breed_cmd->add_option("--stream", breed.stream, "Random stream index");
    breed_cmd->add_option("--target-delta", breed.target_delta, "Reference GKP peak width");
    breed_cmd->add_option("--target-kappa", breed.target_kappa, "Reference GKP envelope parameter");
    breed_cmd->add_option("--out", breed.out, "Output directory (default: summary on stdout)");

    DensityArgs density;
    auto *density_cmd = app.add_subcommand("density", "Tabulate the root homodyne outcome density.");
    density_cmd->add_option("--config", density.config, "Protocol config JSON");
    density_cmd->add_option("--r-grid", density.r_grid, "Outcome grid as min,max,n (default: automatic)");
    density_cmd->add_option("--out", density.out, "Output directory (default: CSV on stdout)");

    OracleArgs oracle;
    auto *oracle_cmd = app.add_subcommand("oracle", "Cross-check closed forms against quadrature.");
    oracle_cmd->add_option("--suite", oracle.suites, "overlap, breed, fidelity, windows, or all")->required();
    oracle_cmd->add_option("--out", oracle.out, "Output directory (default: report on stdout)");

    SampleArgs sample;
    auto *sample_cmd = app.add_subcommand("sample", "Draw root outcomes and estimate the window-policy yield.");
    sample_cmd->add_option("--config", sample.config, "Protocol config JSON");
    sample_cmd->add_option("--draws", sample.draws, "Number of outcome draws");
    sample_cmd->add_option("--trials", sample.trials, "Number of yield trials");
    sample_cmd->add_option("--threads", sample.threads, "Worker threads (0: hardware concurrency)");
    sample_cmd->add_option("--out", sample.out, "Output directory (default: yield on stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gkp_cmd) {
            return cmd_gkp(gkp, out);
        }
        if (*breed_cmd) {
            return cmd_breed(breed, out, err);
        }
        if (*density_cmd) {
            return cmd_density(density, out);
        }
        if (*oracle_cmd) {
            return cmd_oracle(oracle, out);
        }
        return cmd_sample(sample, out);
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace gkpb::cli
