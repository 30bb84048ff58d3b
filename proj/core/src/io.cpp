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

#include "gkpb/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gkpb {

using nlohmann::json;

json to_json(const WaveFunction &psi) {
    json terms = json::array();
    for (const auto &t : psi.terms()) {
        const cplx c = t.coeff();
        terms.push_back({
            {"coeff_re", c.real()},
            {"coeff_im", c.imag()},
            {"var_re", t.variance.real()},
            {"var_im", t.variance.imag()},
            {"mean_re", t.mean.real()},
            {"mean_im", t.mean.imag()},
            {"log_coeff_re", std::isfinite(t.log_coeff.real()) ? json(t.log_coeff.real()) : json(nullptr)},
            {"log_coeff_im", t.log_coeff.imag()},
        });
    }
    return {{"basis", basis_name(psi.basis())}, {"terms", std::move(terms)}};
}

WaveFunction wave_function_from_json(const json &j) {
    const Basis basis = parse_basis(j.at("basis").get<std::string>());
    std::vector<GaussianTerm> terms;
    for (const auto &jt : j.at("terms")) {
        const cplx variance{jt.at("var_re").get<double>(), jt.at("var_im").get<double>()};
        const cplx mean{jt.at("mean_re").get<double>(), jt.at("mean_im").get<double>()};
        if (jt.contains("log_coeff_re") && !jt.at("log_coeff_re").is_null()) {
            terms.push_back(GaussianTerm{
                {jt.at("log_coeff_re").get<double>(), jt.value("log_coeff_im", 0.0)}, variance, mean});
        } else {
            const cplx coeff{jt.at("coeff_re").get<double>(), jt.at("coeff_im").get<double>()};
            terms.push_back(GaussianTerm::from_coeff(coeff, variance, mean));
        }
    }
    return WaveFunction(std::move(terms), basis);
}

json to_json(const ProtocolConfig &cfg) {
    json j = {
        {"m_target", cfg.m_target},
        {"zeta", cfg.zeta},
        {"base_spacing", cfg.initial_spacing()},
        {"window_epsilon", cfg.window_epsilon},
        {"prune_tol", cfg.prune_tol},
        {"seed", cfg.seed},
        {"max_restarts", cfg.max_restarts},
    };
    return j;
}

ProtocolConfig protocol_config_from_json(const json &j) {
    if (!j.is_object()) {
        throw std::invalid_argument("protocol config must be a JSON object");
    }
    ProtocolConfig cfg;
    for (const auto &[key, value] : j.items()) {
        if (key == "m_target") {
            cfg.m_target = value.get<int>();
        } else if (key == "zeta") {
            cfg.zeta = value.get<double>();
        } else if (key == "base_spacing") {
            if (!value.is_null()) {
                cfg.base_spacing = value.get<double>();
            }
        } else if (key == "window_epsilon") {
            cfg.window_epsilon = value.get<double>();
        } else if (key == "prune_tol") {
            cfg.prune_tol = value.get<double>();
        } else if (key == "seed") {
            if (value.is_number_integer() && value.get<std::int64_t>() < 0) {
                throw std::invalid_argument("seed must be non-negative");
            }
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "max_restarts") {
            cfg.max_restarts = value.get<int>();
        } else {
            throw std::invalid_argument("unknown protocol config field '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

ProtocolConfig load_protocol_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config file '" + path + "'");
    }
    return protocol_config_from_json(json::parse(in));
}

json to_json(const BreedRecord &rec) {
    return {
        {"round", rec.round},
        {"node", rec.node},
        {"attempt", rec.attempt},
        {"r", rec.r},
        {"accepted", rec.accepted},
        {"density", rec.density},
        {"terms_before", rec.terms_before},
        {"terms_after", rec.terms_after},
        {"cats_consumed", rec.cats_consumed},
    };
}

std::string to_json_lines(const std::vector<BreedRecord> &records) {
    std::string out;
    for (const auto &rec : records) {
        out += to_json(rec).dump();
        out += '\n';
    }
    return out;
}

std::string format_number(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw std::runtime_error("format_number: conversion failed");
    }
    return std::string(buf, end);
}

double Grid::at(std::size_t k) const {
    if (k + 1 == points) {
        return hi;
    }
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
}

std::vector<double> Grid::values() const {
    std::vector<double> out(points);
    for (std::size_t k = 0; k < points; ++k) {
        out[k] = at(k);
    }
    return out;
}

Grid parse_grid(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        parts.push_back(item);
    }
    if (parts.size() != 3) {
        throw std::invalid_argument("grid must be 'min,max,n'");
    }
    auto parse_double = [](const std::string &s) {
        double v = 0.0;
        const char *first = s.data();
        const char *last = s.data() + s.size();
        while (first < last && *first == ' ') {
            ++first;
        }
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
            throw std::invalid_argument("grid: '" + s + "' is not a number");
        }
        return v;
    };
    Grid g;
    g.lo = parse_double(parts[0]);
    g.hi = parse_double(parts[1]);
    const double n = parse_double(parts[2]);
    if (n < 2.0 || n != std::floor(n) || n > 1e8) {
        throw std::invalid_argument("grid: point count must be an integer >= 2");
    }
    if (!(g.hi > g.lo)) {
        throw std::invalid_argument("grid: max must exceed min");
    }
    g.points = static_cast<std::size_t>(n);
    return g;
}

std::string wave_function_csv(const WaveFunction &psi, const Grid &grid) {
    const WaveFunction normed = normalize(psi);
    std::string out = "x,re_psi,im_psi,abs2_psi\n";
    for (std::size_t k = 0; k < grid.points; ++k) {
        const double x = grid.at(k);
        const cplx v = evaluate(normed, x);
        out += format_number(x);
        out += ',';
        out += format_number(v.real());
        out += ',';
        out += format_number(v.imag());
        out += ',';
        out += format_number(std::norm(v));
        out += '\n';
    }
    return out;
}

}  // namespace gkpb
