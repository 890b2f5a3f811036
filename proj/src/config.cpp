/*
 * SPDX-FileCopyrightText: Copyright 2026 The atomsca Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "atomsca/errors.hpp"
#include "atomsca/experiment.hpp"
#include "text_util.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace atomsca {

namespace {

constexpr std::array<std::pair<std::string_view, Phase>, kPhaseCount> kBaselineKeys{{
    {"leakage.baseline.fetch1", Phase::Fetch1},
    {"leakage.baseline.dummy_reload", Phase::DummyReload},
    {"leakage.baseline.fetch2", Phase::Fetch2},
    {"leakage.baseline.compute", Phase::Compute},
    {"leakage.baseline.writeback", Phase::Writeback},
}};

double to_double(std::string_view key, std::string_view v) {
    double out;
    if (!text::parse_double(v, out))
        throw ConfigError("config key '" + std::string(key) +
                          "': expected a number, got '" + std::string(v) + "'");
    return out;
}

template <class T> T to_uint(std::string_view key, std::string_view v) {
    T out;
    if (!text::parse_uint(v, out))
        throw ConfigError("config key '" + std::string(key) +
                          "': expected a non-negative integer, got '" +
                          std::string(v) + "'");
    return out;
}

U256 to_u256(std::string_view key, std::string_view v) {
    try {
        return parse_u256(v);
    } catch (const InputError &e) {
        throw ConfigError("config key '" + std::string(key) + "': " + e.what());
    }
}

ScalarSource parse_scalar_source(std::string_view v) {
    for (ScalarSource s :
         {ScalarSource::Hex, ScalarSource::Random, ScalarSource::Exhaustive})
        if (to_string(s) == v)
            return s;
    throw ConfigError("unknown scalar source '" + std::string(v) + "'");
}

// key = value lines; '#' starts a comment line.
std::map<std::string, std::string> parse_pairs(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t lineno = 0;
    for (std::string_view raw : text::split(text, '\n')) {
        ++lineno;
        std::string_view line = text::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key(text::trim(line.substr(0, eq)));
        std::string value(text::trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        out[key] = value;
    }
    return out;
}

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::string_view to_string(ScalarSource source) {
    switch (source) {
    case ScalarSource::Hex:
        return "hex";
    case ScalarSource::Random:
        return "random";
    case ScalarSource::Exhaustive:
        return "exhaustive";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (curve == "file") {
        if (curve_file.empty())
            throw ConfigError("curve = file needs curve.file");
    } else if (curve != "p256" && curve != "toy" && curve != "toy-small") {
        throw ConfigError("unknown curve fixture '" + curve + "'");
    }
    if (scalar_source == ScalarSource::Hex && scalar < 2)
        throw ConfigError("scalar.value must be at least 2 (got " +
                          to_hex(scalar) + "); k = 0 and k = 1 have no "
                          "datapath representation");
    if (trials < 1)
        throw ConfigError("trials must be at least 1");
    if (sigmas.empty())
        throw ConfigError("evaluate.sigmas must list at least one value");
    for (double s : sigmas)
        if (!(s >= 0))
            throw ConfigError("noise levels must be non-negative");
    if (!(attack_threshold > 0))
        throw ConfigError("attack.threshold must be positive");
    datapath.validate();
    leakage.validate();
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    using Setter = std::function<void(std::string_view, std::string_view)>;
    std::map<std::string_view, Setter> setters{
        {"curve", [&](auto, auto v) { cfg.curve = v; }},
        {"curve.file", [&](auto, auto v) { cfg.curve_file = v; }},
        {"scalar.source",
         [&](auto, auto v) { cfg.scalar_source = parse_scalar_source(v); }},
        {"scalar.value", [&](auto k, auto v) { cfg.scalar = to_u256(k, v); }},
        {"seed", [&](auto k, auto v) { cfg.seed = to_uint<std::uint64_t>(k, v); }},
        {"datapath.mul_latency",
         [&](auto k, auto v) { cfg.datapath.mul_latency = to_uint<unsigned>(k, v); }},
        {"datapath.addsub_latency",
         [&](auto k, auto v) { cfg.datapath.addsub_latency = to_uint<unsigned>(k, v); }},
        {"datapath.countermeasure",
         [&](auto, auto v) { cfg.datapath.countermeasure = parse_countermeasure(v); }},
        {"datapath.rng_seed",
         [&](auto k, auto v) { cfg.datapath.rng_seed = to_uint<std::uint64_t>(k, v); }},
        {"datapath.clock_period_ns",
         [&](auto k, auto v) { cfg.datapath.clock_period_ns = to_double(k, v); }},
        {"leakage.alpha", [&](auto k, auto v) { cfg.leakage.alpha = to_double(k, v); }},
        {"leakage.beta", [&](auto k, auto v) { cfg.leakage.beta = to_double(k, v); }},
        {"leakage.gamma", [&](auto k, auto v) { cfg.leakage.gamma = to_double(k, v); }},
        {"leakage.noise_sigma",
         [&](auto k, auto v) { cfg.leakage.noise_sigma = to_double(k, v); }},
        {"leakage.noise_seed",
         [&](auto k, auto v) { cfg.leakage.noise_seed = to_uint<std::uint64_t>(k, v); }},
        {"leakage.mux_model",
         [&](auto, auto v) { cfg.leakage.mux_model = parse_mux_model(v); }},
        {"attack.threshold",
         [&](auto k, auto v) { cfg.attack_threshold = to_double(k, v); }},
        {"trials", [&](auto k, auto v) { cfg.trials = to_uint<unsigned>(k, v); }},
        {"evaluate.sigmas",
         [&](auto k, auto v) {
             cfg.sigmas.clear();
             for (std::string_view item : text::split(v, ','))
                 cfg.sigmas.push_back(to_double(k, text::trim(item)));
         }},
        {"output.dir", [&](auto, auto v) { cfg.output_dir = v; }},
    };
    for (const auto &[key, phase] : kBaselineKeys) {
        const auto slot = static_cast<std::size_t>(phase);
        setters[key] = [&cfg, slot](auto k, auto v) {
            cfg.leakage.block_baseline[slot] = to_double(k, v);
        };
    }

    for (const auto &[key, value] : parse_pairs(text)) {
        auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("unknown config key '" + key + "'");
        it->second(key, value);
    }
    return cfg;
}

std::string render_config(const ExperimentConfig &cfg) {
    std::ostringstream os;
    auto kv = [&](std::string_view k, const std::string &v) {
        os << k << " = " << v << '\n';
    };
    kv("curve", cfg.curve);
    if (!cfg.curve_file.empty())
        kv("curve.file", cfg.curve_file);
    kv("scalar.source", std::string(to_string(cfg.scalar_source)));
    kv("scalar.value", to_hex(cfg.scalar));
    kv("seed", std::to_string(cfg.seed));
    kv("datapath.mul_latency", std::to_string(cfg.datapath.mul_latency));
    kv("datapath.addsub_latency", std::to_string(cfg.datapath.addsub_latency));
    kv("datapath.countermeasure",
       std::string(to_string(cfg.datapath.countermeasure)));
    kv("datapath.rng_seed", std::to_string(cfg.datapath.rng_seed));
    kv("datapath.clock_period_ns", text::shortest(cfg.datapath.clock_period_ns));
    kv("leakage.alpha", text::shortest(cfg.leakage.alpha));
    kv("leakage.beta", text::shortest(cfg.leakage.beta));
    kv("leakage.gamma", text::shortest(cfg.leakage.gamma));
    for (const auto &[key, phase] : kBaselineKeys)
        kv(key, text::shortest(
                    cfg.leakage.block_baseline[static_cast<std::size_t>(phase)]));
    kv("leakage.noise_sigma", text::shortest(cfg.leakage.noise_sigma));
    kv("leakage.noise_seed", std::to_string(cfg.leakage.noise_seed));
    kv("leakage.mux_model", std::string(to_string(cfg.leakage.mux_model)));
    kv("attack.threshold", text::shortest(cfg.attack_threshold));
    kv("trials", std::to_string(cfg.trials));
    std::string sigmas;
    for (std::size_t i = 0; i < cfg.sigmas.size(); ++i)
        sigmas += (i ? "," : "") + text::shortest(cfg.sigmas[i]);
    kv("evaluate.sigmas", sigmas);
    kv("output.dir", cfg.output_dir);
    return os.str();
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    ExperimentConfig cfg = parse_config(read_file(path));
    // Relative curve files are resolved against the config's directory.
    if (!cfg.curve_file.empty() &&
        std::filesystem::path(cfg.curve_file).is_relative())
        cfg.curve_file = (path.parent_path() / cfg.curve_file).string();
    return cfg;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ (index * 0xd1342543de82ef95ULL + 1));
}

void apply_master_seed(ExperimentConfig &cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.datapath.rng_seed = derive_seed(seed, 0xc31);
    cfg.leakage.noise_seed = derive_seed(seed, 0x7015e);
}

CurveParams load_curve_file(const std::filesystem::path &path) {
    auto pairs = parse_pairs(read_file(path));
    auto get = [&](const std::string &key) {
        auto it = pairs.find(key);
        if (it == pairs.end())
            throw ConfigError("curve file '" + path.string() + "' lacks '" +
                              key + "'");
        return to_u256(key, it->second);
    };
    for (const auto &[key, value] : pairs)
        if (key != "p" && key != "b" && key != "gx" && key != "gy" &&
            key != "order" && key != "name")
            throw ConfigError("unknown curve file key '" + key + "'");
    std::string name = pairs.count("name") ? pairs["name"] : path.stem().string();
    return make_curve(name, get("p"), get("b"), get("gx"), get("gy"),
                      get("order"));
}

CurveParams resolve_curve(const ExperimentConfig &cfg) {
    if (cfg.curve == "file")
        return load_curve_file(cfg.curve_file);
    return named_curve(cfg.curve);
}

std::vector<U256> resolve_scalars(const ExperimentConfig &cfg,
                                  const CurveParams &curve) {
    switch (cfg.scalar_source) {
    case ScalarSource::Hex:
        return {cfg.scalar};
    case ScalarSource::Exhaustive: {
        if (curve.order >= (1u << 20))
            throw ConfigError("exhaustive scalars need a toy curve");
        std::vector<U256> out;
        for (U256 k = 2; k < curve.order; ++k)
            out.push_back(k);
        return out;
    }
    case ScalarSource::Random: {
        // Uniform in [2, order) by rejection.
        std::mt19937_64 rng(derive_seed(cfg.seed, 0x5ca1a5));
        const unsigned bits = boost::multiprecision::msb(curve.order) + 1;
        std::vector<U256> out;
        while (out.size() < cfg.trials) {
            U256 k = 0;
            for (int w = 0; w < 4; ++w)
                k = (k << 64) | U256(rng());
            if (bits < 256)
                k &= (U256(1) << bits) - 1;
            if (k >= 2 && k < curve.order)
                out.push_back(k);
        }
        return out;
    }
    }
    return {};
}

PublicParameters public_parameters(const ExperimentConfig &cfg,
                                   const PatternLibrary &lib, Countermeasure mode) {
    return {squaring_signature(lib),
            TimingModel::from_public(cfg.datapath.mul_latency,
                                     cfg.datapath.addsub_latency, mode),
            cfg.attack_threshold};
}

// --- annotation file --------------------------------------------------------

void write_annotations(std::ostream &os, const AtomicProgram &prog,
                       const ExecutionLog &log) {
    os << "# atomsca-annotations 1\n";
    os << "scalar," << (prog.ground_truth ? to_hex(*prog.ground_truth) : "-")
       << '\n';
    os << "mode," << to_string(log.countermeasure) << '\n';
    os << "cycles," << log.records.size() << '\n';
    os << "mul_ops," << prog.mul_op_count() << '\n';
    os << "atoms," << prog.atoms.size() << '\n';
    for (std::size_t i = 0; i < prog.origins.size(); ++i)
        os << "atom," << i << ','
           << (prog.origins[i].pattern == PatternKind::Doubling ? 'D' : 'A')
           << ',' << prog.origins[i].bit_position << '\n';
    std::size_t ordinal = 0;
    for (const CycleRecord &r : log.records) {
        if (!r.is_mul_op || r.phase != Phase::Fetch2)
            continue;
        const OpAnnotation &a = log.annotations[r.op_index];
        os << "mul," << ordinal++ << ',' << r.op_index << ',' << r.cycle << ','
           << (a.squaring_by_address ? 1 : 0) << ','
           << (a.squaring_by_value ? 1 : 0) << '\n';
    }
}

Annotations read_annotations(std::istream &is) {
    std::string line;
    if (!std::getline(is, line) || line != "# atomsca-annotations 1")
        throw InputError("not an atomsca annotation file");
    Annotations out;
    bool have_scalar = false;
    while (std::getline(is, line)) {
        std::string_view l = text::trim(line);
        if (l.empty() || l.front() == '#')
            continue;
        auto f = text::split(l, ',');
        const std::string_view key = f[0];
        auto need = [&](std::size_t n) {
            if (f.size() != n)
                throw InputError("malformed annotation line '" + line + "'");
        };
        if (key == "scalar") {
            need(2);
            out.scalar = parse_u256(f[1]);
            have_scalar = true;
        } else if (key == "mode") {
            need(2);
            try {
                out.mode = parse_countermeasure(f[1]);
            } catch (const ConfigError &e) {
                throw InputError(e.what());
            }
        } else if (key == "cycles") {
            need(2);
            if (!text::parse_uint(f[1], out.cycles))
                throw InputError("bad cycle count in annotations");
        } else if (key == "atoms") {
            need(2);
            if (!text::parse_uint(f[1], out.atoms))
                throw InputError("bad atom count in annotations");
        } else if (key == "mul") {
            need(6);
            out.mul_squaring_by_address.push_back(f[4] == "1");
            out.mul_squaring_by_value.push_back(f[5] == "1");
        } else if (key != "mul_ops" && key != "atom") {
            throw InputError("unknown annotation record '" + std::string(key) + "'");
        }
    }
    if (!have_scalar)
        throw InputError("annotation file carries no scalar");
    return out;
}

// --- report file ------------------------------------------------------------

void write_report(std::ostream &os, const AttackReport &report,
                  const Annotations *truth) {
    os << "# atomsca-report 1\n";
    os << "status," << to_string(report.status) << '\n';
    os << "separation_score," << text::shortest(report.separation_score) << '\n';
    os << "mul_features," << report.labels.size() << '\n';
    os << "labels,";
    for (MulLabel l : report.labels)
        os << static_cast<char>(l);
    os << '\n';
    os << "recovered_bits,";
    for (bool b : report.recovered_bits)
        os << (b ? '1' : '0');
    os << '\n';
    auto k = report.recovered_scalar();
    os << "recovered_k," << (k ? to_hex(*k) : "-") << '\n';
    os << "failure_offset,"
       << (report.failure_offset ? std::to_string(*report.failure_offset) : "-")
       << '\n';
    os << "message," << (report.message.empty() ? "-" : report.message) << '\n';
    if (!truth)
        return;

    AttackReport scored = report;
    score_report(scored, truth->scalar);
    std::size_t label_hits = 0;
    const std::size_t n =
        std::min(report.labels.size(), truth->mul_squaring_by_value.size());
    for (std::size_t i = 0; i < n; ++i) {
        const MulLabel want =
            truth->mul_squaring_by_value[i] ? MulLabel::Sqr : MulLabel::Mul;
        label_hits += report.labels[i] == want;
    }
    const double label_accuracy =
        truth->mul_squaring_by_value.empty()
            ? 0.0
            : static_cast<double>(label_hits) /
                  static_cast<double>(truth->mul_squaring_by_value.size());
    os << "true_k," << to_hex(truth->scalar) << '\n';
    os << "bit_accuracy," << text::shortest(*scored.bit_accuracy) << '\n';
    os << "label_accuracy," << text::shortest(label_accuracy) << '\n';
    os << "full_recovery," << (*scored.full_recovery ? 1 : 0) << '\n';
}

} // namespace atomsca
