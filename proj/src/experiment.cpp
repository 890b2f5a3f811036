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

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <mutex>
#include <thread>

namespace atomsca {

namespace {

namespace fs = std::filesystem;

// Runs fn(0..n-1) on a few worker threads. Callers store results by index so
// that aggregation does not depend on completion order.
template <class Fn> void parallel_for(std::size_t n, Fn fn) {
    const std::size_t workers = std::clamp<std::size_t>(
        std::thread::hardware_concurrency(), 1, std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::ofstream open_output(const fs::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    return out;
}

void ensure_dir(const fs::path &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw InputError("cannot create output directory '" + dir.string() + "'");
}

DatapathConfig trial_datapath(const ExperimentConfig &cfg, Countermeasure mode,
                              std::size_t trial) {
    DatapathConfig dp = cfg.datapath;
    dp.countermeasure = mode;
    dp.rng_seed = derive_seed(cfg.datapath.rng_seed, trial);
    return dp;
}

LeakageParams trial_leakage(const ExperimentConfig &cfg, double sigma,
                            std::size_t trial, std::size_t sigma_index) {
    LeakageParams lp = cfg.leakage;
    lp.noise_sigma = sigma;
    lp.noise_seed =
        derive_seed(cfg.leakage.noise_seed, trial * 1009 + sigma_index);
    return lp;
}

struct TrialOutcome {
    std::size_t cycles = 0;
    bool cost_law = true;
    // Indexed by sigma.
    std::vector<AttackReport> reports;
};

void write_xy(const fs::path &path, const std::vector<std::pair<double, double>> &xy,
              const std::string &comment) {
    std::ofstream out = open_output(path);
    out << "# " << comment << '\n';
    for (const auto &[x, y] : xy)
        out << text::shortest(x) << ' ' << text::shortest(y) << '\n';
}

// First squaring and first regular multiplication windows of the first trial
// in every mode, one gnuplot block each.
void write_overlay(const fs::path &path, const ExperimentConfig &cfg,
                   const AtomicProgram &prog) {
    std::ofstream out = open_output(path);
    out << "# x = time within the MUL window [ns], y = power; blocks separated "
           "by two blank lines\n";
    LeakageParams lp = cfg.leakage;
    lp.noise_sigma = 0;
    bool first_block = true;
    for (Countermeasure mode : kAllCountermeasures) {
        ExecutionLog log = run_program(prog, trial_datapath(cfg, mode, 0));
        PowerTrace trace = emit_trace(log, lp);
        for (bool want_square : {false, true}) {
            std::optional<std::uint32_t> op;
            for (const CycleRecord &r : log.records)
                if (r.is_mul_op && r.phase == Phase::Fetch2 &&
                    log.annotations[r.op_index].squaring_by_value == want_square) {
                    op = r.op_index;
                    break;
                }
            if (!op)
                continue;
            if (!first_block)
                out << "\n\n";
            first_block = false;
            out << "# mode=" << to_string(mode) << " op="
                << (want_square ? "squaring" : "multiplication") << '\n';
            std::size_t t0 = 0;
            while (log.records[t0].op_index != *op)
                ++t0;
            for (std::size_t t = t0;
                 t < log.records.size() && log.records[t].op_index == *op; ++t)
                out << text::shortest(static_cast<double>(t - t0) *
                                      trace.clock_period_ns)
                    << ' ' << text::fixed6(trace.samples[t]) << '\n';
        }
    }
}

} // namespace

int cmd_validate(const ExperimentConfig &cfg, std::ostream &out,
                 const PatternLibrary *lib_override) {
    try {
        cfg.validate();
        const CurveParams curve = resolve_curve(cfg);
        const PatternLibrary lib =
            lib_override ? *lib_override : build_pattern_library(curve);
        const std::vector<U256> scalars = resolve_scalars(cfg, curve);

        std::size_t failures = 0;
        for (std::size_t i = 0; i < scalars.size(); ++i) {
            const U256 &k = scalars[i];
            const AffinePoint expected =
                scalar_mul_naive(k, curve.base_point, curve);
            const AtomicProgram prog = compile_scalar(k, curve.base_point, lib);
            for (Countermeasure mode : kAllCountermeasures) {
                bool ok = false;
                std::string detail;
                try {
                    ExecutionLog log = run_program(prog, trial_datapath(cfg, mode, i));
                    ok = to_affine(result_point(log), curve) == expected;
                } catch (const ProgramError &e) {
                    detail = std::string(" (") + e.what() + ")";
                }
                out << "k=" << to_hex(k) << " mode=" << to_string(mode) << ' '
                    << (ok ? "OK" : "MISMATCH") << detail << '\n';
                if (!ok && failures++ == 0)
                    out << "first failure: k=" << to_hex(k)
                        << " mode=" << to_string(mode) << '\n';
            }
        }
        out << "validated " << scalars.size() << " scalars x 3 modes, "
            << failures << " failures\n";
        return failures ? kExitWrong : kExitOk;
    } catch (const std::exception &e) {
        out << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

int cmd_simulate(const ExperimentConfig &cfg, std::ostream &out) {
    try {
        cfg.validate();
        const CurveParams curve = resolve_curve(cfg);
        const PatternLibrary lib = build_pattern_library(curve);
        const U256 k = resolve_scalars(cfg, curve).front();
        const AtomicProgram prog = compile_scalar(k, curve.base_point, lib);
        const Countermeasure mode = cfg.datapath.countermeasure;
        const ExecutionLog log = run_program(prog, trial_datapath(cfg, mode, 0));
        const PowerTrace trace =
            emit_trace(log, trial_leakage(cfg, cfg.leakage.noise_sigma, 0, 0));

        const fs::path dir = cfg.output_dir;
        ensure_dir(dir);
        {
            std::ofstream f = open_output(dir / "trace.txt");
            write_trace(f, trace);
        }
        {
            std::ofstream f = open_output(dir / "annotations.txt");
            write_annotations(f, prog, log);
        }
        out << "simulated k=" << to_hex(k) << " mode=" << to_string(mode)
            << " cycles=" << trace.samples.size() << " atoms=" << prog.atoms.size()
            << " -> " << (dir / "trace.txt").string() << '\n';
        return kExitOk;
    } catch (const std::exception &e) {
        out << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

int cmd_attack(const ExperimentConfig &cfg, const fs::path &trace_path,
               const std::optional<fs::path> &annotations_path, std::ostream &out) {
    PowerTrace trace;
    PublicParameters pub;
    std::optional<Annotations> truth;
    try {
        cfg.validate();
        std::ifstream in(trace_path, std::ios::binary);
        if (!in)
            throw InputError("cannot read trace '" + trace_path.string() + "'");
        trace = read_trace(in);
        const PatternLibrary lib = build_pattern_library(resolve_curve(cfg));
        pub = public_parameters(cfg, lib, trace.mode);
        if (annotations_path) {
            std::ifstream ain(*annotations_path, std::ios::binary);
            if (!ain)
                throw InputError("cannot read annotations '" +
                                 annotations_path->string() + "'");
            truth = read_annotations(ain);
        }
    } catch (const std::exception &e) {
        out << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    const AttackReport report = recover_scalar(trace, pub);
    try {
        const fs::path dir = cfg.output_dir;
        ensure_dir(dir);
        std::ofstream f = open_output(dir / "report.txt");
        write_report(f, report, truth ? &*truth : nullptr);
    } catch (const std::exception &e) {
        out << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    out << "status=" << to_string(report.status)
        << " separation_score=" << text::shortest(report.separation_score);
    if (auto k = report.recovered_scalar())
        out << " k=" << to_hex(*k);
    out << '\n';

    switch (report.status) {
    case AttackStatus::Abstained:
        return kExitAbstain;
    case AttackStatus::SegmentationFailed:
        return kExitInputError;
    case AttackStatus::ParseFailed:
        return kExitWrong;
    case AttackStatus::Recovered:
        if (truth && report.recovered_scalar() != truth->scalar)
            return kExitWrong;
        return kExitOk;
    }
    return kExitWrong;
}

int cmd_evaluate(const ExperimentConfig &cfg, std::ostream &out,
                 EvaluationSummary *summary_out) {
    try {
        cfg.validate();
        const CurveParams curve = resolve_curve(cfg);
        const PatternLibrary lib = build_pattern_library(curve);
        const std::vector<U256> scalars = resolve_scalars(cfg, curve);
        const std::size_t trials = scalars.size();
        const std::size_t nsig = cfg.sigmas.size();

        // outcomes[mode][trial]
        std::array<std::vector<TrialOutcome>, 3> outcomes;
        for (auto &v : outcomes)
            v.resize(trials);
        std::array<std::vector<std::vector<MulFeature>>, 3> first_features;
        for (auto &v : first_features)
            v.resize(nsig);

        parallel_for(trials, [&](std::size_t i) {
            const AtomicProgram prog =
                compile_scalar(scalars[i], curve.base_point, lib);
            std::size_t baseline_cycles = 0;
            for (std::size_t m = 0; m < 3; ++m) {
                const Countermeasure mode = kAllCountermeasures[m];
                const ExecutionLog log =
                    run_program(prog, trial_datapath(cfg, mode, i));
                TrialOutcome &o = outcomes[m][i];
                o.cycles = log.records.size();
                if (mode == Countermeasure::None)
                    baseline_cycles = o.cycles;
                else if (mode == Countermeasure::Cm1BusReload)
                    o.cost_law = o.cycles == baseline_cycles + prog.mul_op_count();
                else
                    o.cost_law = o.cycles == baseline_cycles;

                const PublicParameters pub = public_parameters(cfg, lib, mode);
                for (std::size_t s = 0; s < nsig; ++s) {
                    const PowerTrace trace =
                        emit_trace(log, trial_leakage(cfg, cfg.sigmas[s], i, s));
                    AttackReport report = recover_scalar(trace, pub);
                    score_report(report, scalars[i]);
                    o.reports.push_back(std::move(report));
                    if (i == 0)
                        first_features[m][s] = segment_trace(trace, pub.timing);
                }
            }
        });

        EvaluationSummary summary;
        for (std::size_t m = 0; m < 3; ++m) {
            for (std::size_t s = 0; s < nsig; ++s) {
                CellSummary c;
                c.mode = kAllCountermeasures[m];
                c.sigma = cfg.sigmas[s];
                c.trials = static_cast<unsigned>(trials);
                c.min_cycles = outcomes[m][0].cycles;
                for (const TrialOutcome &o : outcomes[m]) {
                    const AttackReport &r = o.reports[s];
                    c.mean_bit_accuracy += *r.bit_accuracy;
                    c.full_recovery_rate += *r.full_recovery ? 1 : 0;
                    c.abstain_rate += r.status == AttackStatus::Abstained ? 1 : 0;
                    c.mean_separation += r.separation_score;
                    c.mean_cycles += static_cast<double>(o.cycles);
                    c.min_cycles = std::min(c.min_cycles, o.cycles);
                    c.max_cycles = std::max(c.max_cycles, o.cycles);
                    c.cost_law_holds = c.cost_law_holds && o.cost_law;
                }
                const double t = static_cast<double>(trials);
                c.mean_bit_accuracy /= t;
                c.full_recovery_rate /= t;
                c.abstain_rate /= t;
                c.mean_separation /= t;
                c.mean_cycles /= t;
                summary.cells.push_back(c);
            }
        }

        const fs::path dir = cfg.output_dir;
        ensure_dir(dir);
        {
            std::ofstream f = open_output(dir / "summary.txt");
            f << "# mode sigma trials mean_bit_accuracy full_recovery_rate "
                 "abstain_rate mean_separation mean_cycles min_cycles max_cycles "
                 "cost_law\n";
            for (const CellSummary &c : summary.cells)
                f << to_string(c.mode) << ' ' << text::shortest(c.sigma) << ' '
                  << c.trials << ' ' << text::fixed6(c.mean_bit_accuracy) << ' '
                  << text::fixed6(c.full_recovery_rate) << ' '
                  << text::fixed6(c.abstain_rate) << ' '
                  << text::fixed6(c.mean_separation) << ' '
                  << text::fixed6(c.mean_cycles) << ' ' << c.min_cycles << ' '
                  << c.max_cycles << ' ' << (c.cost_law_holds ? "ok" : "VIOLATED")
                  << '\n';
        }
        for (std::size_t m = 0; m < 3; ++m) {
            const std::string mode(to_string(kAllCountermeasures[m]));
            std::vector<std::pair<double, double>> curve_xy;
            for (const CellSummary &c : summary.cells)
                if (c.mode == kAllCountermeasures[m])
                    curve_xy.emplace_back(c.sigma, c.full_recovery_rate);
            write_xy(dir / ("recovery_" + mode + ".dat"), curve_xy,
                     "x = noise sigma, y = full recovery rate, mode=" + mode);
            for (std::size_t s = 0; s < nsig; ++s) {
                std::vector<std::pair<double, double>> xy;
                for (const MulFeature &f : first_features[m][s])
                    xy.emplace_back(static_cast<double>(f.op_ordinal), f.value);
                write_xy(dir / ("features_" + mode + "_" + std::to_string(s) + ".dat"),
                         xy,
                         "x = MUL ordinal, y = FETCH2 power, trial 0, mode=" + mode +
                             " sigma=" + text::shortest(cfg.sigmas[s]));
            }
        }
        write_overlay(dir / "overlay.dat", cfg,
                      compile_scalar(scalars.front(), curve.base_point, lib));

        for (const CellSummary &c : summary.cells)
            out << "mode=" << to_string(c.mode) << " sigma=" << text::shortest(c.sigma)
                << " full_recovery=" << text::fixed6(c.full_recovery_rate)
                << " bit_accuracy=" << text::fixed6(c.mean_bit_accuracy)
                << " separation=" << text::fixed6(c.mean_separation)
                << " cycles=" << text::fixed6(c.mean_cycles)
                << (c.cost_law_holds ? "" : " COST-LAW-VIOLATED") << '\n';
        if (summary_out)
            *summary_out = std::move(summary);
        return kExitOk;
    } catch (const std::exception &e) {
        out << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}

} // namespace atomsca
