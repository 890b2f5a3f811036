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

#pragma once

#include "atomsca/attack.hpp"
#include "atomsca/datapath.hpp"
#include "atomsca/leakage.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atomsca {

enum class ScalarSource : std::uint8_t { Hex, Random, Exhaustive };

std::string_view to_string(ScalarSource source);

/// Flat `section.key = value` configuration. See README for every key.
struct ExperimentConfig {
    /// Fixture name ("p256", "toy", "toy-small") or "file".
    std::string curve = "p256";
    /// Curve definition read when curve == "file".
    std::string curve_file;
    ScalarSource scalar_source = ScalarSource::Random;
    U256 scalar = 0;
    /// Master seed for scalar draws.
    std::uint64_t seed = 1;
    DatapathConfig datapath;
    LeakageParams leakage;
    double attack_threshold = kDefaultSeparationThreshold;
    unsigned trials = 1;
    std::vector<double> sigmas{0.0};
    std::string output_dir = "out";

    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

/// Throws ConfigError on unknown keys or bad values. Does not call validate().
ExperimentConfig parse_config(std::string_view text);
std::string render_config(const ExperimentConfig &cfg);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Replaces the master seed and derives the datapath and noise seeds from it.
void apply_master_seed(ExperimentConfig &cfg, std::uint64_t seed);

/// Independent 64-bit stream seed for (base, index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Curve file: `p`, `b`, `gx`, `gy`, `order` as key = value lines, decimal
/// or 0x-hex. Throws ConfigError / ValidationError.
CurveParams load_curve_file(const std::filesystem::path &path);
CurveParams resolve_curve(const ExperimentConfig &cfg);
std::vector<U256> resolve_scalars(const ExperimentConfig &cfg,
                                  const CurveParams &curve);

/// Public parameters for the attack on a trace taken in `mode`.
PublicParameters public_parameters(const ExperimentConfig &cfg,
                                   const PatternLibrary &lib, Countermeasure mode);

// --- annotation and report files -------------------------------------------

struct Annotations {
    U256 scalar = 0;
    Countermeasure mode = Countermeasure::None;
    std::size_t cycles = 0;
    std::size_t atoms = 0;
    /// One entry per MUL op in trace order.
    std::vector<bool> mul_squaring_by_address;
    std::vector<bool> mul_squaring_by_value;
};

void write_annotations(std::ostream &os, const AtomicProgram &prog,
                       const ExecutionLog &log);
Annotations read_annotations(std::istream &is);

/// `key,value` lines in a fixed order. Accuracy lines are appended only when
/// `truth` is given.
void write_report(std::ostream &os, const AttackReport &report,
                  const Annotations *truth);

// --- commands ---------------------------------------------------------------

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitAbstain = 2,
    kExitWrong = 3,
};

/// compile -> datapath -> affine vs the reference, for every configured scalar
/// and all three modes. `lib_override` replaces the generated schedules
/// (negative controls in tests).
int cmd_validate(const ExperimentConfig &cfg, std::ostream &out,
                 const PatternLibrary *lib_override = nullptr);

/// Writes trace.txt and annotations.txt for the first configured scalar
/// under cfg.datapath.countermeasure into cfg.output_dir.
int cmd_simulate(const ExperimentConfig &cfg, std::ostream &out);

/// Reads a trace, attacks it with public parameters from `cfg` and writes
/// report.txt into cfg.output_dir. The annotation file is opened only when a
/// path is passed.
int cmd_attack(const ExperimentConfig &cfg, const std::filesystem::path &trace,
               const std::optional<std::filesystem::path> &annotations,
               std::ostream &out);

struct CellSummary {
    Countermeasure mode;
    double sigma = 0;
    unsigned trials = 0;
    double mean_bit_accuracy = 0;
    double full_recovery_rate = 0;
    double abstain_rate = 0;
    double mean_separation = 0;
    double mean_cycles = 0;
    std::size_t min_cycles = 0;
    std::size_t max_cycles = 0;
    /// cm1 == baseline + #MUL and cm2 == baseline in every trial.
    bool cost_law_holds = true;
};

struct EvaluationSummary {
    std::vector<CellSummary> cells;
};

/// All three modes x cfg.sigmas x cfg.trials. Writes summary.txt,
/// recovery_<mode>.dat, features_<mode>_<i>.dat and overlay.dat.
int cmd_evaluate(const ExperimentConfig &cfg, std::ostream &out,
                 EvaluationSummary *summary = nullptr);

} // namespace atomsca
