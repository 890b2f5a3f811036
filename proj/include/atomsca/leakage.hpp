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

#include "atomsca/datapath.hpp"
#include "atomsca/trace.hpp"

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace atomsca {

enum class MuxModel : std::uint8_t {
    /// beta per toggled select line.
    LinearHd,
    /// Each select line carries its own weight in [0.5, 1.5), drawn once from
    /// the noise seed, standing in for an unbalanced multiplexer tree.
    WeightedBits
};

std::string_view to_string(MuxModel model);
MuxModel parse_mux_model(std::string_view name);

struct LeakageParams {
    /// Per toggled bus data bit.
    double alpha = 1.0;
    /// Per toggled multiplexer select bit.
    double beta = 8.0;
    /// Whenever the driving source changes at all.
    double gamma = 4.0;
    /// Constant per-phase draw, indexed by Phase.
    std::array<double, kPhaseCount> block_baseline{2.0, 2.0, 2.0, 6.0, 2.0};
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;
    MuxModel mux_model = MuxModel::LinearHd;

    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const LeakageParams &, const LeakageParams &) = default;
};

/// Switching part of each sample: data-bit, select-bit and source-change
/// terms, without baseline or noise. Cycle 0 is compared against an all-zero
/// bus driven by source 0.
std::vector<double> switching_activity(const ExecutionLog &log,
                                       const LeakageParams &params);

/// switching + per-phase baseline + Gaussian noise. Throws InputError for an
/// empty log.
PowerTrace emit_trace(const ExecutionLog &log, const LeakageParams &params);

struct GroupStats {
    std::size_t count = 0;
    double mean = 0;
    double min = 0;
    double max = 0;
};

struct FeatureGap {
    GroupStats squaring;
    GroupStats multiplication;
    /// multiplication.mean - squaring.mean
    double gap = 0;
};

/// FETCH2 samples of every MUL grouped by whether both operands held the same
/// value. Uses ground truth; evaluation only. Throws InputError if the log
/// has no multiplications.
FeatureGap feature_gap(const ExecutionLog &log, const LeakageParams &params);

/// Same grouping over an already emitted trace.
FeatureGap feature_gap(const ExecutionLog &log, const PowerTrace &trace);

} // namespace atomsca
