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

#include "atomsca/atomic_scheduler.hpp"
#include "atomsca/trace.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace atomsca {

/// Public cycle layout of one atom, known to anyone who knows the block
/// latencies and which countermeasure the device runs.
struct TimingModel {
    unsigned cycles_per_mul_op = 0;
    unsigned cycles_per_add_op = 0;
    unsigned cycles_per_neg_op = 0;
    /// Position of the second operand fetch inside a MUL window.
    unsigned fetch2_offset = 0;

    static TimingModel from_public(unsigned mul_latency, unsigned addsub_latency,
                                   Countermeasure mode);

    unsigned atom_cycles() const {
        return 2 * cycles_per_mul_op + 2 * cycles_per_neg_op +
               3 * cycles_per_add_op;
    }
    /// Offsets of the FETCH2 cycles of the two MUL slots within an atom.
    std::array<unsigned, 2> fetch2_cycles() const {
        return {fetch2_offset, cycles_per_mul_op + cycles_per_neg_op +
                                   cycles_per_add_op + fetch2_offset};
    }
};

struct MulFeature {
    std::size_t op_ordinal;
    double value;
};

enum class MulLabel : char { Sqr = 'S', Mul = 'M', Abstain = '?' };

struct Classification {
    std::vector<MulLabel> labels;
    double separation_score = 0;
    double low_center = 0;
    double high_center = 0;
};

inline constexpr double kDefaultSeparationThreshold = 2.0;

/// One feature per MUL slot: the sample at its FETCH2 cycle. Throws
/// SegmentationError unless the trace is a positive multiple of the atom.
std::vector<MulFeature> segment_trace(const PowerTrace &trace,
                                      const TimingModel &tm);

/// Exact 1-D two-means. The lower cluster is labelled SQR. The score is the
/// centre distance over the pooled within-cluster standard deviation; below
/// `threshold` every label is ABSTAIN.
Classification classify(std::span<const MulFeature> features,
                        double threshold = kDefaultSeparationThreshold);

/// Greedy left-to-right inversion of the 4/10-atom encoding. Returns the bits
/// of k, MSB first, including the implicit leading one. Throws ParseError with
/// the offending label offset and the bits decoded so far.
std::vector<bool> parse_atoms(std::span<const MulLabel> labels,
                              const SquaringSignature &sig);

struct PublicParameters {
    SquaringSignature signature;
    TimingModel timing;
    double threshold = kDefaultSeparationThreshold;
};

enum class AttackStatus : std::uint8_t {
    Recovered,
    Abstained,
    SegmentationFailed,
    ParseFailed
};

std::string_view to_string(AttackStatus status);

struct AttackReport {
    AttackStatus status = AttackStatus::Abstained;
    std::vector<MulLabel> labels;
    double separation_score = 0;
    /// MSB first. Full result when Recovered, decoded prefix on ParseFailed.
    std::vector<bool> recovered_bits;
    std::optional<std::size_t> failure_offset;
    std::string message;
    /// Filled by score_report() in evaluation mode only.
    std::optional<double> bit_accuracy;
    std::optional<bool> full_recovery;

    std::optional<U256> recovered_scalar() const;
};

/// segment -> classify -> parse. Failures are reported, not thrown.
AttackReport recover_scalar(const PowerTrace &trace, const PublicParameters &pub);

/// Bits of k, MSB first.
std::vector<bool> scalar_bits(const U256 &k);

/// Fraction of k's bits (MSB aligned) that `recovered` reproduces; missing
/// positions count as wrong.
double bit_accuracy(const std::vector<bool> &recovered, const U256 &k);

/// Evaluation-only step: compares against the true scalar.
void score_report(AttackReport &report, const U256 &k);

} // namespace atomsca
