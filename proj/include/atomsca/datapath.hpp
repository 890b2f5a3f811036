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

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace atomsca {

enum class Countermeasure : std::uint8_t { None, Cm1BusReload, Cm2DummyRegister };

/// "none", "cm1" or "cm2".
std::string_view to_string(Countermeasure mode);
/// Throws ConfigError for unknown names.
Countermeasure parse_countermeasure(std::string_view name);

inline constexpr std::array<Countermeasure, 3> kAllCountermeasures{
    Countermeasure::None, Countermeasure::Cm1BusReload,
    Countermeasure::Cm2DummyRegister};

struct DatapathConfig {
    unsigned mul_latency = 4;
    unsigned addsub_latency = 1;
    Countermeasure countermeasure = Countermeasure::None;
    /// Seeds the random source choice of the bus re-loading countermeasure.
    std::uint64_t rng_seed = 0;
    double clock_period_ns = 30.0;

    /// Throws ConfigError.
    void validate() const;

    friend bool operator==(const DatapathConfig &, const DatapathConfig &) = default;
};

/// Multiplexer select value. Registers occupy [0, register_count), then the
/// multiplier block, then the adder/subtractor block.
struct SourceAddress {
    std::uint16_t address = 0;

    friend auto operator<=>(const SourceAddress &, const SourceAddress &) = default;
};

struct SourceMap {
    std::size_t register_count = 0;
    SourceAddress mul_block;
    SourceAddress addsub_block;
    std::size_t source_count = 0;
    /// ceil(log2(source_count)).
    unsigned address_width = 0;

    static SourceMap for_registers(std::size_t register_count);
    SourceAddress of(RegisterId r) const { return {r.index}; }
};

enum class Phase : std::uint8_t { Fetch1, DummyReload, Fetch2, Compute, Writeback };

inline constexpr std::size_t kPhaseCount = 5;
std::string_view to_string(Phase phase);

/// Raw bus contents, little-endian 64-bit words.
using BusWord = std::array<std::uint64_t, 4>;

BusWord to_bus_word(const U256 &v);

struct CycleRecord {
    std::uint32_t cycle;
    SourceAddress bus_source;
    BusWord bus_value;
    Phase phase;
    std::uint32_t op_index;
    bool is_mul_op;
};

/// Ground truth for one micro-op, used by evaluation code only.
struct OpAnnotation {
    FieldOpKind kind;
    bool squaring_by_address;
    bool squaring_by_value;
};

struct ExecutionLog {
    std::vector<CycleRecord> records;
    std::vector<std::optional<FieldElement>> final_registers;
    std::vector<OpAnnotation> annotations;
    SourceMap sources;
    Countermeasure countermeasure = Countermeasure::None;
    double clock_period_ns = 30.0;
    std::array<RegisterId, 3> output_registers{};
};

/// Adds one DUMMY register. Every MUL latches its first operand into it during
/// the first fetch; squarings fetch their second operand from it.
AtomicProgram apply_cm2_rewrite(const AtomicProgram &prog);

/// Uniform choice among [0, source_count) minus `current` and `forbidden`.
/// Throws ConfigError when nothing is eligible.
SourceAddress choose_cm1_dummy_source(std::mt19937_64 &rng, SourceAddress current,
                                      std::span<const SourceAddress> forbidden,
                                      std::size_t source_count);

/// Cycle-by-cycle execution. Under the dummy-register countermeasure a
/// program that was not rewritten yet is rewritten first.
ExecutionLog run_program(const AtomicProgram &prog, const DatapathConfig &cfg);

/// Jacobian contents of the output registers after a run.
JacobianPoint result_point(const ExecutionLog &log);

/// Cycles a single micro-op takes under `cfg`.
unsigned op_cycles(FieldOpKind kind, const DatapathConfig &cfg);

} // namespace atomsca
