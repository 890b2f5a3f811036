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

#include "atomsca/ec_oracle.hpp"
#include "atomsca/field.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace atomsca {

enum class FieldOpKind : std::uint8_t { Mul, Neg, Add };

std::string_view to_string(FieldOpKind kind);

/// Index of one field-element-wide register.
struct RegisterId {
    std::uint16_t index = 0;

    friend auto operator<=>(const RegisterId &, const RegisterId &) = default;
};

/// One field operation. NEG ignores src2 and carries src2 == src1.
struct MicroOp {
    FieldOpKind kind;
    RegisterId src1;
    RegisterId src2;
    RegisterId dest;

    /// A multiplication whose operands come from the same register.
    bool is_squaring() const {
        return kind == FieldOpKind::Mul && src1 == src2;
    }

    friend bool operator==(const MicroOp &, const MicroOp &) = default;
};

inline constexpr std::size_t kOpsPerAtom = 7;
inline constexpr std::size_t kMulSlotsPerAtom = 2;
inline constexpr std::array<FieldOpKind, kOpsPerAtom> kAtomShape{
    FieldOpKind::Mul, FieldOpKind::Neg, FieldOpKind::Add, FieldOpKind::Mul,
    FieldOpKind::Neg, FieldOpKind::Add, FieldOpKind::Add};

/// Seven micro-ops in MNAMNAA order. The constructor rejects anything else.
class Atom {
  public:
    explicit Atom(const std::array<MicroOp, kOpsPerAtom> &ops);

    const std::array<MicroOp, kOpsPerAtom> &ops() const { return ops_; }
    const MicroOp &operator[](std::size_t i) const { return ops_[i]; }

    friend bool operator==(const Atom &, const Atom &) = default;

  private:
    std::array<MicroOp, kOpsPerAtom> ops_;
};

enum class PatternKind : std::uint8_t { Doubling, Addition };

/// Fixed register roles shared by both patterns. Temporaries occupy
/// [first_temporary, first_temporary + temporary_count).
struct RegisterLayout {
    RegisterId acc_x;
    RegisterId acc_y;
    RegisterId acc_z;
    RegisterId point_x;
    RegisterId point_y;
    std::uint16_t first_temporary = 0;
    std::uint16_t temporary_count = 0;
    /// Destination of padding NEG/ADD operations.
    RegisterId scratch;
    /// Destination of the padding multiplication.
    RegisterId scratch_mul;
    std::size_t register_count = 0;
};

struct PatternLibrary {
    CurveParams curve;
    RegisterLayout layout;
    /// Jacobian doubling for a = -3, 4 atoms.
    std::vector<Atom> doubling;
    /// Mixed Jacobian + affine addition, 6 atoms.
    std::vector<Atom> addition;
};

struct AtomOrigin {
    PatternKind pattern;
    /// Bit of k (LSB = 0) that this atom processes.
    std::uint32_t bit_position;

    friend bool operator==(const AtomOrigin &, const AtomOrigin &) = default;
};

struct AtomicProgram {
    FieldRef field;
    std::vector<Atom> atoms;
    std::vector<AtomOrigin> origins;
    std::size_t register_count = 0;
    std::vector<std::optional<FieldElement>> register_init;
    std::array<RegisterId, 3> output_registers{};
    /// Set by the dummy-register rewrite. Every MUL copies its first operand
    /// into this register while fetching it.
    std::optional<RegisterId> dummy_register;
    /// Scalar retained for evaluation only; never consulted by execution.
    std::optional<U256> ground_truth;

    std::size_t op_count() const { return atoms.size() * kOpsPerAtom; }
    std::size_t mul_op_count() const { return atoms.size() * kMulSlotsPerAtom; }
    const MicroOp &op(std::size_t i) const {
        return atoms[i / kOpsPerAtom][i % kOpsPerAtom];
    }
};

/// Per MUL slot, in order: true where the baseline schedule squares.
struct SquaringSignature {
    std::vector<bool> doubling;
    std::vector<bool> addition;

    friend bool operator==(const SquaringSignature &,
                           const SquaringSignature &) = default;
};

/// Builds both schedules and checks them against the affine reference on a
/// handful of points. Throws FixtureError when a schedule is wrong or the two
/// squaring signatures coincide.
PatternLibrary build_pattern_library(const CurveParams &curve);

/// Left-to-right double-and-add over the pattern library. Requires k >= 2
/// (ConfigError) and P a finite point on the curve (ValidationError).
AtomicProgram compile_scalar(const U256 &k, const AffinePoint &P,
                             const PatternLibrary &lib);

/// Runs every micro-op as plain field arithmetic and returns the output
/// registers. Throws ProgramError on reads of unwritten registers.
JacobianPoint evaluate_program(const AtomicProgram &prog);

/// Structural checks: register indices in range, init table sized, atoms and
/// origins aligned. Throws ProgramError.
void validate_program(const AtomicProgram &prog);

SquaringSignature squaring_signature(const PatternLibrary &lib);

/// Line-oriented text form; see README for the grammar.
void write_program(std::ostream &os, const AtomicProgram &prog);
AtomicProgram read_program(std::istream &is);

} // namespace atomsca
