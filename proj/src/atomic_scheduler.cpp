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

#include "atomsca/atomic_scheduler.hpp"
#include "atomsca/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>

namespace atomsca {

namespace {

struct SymbolicOp {
    FieldOpKind kind;
    std::string_view dest;
    std::string_view src1;
    std::string_view src2;
};

constexpr auto M = FieldOpKind::Mul;
constexpr auto N = FieldOpKind::Neg;
constexpr auto A = FieldOpKind::Add;

// Padding operations. They read the affine input point and write scratch
// registers that no live computation reads.
constexpr SymbolicOp kPadNeg{N, "_", "PX", "PX"};
constexpr SymbolicOp kPadAdd{A, "_", "PX", "PY"};
constexpr SymbolicOp kPadMul{M, "_m", "PX", "PY"};

// 2(X, Y, Z) for a = -3:
//   alpha = (X - Z^2) * 3 (X + Z^2)
//   X3 = alpha^2 - 8 X Y^2
//   Y3 = alpha (4 X Y^2 - X3) - 8 Y^4
//   Z3 = 2 Y Z
// 4 squarings, 4 multiplications, 12 additions, 4 negations. The factor 3 is
// folded into one multiplicand: with Z = 1 (first doubling) X - Z^2 and
// X + Z^2 differ in only a few bits and would look almost like a squaring.
constexpr std::array<SymbolicOp, 4 * kOpsPerAtom> kDoubling{{
    {M, "g", "Y", "Y"},      kPadNeg,                 {A, "g2", "g", "g"},
    {M, "d", "Z", "Z"},      {N, "nd", "d", "d"},     {A, "t2", "X", "d"},
    {A, "t1", "X", "nd"},

    {M, "b2", "X", "g2"},    kPadNeg,                 {A, "t2b", "t2", "t2"},
    {M, "g4", "g2", "g2"},   kPadNeg,                 {A, "t3", "t2b", "t2"},
    {A, "b4", "b2", "b2"},

    {M, "al", "t1", "t3"},   kPadNeg,                 {A, "b8", "b4", "b4"},
    {M, "al2", "al", "al"},  {N, "nb8", "b8", "b8"},  {A, "X", "al2", "nb8"},
    {A, "y8", "g4", "g4"},

    {M, "yz", "Y", "Z"},     {N, "nX", "X", "X"},     {A, "D", "b4", "nX"},
    {M, "y3", "al", "D"},    {N, "ny8", "y8", "y8"},  {A, "Y", "y3", "ny8"},
    {A, "Z", "yz", "yz"},
}};

// (X1, Y1, Z1) + (x2, y2):
//   H = x2 Z1^2 - X1,  R = y2 Z1^3 - Y1
//   X3 = R^2 - H^3 - 2 X1 H^2
//   Y3 = R (X1 H^2 - X3) - Y1 H^3
//   Z3 = Z1 H
// 3 squarings, 8 multiplications and one padding multiplication.
constexpr std::array<SymbolicOp, 6 * kOpsPerAtom> kAddition{{
    {M, "zz", "Z", "Z"},     {N, "nx1", "X", "X"},    kPadAdd,
    {M, "u2", "PX", "zz"},   kPadNeg,                 {A, "h", "u2", "nx1"},
    kPadAdd,

    {M, "zzz", "Z", "zz"},   {N, "ny1", "Y", "Y"},    kPadAdd,
    {M, "hh", "h", "h"},     kPadNeg,                 kPadAdd,
    kPadAdd,

    {M, "s2", "PY", "zzz"},  kPadNeg,                 {A, "r", "s2", "ny1"},
    {M, "hhh", "h", "hh"},   kPadNeg,                 kPadAdd,
    kPadAdd,

    {M, "v", "X", "hh"},     kPadNeg,                 {A, "v2", "v", "v"},
    {M, "r2", "r", "r"},     kPadNeg,                 {A, "w", "hhh", "v2"},
    kPadAdd,

    {M, "Z", "Z", "h"},      {N, "nw", "w", "w"},     {A, "X", "r2", "nw"},
    {M, "yh", "Y", "hhh"},   {N, "nx3", "X", "X"},    {A, "D", "v", "nx3"},
    kPadAdd,

    {M, "rd", "r", "D"},     {N, "nyh", "yh", "yh"},  {A, "Y", "rd", "nyh"},
    kPadMul,                 kPadNeg,                 kPadAdd,
    kPadAdd,
}};

constexpr std::uint16_t kAccX = 0, kAccY = 1, kAccZ = 2, kPointX = 3,
                        kPointY = 4, kFirstTemporary = 5;

std::optional<std::uint16_t> fixed_role(std::string_view name) {
    if (name == "X")
        return kAccX;
    if (name == "Y")
        return kAccY;
    if (name == "Z")
        return kAccZ;
    if (name == "PX")
        return kPointX;
    if (name == "PY")
        return kPointY;
    return std::nullopt;
}

bool is_scratch(std::string_view name) { return name == "_" || name == "_m"; }

struct AllocatedOp {
    FieldOpKind kind;
    // Either a fixed register, a temporary slot, or a scratch marker.
    int dest, src1, src2;
};

constexpr int kScratchMarker = -1;
constexpr int kScratchMulMarker = -2;
constexpr int kTemporaryBase = 1000;

// Linear-scan allocation of temporaries: a temporary's slot is released after
// its last read and the lowest free slot is handed to the next definition.
// Returns the ops with resolved operands and the number of slots used.
std::pair<std::vector<AllocatedOp>, unsigned>
allocate(std::span<const SymbolicOp> ops) {
    std::map<std::string_view, std::size_t> last_use;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        last_use[ops[i].src1] = i;
        if (ops[i].kind != FieldOpKind::Neg)
            last_use[ops[i].src2] = i;
    }

    std::map<std::string_view, int> slot_of;
    std::set<int> free_slots;
    int next_slot = 0;
    std::vector<AllocatedOp> out;

    auto resolve_src = [&](std::string_view name) -> int {
        if (auto r = fixed_role(name))
            return *r;
        auto it = slot_of.find(name);
        if (it == slot_of.end())
            throw FixtureError("schedule reads '" + std::string(name) +
                               "' before writing it");
        return kTemporaryBase + it->second;
    };

    for (std::size_t i = 0; i < ops.size(); ++i) {
        const SymbolicOp &op = ops[i];
        AllocatedOp a{op.kind, 0, resolve_src(op.src1), 0};
        a.src2 = op.kind == FieldOpKind::Neg ? a.src1 : resolve_src(op.src2);

        for (std::string_view src : {op.src1, op.src2}) {
            auto it = slot_of.find(src);
            if (it != slot_of.end() && last_use[src] == i) {
                free_slots.insert(it->second);
                slot_of.erase(it);
            }
        }

        if (op.dest == "_") {
            a.dest = kScratchMarker;
        } else if (op.dest == "_m") {
            a.dest = kScratchMulMarker;
        } else if (auto r = fixed_role(op.dest)) {
            a.dest = *r;
        } else {
            if (slot_of.count(op.dest) || !last_use.count(op.dest) ||
                last_use[op.dest] <= i)
                throw FixtureError("temporary '" + std::string(op.dest) +
                                   "' is redefined or never read");
            int slot;
            if (free_slots.empty()) {
                slot = next_slot++;
            } else {
                slot = *free_slots.begin();
                free_slots.erase(free_slots.begin());
            }
            slot_of[op.dest] = slot;
            a.dest = kTemporaryBase + slot;
        }
        out.push_back(a);
    }
    if (!slot_of.empty())
        throw FixtureError("temporaries live past the end of a pattern");
    return {out, static_cast<unsigned>(next_slot)};
}

std::vector<Atom> materialize(const std::vector<AllocatedOp> &ops,
                              const RegisterLayout &layout) {
    auto reg = [&](int r) {
        if (r == kScratchMarker)
            return layout.scratch;
        if (r == kScratchMulMarker)
            return layout.scratch_mul;
        if (r >= kTemporaryBase)
            return RegisterId{static_cast<std::uint16_t>(
                layout.first_temporary + (r - kTemporaryBase))};
        return RegisterId{static_cast<std::uint16_t>(r)};
    };
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < ops.size(); i += kOpsPerAtom) {
        std::array<MicroOp, kOpsPerAtom> group;
        for (std::size_t j = 0; j < kOpsPerAtom; ++j) {
            const AllocatedOp &a = ops[i + j];
            group[j] = {a.kind, reg(a.src1), reg(a.src2), reg(a.dest)};
        }
        atoms.emplace_back(group);
    }
    return atoms;
}

const FieldElement &read_register(const std::vector<std::optional<FieldElement>> &regs,
                                  RegisterId r) {
    if (r.index >= regs.size())
        throw ProgramError("register r" + std::to_string(r.index) +
                           " is out of range");
    if (!regs[r.index])
        throw ProgramError("read of uninitialized register r" +
                           std::to_string(r.index));
    return *regs[r.index];
}

void execute_atoms(std::span<const Atom> atoms,
                   std::vector<std::optional<FieldElement>> &regs,
                   std::optional<RegisterId> dummy) {
    for (const Atom &atom : atoms) {
        for (const MicroOp &op : atom.ops()) {
            FieldElement a = read_register(regs, op.src1);
            if (op.kind == FieldOpKind::Neg) {
                regs[op.dest.index] = fe_neg(a);
                continue;
            }
            if (op.kind == FieldOpKind::Mul && dummy)
                regs[dummy->index] = a;
            const FieldElement &b = read_register(regs, op.src2);
            regs[op.dest.index] =
                op.kind == FieldOpKind::Mul ? fe_mul(a, b) : fe_add(a, b);
        }
    }
}

std::vector<bool> signature_of(std::span<const Atom> atoms) {
    std::vector<bool> sig;
    for (const Atom &atom : atoms)
        for (const MicroOp &op : atom.ops())
            if (op.kind == FieldOpKind::Mul)
                sig.push_back(op.is_squaring());
    return sig;
}

void self_check(const PatternLibrary &lib) {
    const CurveParams &curve = lib.curve;
    const FieldParams &f = *curve.field;
    const AffinePoint &G = curve.base_point;
    const U256 &n = curve.order;

    unsigned checked = 0;
    for (unsigned m : {2u, 3u, 5u, 7u, 11u, 13u}) {
        U256 mm = U256(m) % n;
        if (mm < 2 || mm == n - 1)
            continue;
        AffinePoint Q = scalar_mul_naive(mm, G, curve);
        FieldElement z{f, U256(m + 3) % f.modulus()};
        if (z.is_zero())
            z = FieldElement::one(f);
        JacobianPoint J = to_jacobian(Q, z);

        std::vector<std::optional<FieldElement>> regs(lib.layout.register_count);
        regs[kAccX] = J.X;
        regs[kAccY] = J.Y;
        regs[kAccZ] = J.Z;
        regs[kPointX] = G.x;
        regs[kPointY] = G.y;

        auto output = [&] {
            return to_affine(JacobianPoint{*regs[kAccX], *regs[kAccY],
                                           *regs[kAccZ]},
                             curve);
        };

        std::vector<std::optional<FieldElement>> saved = regs;
        execute_atoms(lib.doubling, regs, std::nullopt);
        if (!(output() == point_add(Q, Q, curve)))
            throw FixtureError("doubling schedule disagrees with the reference "
                               "group law on " + curve.name);

        regs = saved;
        execute_atoms(lib.addition, regs, std::nullopt);
        if (!(output() == point_add(Q, G, curve)))
            throw FixtureError("addition schedule disagrees with the reference "
                               "group law on " + curve.name);
        ++checked;
    }
    if (checked == 0)
        throw FixtureError("curve order too small to self-check schedules");
}

} // namespace

std::string_view to_string(FieldOpKind kind) {
    switch (kind) {
    case FieldOpKind::Mul:
        return "MUL";
    case FieldOpKind::Neg:
        return "NEG";
    case FieldOpKind::Add:
        return "ADD";
    }
    return "?";
}

Atom::Atom(const std::array<MicroOp, kOpsPerAtom> &ops) : ops_(ops) {
    for (std::size_t i = 0; i < kOpsPerAtom; ++i)
        if (ops[i].kind != kAtomShape[i])
            throw ProgramError("atom slot " + std::to_string(i) +
                               " breaks the MNAMNAA shape");
    for (MicroOp &op : ops_)
        if (op.kind == FieldOpKind::Neg)
            op.src2 = op.src1;
}

PatternLibrary build_pattern_library(const CurveParams &curve) {
    if (!(curve.a == fe_neg(FieldElement{*curve.field, 3})))
        throw ValidationError("atomic patterns require a = -3");

    auto [dbl_ops, dbl_slots] = allocate(kDoubling);
    auto [add_ops, add_slots] = allocate(kAddition);

    RegisterLayout layout;
    layout.acc_x = {kAccX};
    layout.acc_y = {kAccY};
    layout.acc_z = {kAccZ};
    layout.point_x = {kPointX};
    layout.point_y = {kPointY};
    layout.first_temporary = kFirstTemporary;
    layout.temporary_count =
        static_cast<std::uint16_t>(std::max(dbl_slots, add_slots));
    layout.scratch = {static_cast<std::uint16_t>(kFirstTemporary +
                                                 layout.temporary_count)};
    layout.scratch_mul = {static_cast<std::uint16_t>(layout.scratch.index + 1)};
    layout.register_count = layout.scratch_mul.index + 1u;

    PatternLibrary lib{curve, layout, materialize(dbl_ops, layout),
                       materialize(add_ops, layout)};

    if (lib.doubling.size() != 4 || lib.addition.size() != 6)
        throw FixtureError("pattern atom counts must be 4 and 6");
    SquaringSignature sig = squaring_signature(lib);
    if (sig.doubling == sig.addition)
        throw FixtureError("doubling and addition squaring signatures coincide");
    self_check(lib);
    return lib;
}

AtomicProgram compile_scalar(const U256 &k, const AffinePoint &P,
                             const PatternLibrary &lib) {
    if (k < 2)
        throw ConfigError("unsupported scalar " + to_hex(k) +
                          ": the datapath needs k >= 2");
    if (P.at_infinity)
        throw ValidationError("cannot compile a multiple of the point at "
                              "infinity");
    if (!is_on_curve(P, lib.curve))
        throw ValidationError("input point is not on curve " + lib.curve.name);

    const RegisterLayout &L = lib.layout;
    AtomicProgram prog;
    prog.field = lib.curve.field;
    prog.register_count = L.register_count;
    prog.register_init.assign(L.register_count, std::nullopt);
    prog.register_init[L.acc_x.index] = P.x;
    prog.register_init[L.acc_y.index] = P.y;
    prog.register_init[L.acc_z.index] = FieldElement::one(*lib.curve.field);
    prog.register_init[L.point_x.index] = P.x;
    prog.register_init[L.point_y.index] = P.y;
    prog.output_registers = {L.acc_x, L.acc_y, L.acc_z};
    prog.ground_truth = k;

    // The accumulator starts at P, which consumes the most significant bit.
    for (int bit = boost::multiprecision::msb(k) - 1; bit >= 0; --bit) {
        auto position = static_cast<std::uint32_t>(bit);
        for (const Atom &atom : lib.doubling) {
            prog.atoms.push_back(atom);
            prog.origins.push_back({PatternKind::Doubling, position});
        }
        if (boost::multiprecision::bit_test(k, bit)) {
            for (const Atom &atom : lib.addition) {
                prog.atoms.push_back(atom);
                prog.origins.push_back({PatternKind::Addition, position});
            }
        }
    }
    return prog;
}

void validate_program(const AtomicProgram &prog) {
    if (!prog.field)
        throw ProgramError("program has no field");
    if (prog.register_init.size() != prog.register_count)
        throw ProgramError("register init table does not match register count");
    if (prog.origins.size() != prog.atoms.size())
        throw ProgramError("atom origins do not align with atoms");
    auto check = [&](RegisterId r) {
        if (r.index >= prog.register_count)
            throw ProgramError("register r" + std::to_string(r.index) +
                               " exceeds register file size " +
                               std::to_string(prog.register_count));
    };
    for (const Atom &atom : prog.atoms)
        for (const MicroOp &op : atom.ops()) {
            check(op.src1);
            check(op.src2);
            check(op.dest);
        }
    for (RegisterId r : prog.output_registers)
        check(r);
    if (prog.dummy_register)
        check(*prog.dummy_register);
}

JacobianPoint evaluate_program(const AtomicProgram &prog) {
    validate_program(prog);
    std::vector<std::optional<FieldElement>> regs = prog.register_init;
    execute_atoms(prog.atoms, regs, prog.dummy_register);
    return {read_register(regs, prog.output_registers[0]),
            read_register(regs, prog.output_registers[1]),
            read_register(regs, prog.output_registers[2])};
}

SquaringSignature squaring_signature(const PatternLibrary &lib) {
    return {signature_of(lib.doubling), signature_of(lib.addition)};
}

} // namespace atomsca
