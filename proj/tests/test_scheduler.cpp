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

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace atomsca;

namespace {

U256 random_scalar(std::mt19937_64 &rng, const U256 &order) {
    U256 v = 0;
    for (int i = 0; i < 4; ++i)
        v = (v << 64) | rng();
    return 2 + v % (order - 2);
}

std::size_t popcount(U256 k) {
    std::size_t n = 0;
    for (; k != 0; k >>= 1)
        n += static_cast<std::size_t>(k & 1);
    return n;
}

std::size_t bit_length(const U256 &k) { return k == 0 ? 0 : msb(k) + 1; }

const PatternLibrary &p256_lib() {
    static const PatternLibrary lib = build_pattern_library(p256());
    return lib;
}

} // namespace

TEST(Scheduler, PatternSizes) {
    const PatternLibrary &lib = p256_lib();
    EXPECT_EQ(lib.doubling.size(), 4u);
    EXPECT_EQ(lib.addition.size(), 6u);
    for (const auto *pattern : {&lib.doubling, &lib.addition})
        for (const Atom &atom : *pattern)
            for (std::size_t i = 0; i < kOpsPerAtom; ++i)
                EXPECT_EQ(atom[i].kind, kAtomShape[i]);
}

TEST(Scheduler, AtomRejectsWrongShape) {
    std::array<MicroOp, kOpsPerAtom> ops{};
    for (std::size_t i = 0; i < kOpsPerAtom; ++i)
        ops[i] = {kAtomShape[i], {0}, {0}, {1}};
    EXPECT_NO_THROW(Atom{ops});
    ops[2].kind = FieldOpKind::Mul;
    EXPECT_THROW(Atom{ops}, ProgramError);
}

TEST(Scheduler, SquaringSignatures) {
    SquaringSignature sig = squaring_signature(p256_lib());
    EXPECT_EQ(sig.doubling, (std::vector<bool>{1, 1, 0, 1, 0, 1, 0, 0}));
    EXPECT_EQ(sig.addition,
              (std::vector<bool>{1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0}));
    // 4 squarings per doubling, 3 per addition.
    EXPECT_EQ(std::count(sig.doubling.begin(), sig.doubling.end(), true), 4);
    EXPECT_EQ(std::count(sig.addition.begin(), sig.addition.end(), true), 3);
    EXPECT_EQ(squaring_signature(build_pattern_library(named_curve("toy"))), sig);
}

TEST(Scheduler, AtomCountExamples) {
    const PatternLibrary &lib = p256_lib();
    const AffinePoint &G = lib.curve.base_point;
    EXPECT_EQ(compile_scalar(2, G, lib).atoms.size(), 4u);
    EXPECT_EQ(compile_scalar(3, G, lib).atoms.size(), 10u);
    EXPECT_EQ(compile_scalar(5, G, lib).atoms.size(), 14u);
    EXPECT_EQ(compile_scalar(4, G, lib).atoms.size(), 8u);
}

TEST(Scheduler, RejectsDegenerateInputs) {
    const PatternLibrary &lib = p256_lib();
    EXPECT_THROW(compile_scalar(0, lib.curve.base_point, lib), ConfigError);
    EXPECT_THROW(compile_scalar(1, lib.curve.base_point, lib), ConfigError);
    AffinePoint off{FieldElement::zero(*lib.curve.field),
                    FieldElement::zero(*lib.curve.field)};
    EXPECT_THROW(compile_scalar(5, off, lib), ValidationError);
    EXPECT_THROW(compile_scalar(5, AffinePoint::infinity(*lib.curve.field), lib),
                 ValidationError);
}

TEST(Scheduler, CountingLawAndShapeInvariance) {
    const PatternLibrary &lib = p256_lib();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        U256 k = random_scalar(rng, lib.curve.order);
        AtomicProgram prog = compile_scalar(k, lib.curve.base_point, lib);
        const std::size_t ones = popcount(k) - 1;
        const std::size_t zeros = bit_length(k) - 1 - ones;
        ASSERT_EQ(prog.atoms.size(), 4 * zeros + 10 * ones);
        ASSERT_EQ(prog.origins.size(), prog.atoms.size());
        for (const Atom &atom : prog.atoms)
            for (std::size_t j = 0; j < kOpsPerAtom; ++j)
                ASSERT_EQ(atom[j].kind, kAtomShape[j]);
    }
}

TEST(Scheduler, OriginsFollowBits) {
    const PatternLibrary &lib = p256_lib();
    AtomicProgram prog = compile_scalar(0b1011, lib.curve.base_point, lib);
    // bits below the MSB: 0, 1, 1
    std::vector<AtomOrigin> expected;
    auto push = [&](PatternKind kind, std::uint32_t bit, int n) {
        for (int i = 0; i < n; ++i)
            expected.push_back({kind, bit});
    };
    push(PatternKind::Doubling, 2, 4);
    push(PatternKind::Doubling, 1, 4);
    push(PatternKind::Addition, 1, 6);
    push(PatternKind::Doubling, 0, 4);
    push(PatternKind::Addition, 0, 6);
    EXPECT_EQ(prog.origins, expected);
    EXPECT_EQ(prog.ground_truth, U256(0b1011));
}

TEST(Scheduler, ExhaustiveToyCorrectness) {
    for (const char *name : {"toy-small", "toy"}) {
        CurveParams c = named_curve(name);
        PatternLibrary lib = build_pattern_library(c);
        for (const AffinePoint &P : enumerate_points(c))
            for (U256 k = 2; k < c.order; ++k) {
                AtomicProgram prog = compile_scalar(k, P, lib);
                ASSERT_EQ(to_affine(evaluate_program(prog), c),
                          scalar_mul_naive(k, P, c))
                    << name << " k=" << k;
            }
    }
}

TEST(Scheduler, RandomP256Correctness) {
    const PatternLibrary &lib = p256_lib();
    const CurveParams &c = lib.curve;
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        U256 k = random_scalar(rng, c.order);
        AtomicProgram prog = compile_scalar(k, c.base_point, lib);
        ASSERT_EQ(to_affine(evaluate_program(prog), c),
                  scalar_mul_naive(k, c.base_point, c))
            << to_hex(k);
    }
}

TEST(Scheduler, UninitializedReadIsAProgramError) {
    const PatternLibrary &lib = p256_lib();
    AtomicProgram prog = compile_scalar(2, lib.curve.base_point, lib);
    prog.register_init[lib.layout.acc_z.index].reset();
    EXPECT_THROW(evaluate_program(prog), ProgramError);
}

TEST(Scheduler, EmptyProgramReturnsInitialAccumulator) {
    const PatternLibrary &lib = p256_lib();
    AtomicProgram prog = compile_scalar(2, lib.curve.base_point, lib);
    prog.atoms.clear();
    prog.origins.clear();
    EXPECT_EQ(to_affine(evaluate_program(prog), lib.curve), lib.curve.base_point);
}

TEST(Scheduler, ValidateRejectsOutOfRangeRegisters) {
    const PatternLibrary &lib = p256_lib();
    AtomicProgram prog = compile_scalar(3, lib.curve.base_point, lib);
    EXPECT_NO_THROW(validate_program(prog));
    auto ops = prog.atoms[0].ops();
    ops[0].src1 = {static_cast<std::uint16_t>(prog.register_count)};
    prog.atoms[0] = Atom(ops);
    EXPECT_THROW(validate_program(prog), ProgramError);
}

TEST(Scheduler, ProgramTextRoundTrip) {
    const PatternLibrary &lib = p256_lib();
    std::mt19937_64 rng(13);
    for (int i = 0; i < 10; ++i) {
        U256 k = random_scalar(rng, lib.curve.order);
        AtomicProgram prog = compile_scalar(k, lib.curve.base_point, lib);
        std::stringstream ss;
        write_program(ss, prog);
        AtomicProgram back = read_program(ss);
        EXPECT_EQ(back.atoms, prog.atoms);
        EXPECT_EQ(back.origins, prog.origins);
        EXPECT_EQ(back.register_count, prog.register_count);
        EXPECT_EQ(back.output_registers, prog.output_registers);
        EXPECT_EQ(back.register_init, prog.register_init);
        EXPECT_EQ(evaluate_program(back).X, evaluate_program(prog).X);
        std::stringstream again;
        write_program(again, back);
        EXPECT_EQ(again.str(), [&] {
            std::stringstream s;
            write_program(s, prog);
            return s.str();
        }());
    }
}

TEST(Scheduler, MalformedProgramTextRejected) {
    for (const char *text :
         {"", "atomsca-program 2\n",
          "atomsca-program 1\nmodulus 0x11\nregisters 4\natom D 0\nMUL 0 0 1\n",
          "atomsca-program 1\nmodulus 0x11\nregisters 2\ninit 5 0x1\n",
          "atomsca-program 1\nmodulus 0x10\nregisters 2\n"}) {
        std::istringstream in(text);
        EXPECT_ANY_THROW(read_program(in)) << text;
    }
}
