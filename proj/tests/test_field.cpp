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
#include "atomsca/field.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace atomsca;

namespace {

// Schoolbook reference on plain 64-bit integers for small moduli.
std::uint64_t ref_pow(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    for (std::uint64_t i = 0; i < e; ++i)
        r = r * a % p;
    return r;
}

U256 random_u256(std::mt19937_64 &rng) {
    U256 v = 0;
    for (int i = 0; i < 4; ++i)
        v = (v << 64) | rng();
    return v;
}

const U256 kP256 =
    parse_u256("0xffffffff00000001000000000000000000000000ffffffffffffffffffffffff");

} // namespace

TEST(Field, SmallExamples) {
    auto F = FieldParams::create(17);
    FieldElement a(*F, 15), b(*F, 5);
    EXPECT_EQ((a + b).value(), 3);
    EXPECT_EQ((a - b).value(), 10);
    EXPECT_EQ((b - a).value(), 7);
    EXPECT_EQ((a * b).value(), 75 % 17);
    EXPECT_EQ(fe_neg(FieldElement(*F, 0)).value(), 0);
    EXPECT_EQ(fe_inv(FieldElement(*F, 3)).value(), 6);
    EXPECT_EQ(FieldElement(*F, 40).value(), 6);
}

TEST(Field, InverseOfZeroThrows) {
    auto F = FieldParams::create(17);
    EXPECT_THROW(fe_inv(FieldElement::zero(*F)), ValidationError);
}

TEST(Field, RejectsNonPrimeModuli) {
    for (unsigned m : {0u, 1u, 2u, 4u, 15u, 21u, 561u})
        EXPECT_THROW(FieldParams::create(m), ConfigError) << m;
    EXPECT_THROW(FieldParams::create(kP256 + 2), ConfigError);
    EXPECT_NO_THROW(FieldParams::create(kP256));
}

TEST(Field, MixedFieldsThrow) {
    auto F = FieldParams::create(17);
    auto G = FieldParams::create(19);
    EXPECT_THROW(fe_add(FieldElement(*F, 1), FieldElement(*G, 1)), ConfigError);
    EXPECT_THROW(fe_mul(FieldElement(*F, 1), FieldElement(*G, 1)), ConfigError);
}

TEST(Field, ExhaustiveSmallPrimesMatchReference) {
    for (unsigned p : {3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u}) {
        auto F = FieldParams::create(p);
        for (unsigned x = 0; x < p; ++x) {
            FieldElement a(*F, x);
            EXPECT_EQ(fe_neg(a).value(), (p - x) % p);
            if (x != 0) {
                EXPECT_EQ((fe_inv(a) * a).value(), 1);
                EXPECT_EQ(fe_inv(a).value(), ref_pow(x, p - 2, p));
            }
            for (unsigned y = 0; y < p; ++y) {
                FieldElement b(*F, y);
                EXPECT_EQ((a + b).value(), (x + y) % p);
                EXPECT_EQ((a - b).value(), (x + p - y) % p);
                EXPECT_EQ((a * b).value(), x * y % p);
                EXPECT_EQ(fe_pow(a, y).value(), ref_pow(x, y, p));
            }
        }
    }
}

TEST(Field, RingLawsExhaustiveSmall) {
    for (unsigned p : {5u, 13u, 31u}) {
        auto F = FieldParams::create(p);
        for (unsigned x = 0; x < p; ++x)
            for (unsigned y = 0; y < p; ++y)
                for (unsigned z = 0; z < p; ++z) {
                    FieldElement a(*F, x), b(*F, y), c(*F, z);
                    ASSERT_EQ(a * (b + c), a * b + a * c);
                    ASSERT_EQ((a + b) + c, a + (b + c));
                    ASSERT_EQ((a * b) * c, a * (b * c));
                }
    }
}

TEST(Field, P256RandomTriples) {
    auto F = FieldParams::create(kP256);
    std::mt19937_64 rng(7);
    const U512 p = kP256;
    for (int i = 0; i < 500; ++i) {
        FieldElement a(*F, random_u256(rng)), b(*F, random_u256(rng)),
            c(*F, random_u256(rng));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ(a - a, FieldElement::zero(*F));
        EXPECT_EQ((a + b).value(),
                  U256((U512(a.value()) + U512(b.value())) % p));
        EXPECT_EQ((a * b).value(), U256(U512(a.value()) * U512(b.value()) % p));
        if (!a.is_zero())
            EXPECT_EQ(a * fe_inv(a), FieldElement::one(*F));
    }
}

TEST(Field, AdditionNearModulusDoesNotOverflow) {
    auto F = FieldParams::create(kP256);
    FieldElement m1(*F, kP256 - 1);
    EXPECT_EQ((m1 + m1).value(), kP256 - 2);
    EXPECT_EQ((m1 * m1).value(), 1);
}

TEST(Field, ParseU256) {
    EXPECT_EQ(parse_u256("255"), 255);
    EXPECT_EQ(parse_u256("0xff"), 255);
    EXPECT_EQ(parse_u256("0XFF"), 255);
    EXPECT_EQ(to_hex(255), "0xff");
    EXPECT_EQ(parse_u256(to_hex(kP256)), kP256);
    for (const char *bad : {"", "0x", "12a", "-1", "0x1g",
                            "0x10000000000000000000000000000000000000000000000000000000000000000"})
        EXPECT_THROW(parse_u256(bad), InputError) << bad;
}
