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

#include "atomsca/ec_oracle.hpp"
#include "atomsca/errors.hpp"

#include <cstdint>

namespace atomsca {

namespace {

FieldElement curve_rhs(const FieldElement &x, const CurveParams &curve) {
    return fe_add(fe_add(fe_mul(fe_mul(x, x), x), fe_mul(curve.a, x)), curve.b);
}

void require_on_curve(const AffinePoint &P, const CurveParams &curve) {
    if (!is_on_curve(P, curve))
        throw ValidationError("point (" + to_hex(P.x.value()) + ", " +
                              to_hex(P.y.value()) + ") is not on curve " +
                              curve.name);
}

AffinePoint add_unchecked(const AffinePoint &p1, const AffinePoint &p2,
                          const CurveParams &curve) {
    if (p1.at_infinity)
        return p2;
    if (p2.at_infinity)
        return p1;

    const FieldParams &f = *curve.field;
    FieldElement lambda = FieldElement::zero(f);
    if (p1.x == p2.x) {
        if (p1.y != p2.y || p1.y.is_zero())
            return AffinePoint::infinity(f);
        FieldElement three{f, 3};
        FieldElement two{f, 2};
        lambda = fe_mul(fe_add(fe_mul(three, fe_mul(p1.x, p1.x)), curve.a),
                        fe_inv(fe_mul(two, p1.y)));
    } else {
        lambda = fe_mul(fe_sub(p2.y, p1.y), fe_inv(fe_sub(p2.x, p1.x)));
    }
    FieldElement x3 = fe_sub(fe_sub(fe_mul(lambda, lambda), p1.x), p2.x);
    FieldElement y3 = fe_sub(fe_mul(lambda, fe_sub(p1.x, x3)), p1.y);
    return {x3, y3, false};
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1;
    base %= m;
    while (exp) {
        if (exp & 1)
            result = result * base % m;
        base = base * base % m;
        exp >>= 1;
    }
    return result;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

// Number of affine solutions plus the point at infinity, by Euler's criterion.
std::uint64_t count_points(std::uint64_t p, std::uint64_t b) {
    std::uint64_t count = 1;
    for (std::uint64_t x = 0; x < p; ++x) {
        std::uint64_t rhs = (x * x % p * x + (p - 3) * x + b) % p;
        if (rhs == 0)
            count += 1;
        else if (pow_mod(rhs, (p - 1) / 2, p) == 1)
            count += 2;
    }
    return count;
}

std::vector<U256> prime_factors(U256 n) {
    std::vector<U256> out;
    for (U256 d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0)
                n /= d;
        }
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

} // namespace

CurveParams make_curve(std::string name, const U256 &p, const U256 &b,
                       const U256 &gx, const U256 &gy, const U256 &order) {
    FieldRef field;
    try {
        field = FieldParams::create(p);
    } catch (const ConfigError &e) {
        throw ValidationError(e.what());
    }
    const FieldParams &f = *field;
    if (b >= p || gx >= p || gy >= p)
        throw ValidationError("curve constants must be reduced modulo p");

    CurveParams curve{std::move(name),
                      field,
                      fe_neg(FieldElement{f, 3}),
                      FieldElement{f, b},
                      AffinePoint{FieldElement{f, gx}, FieldElement{f, gy}, false},
                      order};

    // 4a^3 + 27b^2 != 0
    FieldElement disc = fe_add(
        fe_mul(FieldElement{f, 4}, fe_mul(fe_mul(curve.a, curve.a), curve.a)),
        fe_mul(FieldElement{f, 27}, fe_mul(curve.b, curve.b)));
    if (disc.is_zero())
        throw ValidationError("curve " + curve.name + " is singular");
    require_on_curve(curve.base_point, curve);

    if (order < 2)
        throw ValidationError("curve order must be at least 2");
    if (!scalar_mul_naive(order, curve.base_point, curve).at_infinity)
        throw ValidationError("order * G is not the point at infinity");
    // For a prime order the check above is already exact; otherwise make
    // sure no proper divisor annihilates G.
    if (!is_probable_prime(order)) {
        if (order >> 64 != 0)
            throw ValidationError("composite order too large to verify");
        for (const U256 &q : prime_factors(order))
            if (scalar_mul_naive(order / q, curve.base_point, curve).at_infinity)
                throw ValidationError("base point order is a proper divisor of "
                                      "the stated order");
    }
    return curve;
}

const CurveParams &p256() {
    static const CurveParams curve = make_curve(
        "p256",
        parse_u256("0xffffffff00000001000000000000000000000000ffffffffffffffffffffffff"),
        parse_u256("0x5ac635d8aa3a93e7b3ebbd55769886bc651d06b0cc53b0f63bce3c3e27d2604b"),
        parse_u256("0x6b17d1f2e12c4247f8bce6e563a440f277037d812deb33a0f4a13945d898c296"),
        parse_u256("0x4fe342e2fe1a7f9b8ee7eb4a7c0f9e162bce33576b315ececbb6406837bf51f5"),
        parse_u256("0xffffffff00000000ffffffffffffffffbce6faada7179e84f3b9cac2fc632551"));
    return curve;
}

CurveParams find_toy_curve(unsigned min_prime, unsigned max_prime) {
    for (std::uint64_t p = std::max(min_prime, 5u); p <= max_prime; ++p) {
        if (!is_prime_u64(p))
            continue;
        for (std::uint64_t b = 1; b < p; ++b) {
            // 4(-3)^3 + 27 b^2 = 27 (b^2 - 4)
            if ((b * b + p * p - 4) % p == 0)
                continue;
            std::uint64_t n = count_points(p, b);
            if (n < 11 || !is_prime_u64(n))
                continue;
            for (std::uint64_t x = 0; x < p; ++x) {
                std::uint64_t rhs = (x * x % p * x + (p - 3) * x + b) % p;
                for (std::uint64_t y = 0; y < p; ++y) {
                    if (y * y % p == rhs)
                        return make_curve("toy" + std::to_string(p), p, b, x,
                                          y, n);
                }
            }
        }
    }
    throw FixtureError("no toy curve with prime order found in [" +
                       std::to_string(min_prime) + ", " +
                       std::to_string(max_prime) + "]");
}

CurveParams named_curve(std::string_view name) {
    if (name == "p256")
        return p256();
    if (name == "toy")
        return find_toy_curve(251);
    if (name == "toy-small")
        return find_toy_curve(29);
    throw ConfigError("unknown curve fixture '" + std::string(name) + "'");
}

bool is_on_curve(const AffinePoint &P, const CurveParams &curve) {
    if (P.at_infinity)
        return true;
    if (!P.x.params().same_as(*curve.field) || !P.y.params().same_as(*curve.field))
        return false;
    return fe_mul(P.y, P.y) == curve_rhs(P.x, curve);
}

AffinePoint point_neg(const AffinePoint &P) {
    if (P.at_infinity)
        return P;
    return {P.x, fe_neg(P.y), false};
}

AffinePoint point_add(const AffinePoint &p1, const AffinePoint &p2,
                      const CurveParams &curve) {
    require_on_curve(p1, curve);
    require_on_curve(p2, curve);
    return add_unchecked(p1, p2, curve);
}

AffinePoint scalar_mul_naive(const U256 &k, const AffinePoint &P,
                             const CurveParams &curve) {
    require_on_curve(P, curve);
    AffinePoint acc = AffinePoint::infinity(*curve.field);
    if (k.is_zero())
        return acc;
    for (int bit = boost::multiprecision::msb(k); bit >= 0; --bit) {
        acc = add_unchecked(acc, acc, curve);
        if (boost::multiprecision::bit_test(k, bit))
            acc = add_unchecked(acc, P, curve);
    }
    return acc;
}

AffinePoint to_affine(const JacobianPoint &J, const CurveParams &curve) {
    if (J.Z.is_zero())
        return AffinePoint::infinity(*curve.field);
    FieldElement zinv = fe_inv(J.Z);
    FieldElement zinv2 = fe_mul(zinv, zinv);
    return {fe_mul(J.X, zinv2), fe_mul(J.Y, fe_mul(zinv2, zinv)), false};
}

JacobianPoint to_jacobian(const AffinePoint &P, const FieldElement &z) {
    if (P.at_infinity)
        return {FieldElement::one(z.params()), FieldElement::one(z.params()),
                FieldElement::zero(z.params())};
    FieldElement z2 = fe_mul(z, z);
    return {fe_mul(P.x, z2), fe_mul(P.y, fe_mul(z2, z)), z};
}

std::vector<AffinePoint> enumerate_points(const CurveParams &curve) {
    const FieldParams &f = *curve.field;
    if (f.modulus() >= (1u << 20))
        throw ConfigError("point enumeration is limited to toy moduli");
    std::uint64_t p = f.modulus().convert_to<std::uint64_t>();
    std::vector<AffinePoint> points;
    for (std::uint64_t x = 0; x < p; ++x) {
        FieldElement fx{f, x};
        U256 rhs = curve_rhs(fx, curve).value();
        for (std::uint64_t y = 0; y < p; ++y)
            if (U256(y * y % p) == rhs)
                points.push_back({fx, FieldElement{f, y}, false});
    }
    return points;
}

} // namespace atomsca
