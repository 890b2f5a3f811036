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

#include "atomsca/field.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace atomsca {

struct AffinePoint {
    FieldElement x;
    FieldElement y;
    bool at_infinity = false;

    static AffinePoint infinity(const FieldParams &field) {
        return {FieldElement::zero(field), FieldElement::zero(field), true};
    }

    friend bool operator==(const AffinePoint &a, const AffinePoint &b) {
        if (a.at_infinity || b.at_infinity)
            return a.at_infinity == b.at_infinity;
        return a.x == b.x && a.y == b.y;
    }
};

/// (X, Y, Z) represents (X/Z^2, Y/Z^3); Z == 0 is the point at infinity.
struct JacobianPoint {
    FieldElement X;
    FieldElement Y;
    FieldElement Z;
};

/// Short Weierstrass curve y^2 = x^3 - 3x + b.
struct CurveParams {
    std::string name;
    FieldRef field;
    FieldElement a;
    FieldElement b;
    AffinePoint base_point;
    U256 order;
};

/// Builds a curve and checks every invariant: prime field, a = -3,
/// non-singular, base point on the curve with exactly the stated order.
/// Throws ValidationError.
CurveParams make_curve(std::string name, const U256 &p, const U256 &b,
                       const U256 &gx, const U256 &gy, const U256 &order);

/// NIST P-256.
const CurveParams &p256();

/// Exhaustive search for a toy curve: the first prime p >= min_prime and the
/// smallest b >= 1 such that the group order is prime and >= 11. The base
/// point is the point with the smallest x (and smallest y). Throws
/// FixtureError if nothing is found below max_prime.
CurveParams find_toy_curve(unsigned min_prime, unsigned max_prime = 1000);

/// "p256", "toy" (p around 250) or "toy-small" (p around 30).
CurveParams named_curve(std::string_view name);

bool is_on_curve(const AffinePoint &P, const CurveParams &curve);

AffinePoint point_neg(const AffinePoint &P);

/// Textbook chord-and-tangent addition. Throws ValidationError for off-curve
/// inputs.
AffinePoint point_add(const AffinePoint &p1, const AffinePoint &p2,
                      const CurveParams &curve);

/// Left-to-right double-and-add in affine coordinates. k == 0 gives infinity.
AffinePoint scalar_mul_naive(const U256 &k, const AffinePoint &P,
                             const CurveParams &curve);

AffinePoint to_affine(const JacobianPoint &J, const CurveParams &curve);

/// (x z^2, y z^3, z). `z` must be nonzero.
JacobianPoint to_jacobian(const AffinePoint &P, const FieldElement &z);

/// Every affine point on a small curve, infinity excluded. Only intended for
/// moduli below 2^20.
std::vector<AffinePoint> enumerate_points(const CurveParams &curve);

} // namespace atomsca
