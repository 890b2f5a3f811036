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

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <string>
#include <string_view>

namespace atomsca {

using U256 = boost::multiprecision::uint256_t;
using U512 = boost::multiprecision::uint512_t;

/// Parses a decimal or 0x-prefixed hexadecimal integer. Throws InputError.
U256 parse_u256(std::string_view text);
std::string to_hex(const U256 &v);

/// A prime modulus. Always held through shared_ptr so that elements can keep
/// a plain pointer to it.
class FieldParams {
  public:
    /// Validates that `modulus` is an odd prime (exact below 2^20, Miller-Rabin
    /// above) and throws ConfigError otherwise.
    static std::shared_ptr<const FieldParams> create(const U256 &modulus);

    const U256 &modulus() const { return modulus_; }
    unsigned bit_width() const { return bit_width_; }

    bool same_as(const FieldParams &other) const {
        return this == &other || modulus_ == other.modulus_;
    }

  private:
    FieldParams(U256 modulus, unsigned bit_width)
        : modulus_(std::move(modulus)), bit_width_(bit_width) {}

    U256 modulus_;
    unsigned bit_width_;
};

using FieldRef = std::shared_ptr<const FieldParams>;

bool is_probable_prime(const U256 &n);

/// Canonical residue 0 <= value < p. The element does not own its params;
/// the FieldRef that created them must outlive it.
class FieldElement {
  public:
    FieldElement(const FieldParams &params, const U256 &value)
        : value_(value >= params.modulus() ? U256(value % params.modulus())
                                           : value),
          params_(&params) {}

    static FieldElement zero(const FieldParams &params) { return {params, 0}; }
    static FieldElement one(const FieldParams &params) { return {params, 1}; }

    const U256 &value() const { return value_; }
    const FieldParams &params() const { return *params_; }
    bool is_zero() const { return value_.is_zero(); }

    friend bool operator==(const FieldElement &a, const FieldElement &b) {
        return a.value_ == b.value_ && a.params_->same_as(*b.params_);
    }

  private:
    U256 value_;
    const FieldParams *params_;
};

FieldElement fe_add(const FieldElement &a, const FieldElement &b);
FieldElement fe_neg(const FieldElement &a);
FieldElement fe_sub(const FieldElement &a, const FieldElement &b);
FieldElement fe_mul(const FieldElement &a, const FieldElement &b);
FieldElement fe_pow(const FieldElement &a, const U256 &exponent);
/// a^(p-2). Throws ValidationError for a == 0.
FieldElement fe_inv(const FieldElement &a);

inline FieldElement operator+(const FieldElement &a, const FieldElement &b) {
    return fe_add(a, b);
}
inline FieldElement operator-(const FieldElement &a, const FieldElement &b) {
    return fe_sub(a, b);
}
inline FieldElement operator-(const FieldElement &a) { return fe_neg(a); }
inline FieldElement operator*(const FieldElement &a, const FieldElement &b) {
    return fe_mul(a, b);
}

} // namespace atomsca
