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

#include "atomsca/field.hpp"
#include "atomsca/errors.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <cctype>
#include <random>
#include <sstream>

namespace atomsca {

namespace {

constexpr std::uint64_t kExactPrimalityLimit = 1u << 20;

bool is_prime_small(std::uint64_t n) {
    if (n < 2)
        return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

void require_same_field(const FieldElement &a, const FieldElement &b) {
    if (!a.params().same_as(b.params()))
        throw ConfigError("field elements belong to different moduli");
}

} // namespace

U256 parse_u256(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    if (text.empty())
        throw InputError("empty integer literal");

    unsigned base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        base = 16;
        text.remove_prefix(2);
    }

    U512 acc = 0;
    for (char c : text) {
        unsigned digit;
        if (c >= '0' && c <= '9')
            digit = c - '0';
        else if (base == 16 && c >= 'a' && c <= 'f')
            digit = c - 'a' + 10;
        else if (base == 16 && c >= 'A' && c <= 'F')
            digit = c - 'A' + 10;
        else
            throw InputError("invalid digit '" + std::string(1, c) +
                             "' in integer literal");
        acc = acc * base + digit;
        if (acc >> 256 != 0)
            throw InputError("integer literal exceeds 256 bits");
    }
    return U256(acc);
}

std::string to_hex(const U256 &v) {
    std::ostringstream os;
    os << std::hex << v;
    return "0x" + os.str();
}

bool is_probable_prime(const U256 &n) {
    if (n < kExactPrimalityLimit)
        return is_prime_small(n.convert_to<std::uint64_t>());
    if (!boost::multiprecision::bit_test(n, 0))
        return false;
    std::mt19937_64 rng(0x5eedULL);
    return boost::multiprecision::miller_rabin_test(n, 32, rng);
}

std::shared_ptr<const FieldParams> FieldParams::create(const U256 &modulus) {
    if (modulus < 3 || !boost::multiprecision::bit_test(modulus, 0))
        throw ConfigError("field modulus must be an odd prime, got " +
                          to_hex(modulus));
    if (!is_probable_prime(modulus))
        throw ConfigError("field modulus " + to_hex(modulus) +
                          " is not prime");
    unsigned width = boost::multiprecision::msb(modulus) + 1;
    return std::shared_ptr<const FieldParams>(new FieldParams(modulus, width));
}

FieldElement fe_add(const FieldElement &a, const FieldElement &b) {
    require_same_field(a, b);
    const U256 &p = a.params().modulus();
    // a + b may exceed 2^256 for moduli close to the top.
    U256 room = p - b.value();
    if (a.value() >= room)
        return {a.params(), a.value() - room};
    return {a.params(), a.value() + b.value()};
}

FieldElement fe_neg(const FieldElement &a) {
    if (a.is_zero())
        return a;
    return {a.params(), a.params().modulus() - a.value()};
}

FieldElement fe_sub(const FieldElement &a, const FieldElement &b) {
    require_same_field(a, b);
    if (a.value() >= b.value())
        return {a.params(), a.value() - b.value()};
    return {a.params(), a.params().modulus() - (b.value() - a.value())};
}

FieldElement fe_mul(const FieldElement &a, const FieldElement &b) {
    require_same_field(a, b);
    U512 product = U512(a.value()) * b.value();
    return {a.params(), U256(product % a.params().modulus())};
}

FieldElement fe_pow(const FieldElement &a, const U256 &exponent) {
    FieldElement result = FieldElement::one(a.params());
    if (exponent.is_zero())
        return result;
    for (int bit = boost::multiprecision::msb(exponent); bit >= 0; --bit) {
        result = fe_mul(result, result);
        if (boost::multiprecision::bit_test(exponent, bit))
            result = fe_mul(result, a);
    }
    return result;
}

FieldElement fe_inv(const FieldElement &a) {
    if (a.is_zero())
        throw ValidationError("zero has no multiplicative inverse");
    return fe_pow(a, a.params().modulus() - 2);
}

} // namespace atomsca
