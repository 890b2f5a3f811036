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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace atomsca {

/// Invalid or inconsistent configuration (mismatched fields, bad options).
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Points or parameters that violate a mathematical precondition.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed atomic programs, e.g. reading a register nobody wrote.
class ProgramError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A pattern schedule failed its self-check against the reference math.
class FixtureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input files or empty inputs.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SegmentationError : public std::runtime_error {
  public:
    SegmentationError(std::size_t expected_multiple, std::size_t actual)
        : std::runtime_error("trace length " + std::to_string(actual) +
                             " is not a positive multiple of the atom length " +
                             std::to_string(expected_multiple)),
          expected_multiple(expected_multiple), actual(actual) {}

    std::size_t expected_multiple;
    std::size_t actual;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t offset, const std::string &what,
               std::vector<bool> prefix = {})
        : std::runtime_error(what + " at label offset " +
                             std::to_string(offset)),
          offset(offset), prefix(std::move(prefix)) {}

    std::size_t offset;
    /// Bits decoded before the failure, MSB first (implicit leading one
    /// included).
    std::vector<bool> prefix;
};

} // namespace atomsca
