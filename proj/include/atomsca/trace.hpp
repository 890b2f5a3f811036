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

#include "atomsca/datapath.hpp"

#include <iosfwd>
#include <vector>

namespace atomsca {

/// What an attacker records: one power sample per clock cycle plus public
/// facts about the device setup. Nothing in here is derived from k.
struct PowerTrace {
    std::vector<double> samples;
    double clock_period_ns = 30.0;
    Countermeasure mode = Countermeasure::None;
};

/// Header `# cycles=<N> period_ns=<p> mode=<m>`, then `<cycle>,<time_ns>,<power>`
/// with power at six decimals.
void write_trace(std::ostream &os, const PowerTrace &trace);

/// Throws InputError on malformed or truncated input.
PowerTrace read_trace(std::istream &is);

} // namespace atomsca
