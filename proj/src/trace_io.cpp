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
#include "atomsca/trace.hpp"
#include "text_util.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace atomsca {

namespace {

std::string_view header_value(std::string_view token, std::string_view key) {
    if (token.substr(0, key.size()) != key || token.size() <= key.size() ||
        token[key.size()] != '=')
        throw InputError("trace header: expected '" + std::string(key) + "='");
    return token.substr(key.size() + 1);
}

} // namespace

void write_trace(std::ostream &os, const PowerTrace &trace) {
    os << "# cycles=" << trace.samples.size()
       << " period_ns=" << text::shortest(trace.clock_period_ns)
       << " mode=" << to_string(trace.mode) << '\n';
    std::string line;
    for (std::size_t t = 0; t < trace.samples.size(); ++t) {
        line = std::to_string(t);
        line += ',';
        line += text::shortest(static_cast<double>(t) * trace.clock_period_ns);
        line += ',';
        line += text::fixed6(trace.samples[t]);
        line += '\n';
        os << line;
    }
}

PowerTrace read_trace(std::istream &is) {
    std::string line;
    if (!std::getline(is, line))
        throw InputError("trace file is empty");
    auto tokens = text::split(text::trim(line), ' ');
    if (tokens.size() != 4 || tokens[0] != "#")
        throw InputError("malformed trace header '" + line + "'");

    PowerTrace trace;
    std::size_t cycles = 0;
    if (!text::parse_uint(header_value(tokens[1], "cycles"), cycles))
        throw InputError("trace header: bad cycle count");
    if (!text::parse_double(header_value(tokens[2], "period_ns"),
                            trace.clock_period_ns) ||
        !(trace.clock_period_ns > 0))
        throw InputError("trace header: bad clock period");
    try {
        trace.mode = parse_countermeasure(header_value(tokens[3], "mode"));
    } catch (const ConfigError &e) {
        throw InputError(e.what());
    }

    trace.samples.reserve(cycles);
    while (std::getline(is, line)) {
        std::string_view l = text::trim(line);
        if (l.empty())
            continue;
        auto fields = text::split(l, ',');
        std::size_t cycle = 0;
        double time_ns = 0, power = 0;
        if (fields.size() != 3 || !text::parse_uint(fields[0], cycle) ||
            !text::parse_double(fields[1], time_ns) ||
            !text::parse_double(fields[2], power))
            throw InputError("malformed trace line " +
                             std::to_string(trace.samples.size() + 2) + ": '" +
                             line + "'");
        if (cycle != trace.samples.size())
            throw InputError("trace cycles are not consecutive at cycle " +
                             std::to_string(cycle));
        trace.samples.push_back(power);
    }
    if (trace.samples.size() != cycles)
        throw InputError("trace is truncated: header announces " +
                         std::to_string(cycles) + " cycles, found " +
                         std::to_string(trace.samples.size()));
    return trace;
}

} // namespace atomsca
