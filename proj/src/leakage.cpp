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

#include "atomsca/leakage.hpp"
#include "atomsca/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace atomsca {

namespace {

constexpr std::uint64_t kMuxWeightStream = 0x6d75785f77656967ULL;

std::vector<double> mux_weights(const LeakageParams &params, unsigned width) {
    std::vector<double> w(width, 1.0);
    if (params.mux_model == MuxModel::WeightedBits) {
        std::mt19937_64 rng(params.noise_seed ^ kMuxWeightStream);
        std::uniform_real_distribution<double> dist(0.5, 1.5);
        for (double &x : w)
            x = dist(rng);
    }
    return w;
}

unsigned data_distance(const BusWord &a, const BusWord &b) {
    unsigned d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += std::popcount(a[i] ^ b[i]);
    return d;
}

void accumulate(GroupStats &g, double v) {
    if (g.count == 0) {
        g.min = g.max = v;
    } else {
        g.min = std::min(g.min, v);
        g.max = std::max(g.max, v);
    }
    g.mean += (v - g.mean) / static_cast<double>(++g.count);
}

} // namespace

std::string_view to_string(MuxModel model) {
    return model == MuxModel::LinearHd ? "linear_hd" : "weighted_bits";
}

MuxModel parse_mux_model(std::string_view name) {
    if (name == "linear_hd")
        return MuxModel::LinearHd;
    if (name == "weighted_bits")
        return MuxModel::WeightedBits;
    throw ConfigError("unknown multiplexer model '" + std::string(name) + "'");
}

void LeakageParams::validate() const {
    if (!(alpha >= 0) || !(beta >= 0) || !(gamma >= 0))
        throw ConfigError("leakage weights must be non-negative");
    if (!(noise_sigma >= 0))
        throw ConfigError("noise sigma must be non-negative");
}

std::vector<double> switching_activity(const ExecutionLog &log,
                                       const LeakageParams &params) {
    params.validate();
    const std::vector<double> weights =
        mux_weights(params, log.sources.address_width);

    std::vector<double> out;
    out.reserve(log.records.size());
    BusWord prev_value{};
    std::uint16_t prev_source = 0;
    for (const CycleRecord &r : log.records) {
        const unsigned data = data_distance(r.bus_value, prev_value);
        const unsigned toggled = r.bus_source.address ^ prev_source;
        double addr = 0;
        for (unsigned bit = 0; bit < weights.size(); ++bit)
            if (toggled >> bit & 1u)
                addr += weights[bit];
        const bool changed = r.bus_source.address != prev_source;
        out.push_back(params.alpha * data + params.beta * addr +
                      (changed ? params.gamma : 0.0));
        prev_value = r.bus_value;
        prev_source = r.bus_source.address;
    }
    return out;
}

PowerTrace emit_trace(const ExecutionLog &log, const LeakageParams &params) {
    if (log.records.empty())
        throw InputError("cannot emit a trace for an empty execution log");
    PowerTrace trace;
    trace.samples = switching_activity(log, params);
    trace.clock_period_ns = log.clock_period_ns;
    trace.mode = log.countermeasure;

    for (std::size_t t = 0; t < trace.samples.size(); ++t)
        trace.samples[t] +=
            params.block_baseline[static_cast<std::size_t>(log.records[t].phase)];

    if (params.noise_sigma > 0) {
        std::mt19937_64 rng(params.noise_seed);
        std::normal_distribution<double> noise(0.0, params.noise_sigma);
        for (double &s : trace.samples)
            s += noise(rng);
    }
    return trace;
}

FeatureGap feature_gap(const ExecutionLog &log, const PowerTrace &trace) {
    if (trace.samples.size() != log.records.size())
        throw InputError("trace and log lengths differ");
    FeatureGap out;
    for (const CycleRecord &r : log.records) {
        if (!r.is_mul_op || r.phase != Phase::Fetch2)
            continue;
        double v = trace.samples[r.cycle];
        if (log.annotations[r.op_index].squaring_by_value)
            accumulate(out.squaring, v);
        else
            accumulate(out.multiplication, v);
    }
    if (out.squaring.count + out.multiplication.count == 0)
        throw InputError("execution log contains no multiplications");
    out.gap = (out.squaring.count && out.multiplication.count)
                  ? out.multiplication.mean - out.squaring.mean
                  : std::numeric_limits<double>::quiet_NaN();
    return out;
}

FeatureGap feature_gap(const ExecutionLog &log, const LeakageParams &params) {
    return feature_gap(log, emit_trace(log, params));
}

} // namespace atomsca
