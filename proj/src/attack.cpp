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

#include "atomsca/attack.hpp"
#include "atomsca/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace atomsca {

TimingModel TimingModel::from_public(unsigned mul_latency, unsigned addsub_latency,
                                     Countermeasure mode) {
    TimingModel tm;
    const unsigned reload = mode == Countermeasure::Cm1BusReload ? 1 : 0;
    tm.cycles_per_mul_op = 2 + reload + mul_latency + 1;
    tm.cycles_per_add_op = 2 + addsub_latency + 1;
    tm.cycles_per_neg_op = 1 + addsub_latency + 1;
    tm.fetch2_offset = 1 + reload;
    return tm;
}

std::vector<MulFeature> segment_trace(const PowerTrace &trace,
                                      const TimingModel &tm) {
    const std::size_t atom = tm.atom_cycles();
    const std::size_t n = trace.samples.size();
    if (atom == 0 || n == 0 || n % atom != 0)
        throw SegmentationError(atom, n);

    const auto offsets = tm.fetch2_cycles();
    std::vector<MulFeature> out;
    out.reserve(n / atom * offsets.size());
    for (std::size_t base = 0; base < n; base += atom)
        for (unsigned off : offsets)
            out.push_back({out.size(), trace.samples[base + off]});
    return out;
}

Classification classify(std::span<const MulFeature> features, double threshold) {
    Classification out;
    const std::size_t n = features.size();
    out.labels.assign(n, MulLabel::Abstain);
    if (n < 2)
        return out;

    std::vector<double> sorted(n);
    std::transform(features.begin(), features.end(), sorted.begin(),
                   [](const MulFeature &f) { return f.value; });
    std::sort(sorted.begin(), sorted.end());

    // Prefix sums of values and squares, shifted by the median to keep the
    // variance computation well conditioned.
    const double shift = sorted[n / 2];
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = sorted[i] - shift;
        s1[i + 1] = s1[i] + v;
        s2[i + 1] = s2[i] + v * v;
    }
    auto sse = [&](std::size_t lo, std::size_t hi) {
        const double cnt = static_cast<double>(hi - lo);
        const double sum = s1[hi] - s1[lo];
        return std::max(0.0, (s2[hi] - s2[lo]) - sum * sum / cnt);
    };

    std::size_t best_split = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < n; ++k) {
        if (sorted[k - 1] == sorted[k])
            continue;
        const double total = sse(0, k) + sse(k, n);
        if (total < best_sse) {
            best_sse = total;
            best_split = k;
        }
    }
    if (best_split == 0)
        return out; // all values identical

    out.low_center = shift + s1[best_split] / static_cast<double>(best_split);
    out.high_center = shift + (s1[n] - s1[best_split]) /
                                  static_cast<double>(n - best_split);
    const double pooled_sd =
        n > 2 ? std::sqrt(best_sse / static_cast<double>(n - 2)) : 0.0;
    constexpr double kEpsilon = 1e-9;
    out.separation_score =
        (out.high_center - out.low_center) / (pooled_sd + kEpsilon);
    if (!(out.separation_score >= threshold))
        return out;

    const double boundary = sorted[best_split - 1];
    for (std::size_t i = 0; i < n; ++i)
        out.labels[i] =
            features[i].value <= boundary ? MulLabel::Sqr : MulLabel::Mul;
    return out;
}

std::vector<bool> parse_atoms(std::span<const MulLabel> labels,
                              const SquaringSignature &sig) {
    auto matches = [&](std::size_t at, const std::vector<bool> &pattern) {
        if (at + pattern.size() > labels.size())
            return false;
        for (std::size_t j = 0; j < pattern.size(); ++j) {
            const MulLabel want = pattern[j] ? MulLabel::Sqr : MulLabel::Mul;
            if (labels[at + j] != want)
                return false;
        }
        return true;
    };

    std::vector<bool> bits{true};
    if (labels.empty())
        throw ParseError(0, "no labels to parse", bits);
    if (std::find(labels.begin(), labels.end(), MulLabel::Abstain) != labels.end())
        throw ParseError(0, "labels contain abstentions", bits);

    std::size_t pos = 0;
    while (pos < labels.size()) {
        if (!matches(pos, sig.doubling))
            throw ParseError(pos, "expected the doubling signature", bits);
        pos += sig.doubling.size();
        if (matches(pos, sig.addition)) {
            bits.push_back(true);
            pos += sig.addition.size();
        } else {
            bits.push_back(false);
        }
    }
    return bits;
}

std::string_view to_string(AttackStatus status) {
    switch (status) {
    case AttackStatus::Recovered:
        return "recovered";
    case AttackStatus::Abstained:
        return "abstained";
    case AttackStatus::SegmentationFailed:
        return "segmentation_failed";
    case AttackStatus::ParseFailed:
        return "parse_failed";
    }
    return "?";
}

std::optional<U256> AttackReport::recovered_scalar() const {
    if (status != AttackStatus::Recovered || recovered_bits.size() > 256)
        return std::nullopt;
    U256 k = 0;
    for (bool b : recovered_bits)
        k = (k << 1) | (b ? 1 : 0);
    return k;
}

AttackReport recover_scalar(const PowerTrace &trace, const PublicParameters &pub) {
    AttackReport report;
    std::vector<MulFeature> features;
    try {
        features = segment_trace(trace, pub.timing);
    } catch (const SegmentationError &e) {
        report.status = AttackStatus::SegmentationFailed;
        report.message = e.what();
        return report;
    }

    Classification c = classify(features, pub.threshold);
    report.labels = std::move(c.labels);
    report.separation_score = c.separation_score;
    if (report.labels.empty() || report.labels.front() == MulLabel::Abstain) {
        report.status = AttackStatus::Abstained;
        report.message = "feature clusters are not separated";
        return report;
    }

    try {
        report.recovered_bits = parse_atoms(report.labels, pub.signature);
        report.status = AttackStatus::Recovered;
    } catch (const ParseError &e) {
        report.status = AttackStatus::ParseFailed;
        report.failure_offset = e.offset;
        report.recovered_bits = e.prefix;
        report.message = e.what();
    }
    return report;
}

std::vector<bool> scalar_bits(const U256 &k) {
    std::vector<bool> bits;
    if (k.is_zero())
        return {false};
    for (int b = boost::multiprecision::msb(k); b >= 0; --b)
        bits.push_back(boost::multiprecision::bit_test(k, b));
    return bits;
}

double bit_accuracy(const std::vector<bool> &recovered, const U256 &k) {
    const std::vector<bool> truth = scalar_bits(k);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size() && i < recovered.size(); ++i)
        correct += recovered[i] == truth[i];
    return static_cast<double>(correct) / static_cast<double>(truth.size());
}

void score_report(AttackReport &report, const U256 &k) {
    if (report.status == AttackStatus::Abstained ||
        report.status == AttackStatus::SegmentationFailed) {
        report.bit_accuracy = 0.0;
        report.full_recovery = false;
        return;
    }
    report.bit_accuracy = bit_accuracy(report.recovered_bits, k);
    report.full_recovery = report.status == AttackStatus::Recovered &&
                           report.recovered_scalar() == k;
}

} // namespace atomsca
