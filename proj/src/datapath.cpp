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

#include "atomsca/datapath.hpp"
#include "atomsca/errors.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace atomsca {

namespace {

// One driver per cycle. COMPUTE cycles do not drive, so the previous
// source and value persist.
class Bus {
  public:
    explicit Bus(std::vector<CycleRecord> &out) : out_(out) {}

    void drive(SourceAddress source, const BusWord &value) {
        if (driven_)
            throw std::logic_error("bus contention in cycle " +
                                   std::to_string(out_.size()));
        source_ = source;
        value_ = value;
        driven_ = true;
    }

    void end_cycle(Phase phase, std::uint32_t op_index, bool is_mul) {
        out_.push_back({static_cast<std::uint32_t>(out_.size()), source_, value_,
                        phase, op_index, is_mul});
        driven_ = false;
    }

  private:
    std::vector<CycleRecord> &out_;
    SourceAddress source_{0};
    BusWord value_{};
    bool driven_ = false;
};

const FieldElement &read_register(const std::vector<std::optional<FieldElement>> &regs,
                                  RegisterId r) {
    if (!regs[r.index])
        throw ProgramError("read of uninitialized register r" +
                           std::to_string(r.index));
    return *regs[r.index];
}

} // namespace

std::string_view to_string(Countermeasure mode) {
    switch (mode) {
    case Countermeasure::None:
        return "none";
    case Countermeasure::Cm1BusReload:
        return "cm1";
    case Countermeasure::Cm2DummyRegister:
        return "cm2";
    }
    return "?";
}

Countermeasure parse_countermeasure(std::string_view name) {
    for (Countermeasure m : kAllCountermeasures)
        if (to_string(m) == name)
            return m;
    throw ConfigError("unknown countermeasure '" + std::string(name) +
                      "' (expected none, cm1 or cm2)");
}

std::string_view to_string(Phase phase) {
    switch (phase) {
    case Phase::Fetch1:
        return "FETCH1";
    case Phase::DummyReload:
        return "DUMMY_RELOAD";
    case Phase::Fetch2:
        return "FETCH2";
    case Phase::Compute:
        return "COMPUTE";
    case Phase::Writeback:
        return "WRITEBACK";
    }
    return "?";
}

void DatapathConfig::validate() const {
    if (mul_latency < 1 || addsub_latency < 1)
        throw ConfigError("block latencies must be at least one cycle");
    if (!(clock_period_ns > 0))
        throw ConfigError("clock period must be positive");
}

SourceMap SourceMap::for_registers(std::size_t register_count) {
    SourceMap m;
    m.register_count = register_count;
    m.mul_block = {static_cast<std::uint16_t>(register_count)};
    m.addsub_block = {static_cast<std::uint16_t>(register_count + 1)};
    m.source_count = register_count + 2;
    m.address_width = std::max(1, static_cast<int>(std::bit_width(m.source_count - 1)));
    return m;
}

BusWord to_bus_word(const U256 &v) {
    static_assert(sizeof(boost::multiprecision::limb_type) == 8);
    BusWord w{};
    const auto &backend = v.backend();
    std::size_t n = std::min<std::size_t>(backend.size(), w.size());
    std::copy_n(backend.limbs(), n, w.begin());
    return w;
}

unsigned op_cycles(FieldOpKind kind, const DatapathConfig &cfg) {
    switch (kind) {
    case FieldOpKind::Mul:
        return 2 + (cfg.countermeasure == Countermeasure::Cm1BusReload ? 1 : 0) +
               cfg.mul_latency + 1;
    case FieldOpKind::Add:
        return 2 + cfg.addsub_latency + 1;
    case FieldOpKind::Neg:
        return 1 + cfg.addsub_latency + 1;
    }
    return 0;
}

AtomicProgram apply_cm2_rewrite(const AtomicProgram &prog) {
    validate_program(prog);
    if (prog.dummy_register)
        throw ProgramError("program already carries a dummy register");

    AtomicProgram out = prog;
    RegisterId dummy{static_cast<std::uint16_t>(prog.register_count)};
    out.register_count += 1;
    out.register_init.push_back(std::nullopt);
    out.dummy_register = dummy;
    for (Atom &atom : out.atoms) {
        std::array<MicroOp, kOpsPerAtom> ops = atom.ops();
        for (MicroOp &op : ops)
            if (op.is_squaring())
                op.src2 = dummy;
        atom = Atom(ops);
    }
    return out;
}

SourceAddress choose_cm1_dummy_source(std::mt19937_64 &rng, SourceAddress current,
                                      std::span<const SourceAddress> forbidden,
                                      std::size_t source_count) {
    auto excluded = [&](std::size_t s) {
        return s == current.address ||
               std::find(forbidden.begin(), forbidden.end(),
                         SourceAddress{static_cast<std::uint16_t>(s)}) !=
                   forbidden.end();
    };
    std::size_t eligible = 0;
    for (std::size_t s = 0; s < source_count; ++s)
        eligible += !excluded(s);
    if (eligible == 0)
        throw ConfigError("no eligible source for the bus re-load cycle");

    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, eligible - 1)(rng);
    for (std::size_t s = 0; s < source_count; ++s) {
        if (excluded(s))
            continue;
        if (pick-- == 0)
            return {static_cast<std::uint16_t>(s)};
    }
    throw std::logic_error("unreachable");
}

ExecutionLog run_program(const AtomicProgram &input, const DatapathConfig &cfg) {
    cfg.validate();
    validate_program(input);

    AtomicProgram rewritten;
    const AtomicProgram *prog = &input;
    if (cfg.countermeasure == Countermeasure::Cm2DummyRegister &&
        !input.dummy_register) {
        rewritten = apply_cm2_rewrite(input);
        prog = &rewritten;
    }

    const FieldParams &field = *prog->field;
    ExecutionLog log;
    log.sources = SourceMap::for_registers(prog->register_count);
    log.countermeasure = cfg.countermeasure;
    log.clock_period_ns = cfg.clock_period_ns;
    log.output_registers = prog->output_registers;
    log.annotations.reserve(prog->op_count());

    std::size_t per_atom = 0;
    for (FieldOpKind k : kAtomShape)
        per_atom += op_cycles(k, cfg);
    log.records.reserve(per_atom * prog->atoms.size());

    std::vector<std::optional<FieldElement>> regs = prog->register_init;
    FieldElement mul_out = FieldElement::zero(field);
    FieldElement addsub_out = FieldElement::zero(field);
    const SourceMap &sources = log.sources;
    const bool bus_reload = cfg.countermeasure == Countermeasure::Cm1BusReload;
    std::mt19937_64 rng(cfg.rng_seed);
    Bus bus(log.records);

    auto source_value = [&](SourceAddress s) -> BusWord {
        if (s == sources.mul_block)
            return to_bus_word(mul_out.value());
        if (s == sources.addsub_block)
            return to_bus_word(addsub_out.value());
        const auto &r = regs[s.address];
        return r ? to_bus_word(r->value()) : BusWord{};
    };

    for (std::size_t i = 0; i < prog->op_count(); ++i) {
        const MicroOp &op = prog->op(i);
        const auto index = static_cast<std::uint32_t>(i);
        const bool is_mul = op.kind == FieldOpKind::Mul;

        FieldElement a = read_register(regs, op.src1);
        bus.drive(sources.of(op.src1), to_bus_word(a.value()));
        bus.end_cycle(Phase::Fetch1, index, is_mul);
        if (is_mul && prog->dummy_register)
            regs[prog->dummy_register->index] = a;

        OpAnnotation note{op.kind, false, false};
        FieldElement result = FieldElement::zero(field);
        if (op.kind == FieldOpKind::Neg) {
            // Subtractor with a constant-zero minuend.
            result = fe_sub(FieldElement::zero(field), a);
        } else {
            if (is_mul && bus_reload) {
                const SourceAddress fetch2 = sources.of(op.src2);
                const SourceAddress dummy = choose_cm1_dummy_source(
                    rng, sources.of(op.src1), std::span(&fetch2, 1),
                    sources.source_count);
                bus.drive(dummy, source_value(dummy));
                bus.end_cycle(Phase::DummyReload, index, is_mul);
            }
            const FieldElement &b = read_register(regs, op.src2);
            bus.drive(sources.of(op.src2), to_bus_word(b.value()));
            bus.end_cycle(Phase::Fetch2, index, is_mul);
            note.squaring_by_address = op.src1 == op.src2;
            note.squaring_by_value = a == b;
            result = is_mul ? fe_mul(a, b) : fe_add(a, b);
        }

        const unsigned latency = is_mul ? cfg.mul_latency : cfg.addsub_latency;
        for (unsigned c = 0; c < latency; ++c)
            bus.end_cycle(Phase::Compute, index, is_mul);

        (is_mul ? mul_out : addsub_out) = result;
        bus.drive(is_mul ? sources.mul_block : sources.addsub_block,
                  to_bus_word(result.value()));
        bus.end_cycle(Phase::Writeback, index, is_mul);
        regs[op.dest.index] = result;
        log.annotations.push_back(note);
    }

    log.final_registers = std::move(regs);
    return log;
}

JacobianPoint result_point(const ExecutionLog &log) {
    auto get = [&](RegisterId r) -> const FieldElement & {
        const auto &v = log.final_registers.at(r.index);
        if (!v)
            throw ProgramError("output register r" + std::to_string(r.index) +
                               " was never written");
        return *v;
    };
    return {get(log.output_registers[0]), get(log.output_registers[1]),
            get(log.output_registers[2])};
}

} // namespace atomsca
