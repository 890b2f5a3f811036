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

#include "atomsca/atomic_scheduler.hpp"
#include "atomsca/errors.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace atomsca {

namespace {

constexpr std::string_view kMagic = "atomsca-program 1";

FieldOpKind parse_kind(const std::string &s) {
    if (s == "MUL")
        return FieldOpKind::Mul;
    if (s == "NEG")
        return FieldOpKind::Neg;
    if (s == "ADD")
        return FieldOpKind::Add;
    throw InputError("unknown micro-op kind '" + s + "'");
}

RegisterId parse_register(std::istream &is) {
    unsigned v;
    if (!(is >> v) || v > 0xffff)
        throw InputError("expected a register index");
    return {static_cast<std::uint16_t>(v)};
}

} // namespace

void write_program(std::ostream &os, const AtomicProgram &prog) {
    validate_program(prog);
    os << kMagic << '\n';
    os << "modulus " << to_hex(prog.field->modulus()) << '\n';
    os << "registers " << prog.register_count << '\n';
    os << "output " << prog.output_registers[0].index << ' '
       << prog.output_registers[1].index << ' '
       << prog.output_registers[2].index << '\n';
    if (prog.dummy_register)
        os << "dummy " << prog.dummy_register->index << '\n';
    for (std::size_t r = 0; r < prog.register_init.size(); ++r)
        if (prog.register_init[r])
            os << "init " << r << ' ' << to_hex(prog.register_init[r]->value())
               << '\n';
    for (std::size_t i = 0; i < prog.atoms.size(); ++i) {
        const AtomOrigin &o = prog.origins[i];
        os << "atom " << (o.pattern == PatternKind::Doubling ? 'D' : 'A') << ' '
           << o.bit_position << '\n';
        for (const MicroOp &op : prog.atoms[i].ops())
            os << to_string(op.kind) << ' ' << op.src1.index << ' '
               << op.src2.index << ' ' << op.dest.index << '\n';
    }
}

AtomicProgram read_program(std::istream &is) {
    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw InputError("not an atomsca program file");

    AtomicProgram prog;
    std::vector<MicroOp> pending;
    bool have_registers = false;

    auto flush_atom = [&] {
        if (pending.empty())
            return;
        if (pending.size() != kOpsPerAtom)
            throw InputError("atom with " + std::to_string(pending.size()) +
                             " micro-ops");
        std::array<MicroOp, kOpsPerAtom> ops;
        std::copy(pending.begin(), pending.end(), ops.begin());
        try {
            prog.atoms.emplace_back(ops);
        } catch (const ProgramError &e) {
            throw InputError(e.what());
        }
        pending.clear();
    };

    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "modulus") {
            std::string v;
            ls >> v;
            prog.field = FieldParams::create(parse_u256(v));
        } else if (key == "registers") {
            if (!(ls >> prog.register_count))
                throw InputError("bad register count");
            prog.register_init.assign(prog.register_count, std::nullopt);
            have_registers = true;
        } else if (key == "output") {
            for (RegisterId &r : prog.output_registers)
                r = parse_register(ls);
        } else if (key == "dummy") {
            prog.dummy_register = parse_register(ls);
        } else if (key == "init") {
            RegisterId r = parse_register(ls);
            std::string v;
            ls >> v;
            if (!prog.field || !have_registers || r.index >= prog.register_count)
                throw InputError("init line before modulus/registers header "
                                 "or out of range");
            prog.register_init[r.index] = FieldElement{*prog.field, parse_u256(v)};
        } else if (key == "atom") {
            flush_atom();
            char pattern;
            std::uint32_t bit;
            if (!(ls >> pattern >> bit) || (pattern != 'D' && pattern != 'A'))
                throw InputError("bad atom header '" + line + "'");
            prog.origins.push_back({pattern == 'D' ? PatternKind::Doubling
                                                   : PatternKind::Addition,
                                    bit});
        } else {
            MicroOp op{parse_kind(key), {}, {}, {}};
            op.src1 = parse_register(ls);
            op.src2 = parse_register(ls);
            op.dest = parse_register(ls);
            pending.push_back(op);
        }
    }
    flush_atom();
    if (!prog.field || !have_registers)
        throw InputError("program file lacks a modulus or register header");
    try {
        validate_program(prog);
    } catch (const ProgramError &e) {
        throw InputError(e.what());
    }
    return prog;
}

} // namespace atomsca
