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
#include "atomsca/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace atomsca;

int main(int argc, char **argv) {
    CLI::App app{"Atomic-pattern kP datapath simulator and SPA harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string trace_path;
    std::optional<std::string> annotations_path;

    auto common = [&](CLI::App *cmd) {
        cmd->add_option("--config", config_path, "config file (key = value)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "master seed");
    };
    CLI::App *validate = app.add_subcommand("validate", "check kP against the reference");
    CLI::App *simulate = app.add_subcommand("simulate", "write a trace and its annotations");
    CLI::App *attack = app.add_subcommand("attack", "recover k from a single trace");
    CLI::App *evaluate = app.add_subcommand("evaluate", "sweep modes, noise levels and trials");
    for (CLI::App *cmd : {validate, simulate, attack, evaluate})
        common(cmd);
    attack->add_option("--trace", trace_path, "trace file")->required();
    attack->add_option("--annotations", annotations_path,
                       "ground truth; adds accuracy lines to the report");

    CLI11_PARSE(app, argc, argv);

    ExperimentConfig cfg;
    try {
        if (!config_path.empty())
            cfg = load_config(config_path);
        if (seed)
            apply_master_seed(cfg, *seed);
        if (!out_dir.empty())
            cfg.output_dir = out_dir;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }

    if (validate->parsed())
        return cmd_validate(cfg, std::cout);
    if (simulate->parsed())
        return cmd_simulate(cfg, std::cout);
    if (attack->parsed()) {
        std::optional<std::filesystem::path> ann;
        if (annotations_path)
            ann = *annotations_path;
        return cmd_attack(cfg, trace_path, ann, std::cout);
    }
    return cmd_evaluate(cfg, std::cout);
}
