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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace atomsca;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = fs::path(ATOMSCA_SOURCE_DIR) / "tests" / "golden";

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string &name) {
    fs::path d = fs::temp_directory_path() / ("atomsca_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int cli(const std::string &args) {
    const std::string cmd = std::string(ATOMSCA_CLI) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig toy_config(const fs::path &out) {
    ExperimentConfig cfg;
    cfg.curve = "toy";
    cfg.scalar_source = ScalarSource::Hex;
    cfg.scalar = 0xb7;
    cfg.output_dir = out.string();
    return cfg;
}

} // namespace

TEST(Cli, ConfigRoundTrip) {
    ExperimentConfig cfg;
    cfg.curve = "toy-small";
    cfg.scalar_source = ScalarSource::Hex;
    cfg.scalar = 0x1d;
    cfg.datapath.mul_latency = 7;
    cfg.datapath.countermeasure = Countermeasure::Cm1BusReload;
    cfg.datapath.rng_seed = 0xfffffffffffffff1ULL;
    cfg.leakage.alpha = 0.125;
    cfg.leakage.beta = 1.0 / 3.0;
    cfg.leakage.block_baseline[3] = 7.5;
    cfg.leakage.mux_model = MuxModel::WeightedBits;
    cfg.leakage.noise_sigma = 0.1;
    cfg.attack_threshold = 2.5;
    cfg.trials = 17;
    cfg.sigmas = {0, 0.5, 1e-3, 12};
    cfg.output_dir = "some/dir";
    EXPECT_EQ(parse_config(render_config(cfg)), cfg);
    EXPECT_EQ(parse_config(render_config(ExperimentConfig{})), ExperimentConfig{});
}

TEST(Cli, ConfigErrors) {
    EXPECT_THROW(parse_config("datapath.mul_latency = x\n"), ConfigError);
    EXPECT_THROW(parse_config("no.such.key = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("curve\n"), ConfigError);
    EXPECT_NO_THROW(parse_config("# comment\n\ncurve = toy\n"));
    ExperimentConfig cfg = parse_config("trials = 0\n");
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = parse_config("curve = p384\n");
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = parse_config("curve = p256\nscalar.source = exhaustive\n");
    EXPECT_THROW(resolve_scalars(cfg, p256()), ConfigError);
}

TEST(Cli, MasterSeedDerivation) {
    ExperimentConfig a, b;
    apply_master_seed(a, 7);
    apply_master_seed(b, 7);
    EXPECT_EQ(a, b);
    apply_master_seed(b, 8);
    EXPECT_NE(a.datapath.rng_seed, b.datapath.rng_seed);
    EXPECT_NE(a.leakage.noise_seed, b.leakage.noise_seed);
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_EQ(resolve_scalars(a, p256()), resolve_scalars(a, p256()));
}

TEST(Cli, RandomScalarsInRange) {
    ExperimentConfig cfg;
    cfg.curve = "toy-small";
    cfg.trials = 500;
    CurveParams c = named_curve("toy-small");
    for (const U256 &k : resolve_scalars(cfg, c)) {
        EXPECT_GE(k, 2);
        EXPECT_LT(k, c.order);
    }
}

TEST(Cli, CurveFile) {
    fs::path dir = scratch_dir("curvefile");
    CurveParams toy = named_curve("toy");
    {
        std::ofstream f(dir / "curve.txt");
        f << "# toy curve\nname = mine\np = " << toy.field->modulus() << "\nb = "
          << to_hex(toy.b.value()) << "\ngx = " << toy.base_point.x.value()
          << "\ngy = " << toy.base_point.y.value() << "\norder = " << toy.order << "\n";
    }
    {
        std::ofstream f(dir / "run.cfg");
        f << "curve = file\ncurve.file = curve.txt\nscalar.source = exhaustive\n";
    }
    ExperimentConfig cfg = load_config(dir / "run.cfg");
    CurveParams c = resolve_curve(cfg);
    EXPECT_EQ(c.order, toy.order);
    std::ostringstream out;
    EXPECT_EQ(cmd_validate(cfg, out), kExitOk);
}

TEST(Cli, ValidateToyExhaustive) {
    ExperimentConfig cfg;
    cfg.curve = "toy";
    cfg.scalar_source = ScalarSource::Exhaustive;
    std::ostringstream out;
    EXPECT_EQ(cmd_validate(cfg, out), kExitOk);
    EXPECT_NE(out.str().find("0 failures"), std::string::npos);
}

TEST(Cli, ValidateCatchesCorruptedSchedule) {
    ExperimentConfig cfg;
    cfg.curve = "toy";
    cfg.scalar_source = ScalarSource::Exhaustive;
    PatternLibrary lib = build_pattern_library(named_curve("toy"));
    auto ops = lib.doubling[2].ops();
    std::swap(ops[2].src1, ops[5].src1);
    lib.doubling[2] = Atom(ops);
    std::ostringstream out;
    EXPECT_NE(cmd_validate(cfg, out, &lib), kExitOk);
    EXPECT_NE(out.str().find("first failure: k="), std::string::npos);
}

TEST(Cli, KEqualsOneRejected) {
    ExperimentConfig cfg = parse_config("curve = toy\nscalar.source = hex\nscalar.value = 1\n");
    std::ostringstream out;
    EXPECT_EQ(cmd_validate(cfg, out), kExitInputError);
    EXPECT_NE(out.str().find("at least 2"), std::string::npos);
}

TEST(Cli, SimulateIsDeterministic) {
    fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
    for (Countermeasure m : kAllCountermeasures) {
        ExperimentConfig ca = toy_config(a), cb = toy_config(b);
        ca.datapath.countermeasure = cb.datapath.countermeasure = m;
        ca.leakage.noise_sigma = cb.leakage.noise_sigma = 3.0;
        std::ostringstream sink;
        ASSERT_EQ(cmd_simulate(ca, sink), kExitOk);
        ASSERT_EQ(cmd_simulate(cb, sink), kExitOk);
        EXPECT_EQ(slurp(a / "trace.txt"), slurp(b / "trace.txt"));
        EXPECT_EQ(slurp(a / "annotations.txt"), slurp(b / "annotations.txt"));
    }
}

TEST(Cli, AnnotationsRoundTrip) {
    fs::path dir = scratch_dir("ann");
    ExperimentConfig cfg = toy_config(dir);
    std::ostringstream sink;
    ASSERT_EQ(cmd_simulate(cfg, sink), kExitOk);
    std::ifstream in(dir / "annotations.txt");
    Annotations ann = read_annotations(in);
    EXPECT_EQ(ann.scalar, 0xb7);
    EXPECT_EQ(ann.mode, Countermeasure::None);
    EXPECT_EQ(ann.mul_squaring_by_address.size(), 2 * ann.atoms);
    EXPECT_EQ(ann.mul_squaring_by_address, ann.mul_squaring_by_value);
}

TEST(Cli, GoldenFiles) {
    fs::path dir = scratch_dir("golden");
    ASSERT_EQ(cli("simulate --config " + (kGolden / "toy.cfg").string() + " --out " +
                  dir.string()),
              kExitOk);
    EXPECT_EQ(slurp(dir / "trace.txt"), slurp(kGolden / "trace.txt"));
    EXPECT_EQ(slurp(dir / "annotations.txt"), slurp(kGolden / "annotations.txt"));
    ASSERT_EQ(cli("attack --config " + (kGolden / "toy.cfg").string() + " --out " +
                  dir.string() + " --trace " + (dir / "trace.txt").string() +
                  " --annotations " + (dir / "annotations.txt").string()),
              kExitOk);
    EXPECT_EQ(slurp(dir / "report.txt"), slurp(kGolden / "report.txt"));
}

TEST(Cli, ExitCodes) {
    fs::path dir = scratch_dir("exit");
    const std::string cfg_path = (dir / "run.cfg").string();
    auto write_cfg = [&](const std::string &extra) {
        std::ofstream f(cfg_path);
        f << "curve = p256\nscalar.source = hex\nscalar.value = "
             "0x6f9080eb51a2dd650cb5170351943e6f35f53a60e62fed965d86bc3d081b797b\n"
          << extra;
    };
    const std::string common = " --config " + cfg_path + " --out " + dir.string();
    const std::string trace = " --trace " + (dir / "trace.txt").string();

    write_cfg("datapath.countermeasure = none\n");
    ASSERT_EQ(cli("simulate" + common), kExitOk);
    EXPECT_EQ(cli("attack" + common + trace), kExitOk);
    EXPECT_NE(slurp(dir / "report.txt").find("recovered_k,0x6f9080eb"), std::string::npos);

    // An attacker that demands an absurd margin abstains.
    write_cfg("attack.threshold = 1e9\n");
    EXPECT_EQ(cli("attack" + common + trace), kExitAbstain);

    // Bus re-loading: clusters no longer follow the schedule, parse fails.
    write_cfg("datapath.countermeasure = cm1\n");
    ASSERT_EQ(cli("simulate" + common), kExitOk);
    EXPECT_EQ(cli("attack" + common + trace), kExitWrong);

    // Truncated trace.
    std::string text = slurp(dir / "trace.txt");
    {
        std::ofstream f(dir / "trace.txt", std::ios::binary);
        f << text.substr(0, text.size() / 2);
    }
    EXPECT_EQ(cli("attack" + common + trace), kExitInputError);
    EXPECT_EQ(cli("attack" + common + " --trace " + (dir / "missing.txt").string()),
              kExitInputError);
    EXPECT_EQ(cli("validate --config " + (dir / "nope.cfg").string()), kExitInputError);
    EXPECT_NE(cli("frobnicate"), kExitOk);
}

TEST(Cli, AttackDoesNotNeedAnnotations) {
    fs::path dir = scratch_dir("noann");
    ExperimentConfig cfg = toy_config(dir);
    std::ostringstream sink;
    ASSERT_EQ(cmd_simulate(cfg, sink), kExitOk);
    fs::remove(dir / "annotations.txt");
    ASSERT_FALSE(fs::exists(dir / "annotations.txt"));
    EXPECT_EQ(cmd_attack(cfg, dir / "trace.txt", std::nullopt, sink), kExitOk);
    const std::string report = slurp(dir / "report.txt");
    EXPECT_NE(report.find("status,recovered"), std::string::npos);
    EXPECT_EQ(report.find("bit_accuracy"), std::string::npos);
    // A path that is passed is opened.
    EXPECT_EQ(cmd_attack(cfg, dir / "trace.txt", dir / "annotations.txt", sink),
              kExitInputError);
}

TEST(Cli, CliSeedFlagChangesNoisyTraces) {
    fs::path a = scratch_dir("seed_a"), b = scratch_dir("seed_b");
    const std::string cfg = (kGolden / "toy.cfg").string();
    ASSERT_EQ(cli("simulate --config " + cfg + " --seed 5 --out " + a.string()), kExitOk);
    ASSERT_EQ(cli("simulate --config " + cfg + " --seed 6 --out " + b.string()), kExitOk);
    EXPECT_NE(slurp(a / "trace.txt"), slurp(b / "trace.txt"));
}

TEST(Cli, EvaluateSmallSweep) {
    fs::path dir = scratch_dir("eval");
    ExperimentConfig cfg;
    cfg.curve = "toy";
    cfg.trials = 8;
    cfg.sigmas = {0, 50};
    cfg.output_dir = dir.string();
    std::ostringstream out;
    EvaluationSummary s;
    ASSERT_EQ(cmd_evaluate(cfg, out, &s), kExitOk);
    ASSERT_EQ(s.cells.size(), 6u);
    for (const CellSummary &c : s.cells) {
        EXPECT_EQ(c.trials, 8u);
        EXPECT_TRUE(c.cost_law_holds);
        if (c.mode == Countermeasure::None && c.sigma == 0)
            EXPECT_EQ(c.full_recovery_rate, 1.0);
    }
    for (const char *f : {"summary.txt", "recovery_none.dat", "recovery_cm1.dat",
                          "recovery_cm2.dat", "features_cm1_1.dat", "overlay.dat"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const std::string first = slurp(dir / "summary.txt");
    EvaluationSummary again;
    ASSERT_EQ(cmd_evaluate(cfg, out, &again), kExitOk);
    EXPECT_EQ(slurp(dir / "summary.txt"), first);
}
