/*
    Copyright (C) 2026 by the iges project

    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iges/cli.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"integrated gas / electric simulation and dynamic state estimation"};
    app.require_subcommand(1);

    std::string config, scenario = "gaussian", out_dir, measurements, truth_path, manifest;
    std::uint64_t seed = 0;
    int steps = 0, warmup = -1, jobs = 1;
    double sigma = 0.0, bias = 0.02;

    auto add_common = [&](CLI::App* cmd, bool with_config = true) {
        if (with_config) cmd->add_option("config", config, "model config JSON")->required();
        cmd->add_option("--seed", seed, "override scenario seed");
        cmd->add_option("--steps", steps, "override horizon length");
        cmd->add_option("--sigma", sigma, "override Gaussian noise std");
        cmd->add_option("--bias", bias, "biased-scenario offset (normalized units)");
        cmd->add_option("--warmup", warmup, "static warm-up steps");
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* validate = app.add_subcommand("validate", "check a model config");
    validate->add_option("config", config, "model config JSON")->required();

    auto* simulate = app.add_subcommand("simulate", "write truth and measurement series");
    add_common(simulate);
    simulate->add_option("--scenario", scenario, "noise scenario");

    auto* run = app.add_subcommand("run", "simulate, estimate, and evaluate");
    run->add_option("config", config, "model config JSON");
    add_common(run, false);
    run->add_option("--scenario", scenario, "noise scenario(s), comma separated");
    run->add_option("--jobs", jobs, "concurrent scenario runs");
    run->add_option("--manifest", manifest, "re-run from a manifest file");

    auto* estimate = app.add_subcommand("estimate", "estimate from an existing measurement CSV");
    add_common(estimate);
    estimate->add_option("--measurements", measurements, "measurement CSV")->required();
    estimate->add_option("--truth", truth_path, "truth CSV for metrics");
    estimate->add_option("--scenario", scenario, "noise scenario (for R defaults)");

    CLI11_PARSE(app, argc, argv);

    iges::cli::RunOverrides ov;
    ov.scenario = scenario;
    if (seed != 0) ov.seed = seed;
    if (steps != 0) ov.steps = steps;
    if (sigma != 0.0) ov.sigma = sigma;
    if (warmup >= 0) ov.warmup = warmup;
    ov.bias = bias;
    ov.out_dir = out_dir;

    if (validate->parsed()) return iges::cli::cmd_validate(config);
    if (simulate->parsed()) return iges::cli::cmd_simulate(config, ov);
    if (run->parsed()) {
        if (!manifest.empty()) return iges::cli::cmd_run_manifest(manifest);
        if (config.empty()) {
            std::fprintf(stderr, "run: need a config path or --manifest\n");
            return 1;
        }
        const auto scenarios = split_csv(scenario);
        return iges::cli::cmd_run_scenarios(config, ov, scenarios, jobs);
    }
    if (estimate->parsed()) {
        std::optional<std::filesystem::path> tp;
        if (!truth_path.empty()) tp = truth_path;
        return iges::cli::cmd_estimate(config, measurements, tp, ov);
    }
    return 1;
}
