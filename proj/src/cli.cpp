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
#include "iges/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "iges/csv.hpp"

namespace iges::cli {

using nlohmann::json;

void apply_overrides(IgesModel& model, const RunOverrides& ov) {
    auto& cfg = model.scenario;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.steps) cfg.horizon_steps = *ov.steps;
    if (ov.warmup) cfg.warmup_steps = *ov.warmup;
    if (ov.sigma) {
        cfg.noise.clear();
        NoiseSpec ns;
        ns.kind = NoiseKind::Gaussian;
        ns.target = "all";
        ns.sigma = *ov.sigma;
        cfg.noise.push_back(ns);
    }
}

BuiltSystem build_system(const IgesModel& model) {
    BuiltSystem sys;
    sys.schedule = compute_schedule(model);
    sys.scales = channel_scales(model, sys.schedule);
    gas::GasTransition tr = gas::build_transition(model.gas);
    const power::Admittance adm = power::build_admittance(model.grid);
    const auto plan = power::ElectricMeterPlan::full(model.grid);
    const Matrix h_e = power::electric_measurement_matrix(model.grid, adm, plan);
    const Matrix h_g = gas::gas_measurement_matrix(model.gas);
    sys.jm = build_joint(model, std::move(tr), h_e, h_g, plan, sys.scales);
    return sys;
}

// ------------------------------------------------------------ channel maps

std::vector<std::string> state_channel_names(const IgesModel& model) {
    std::vector<std::string> names;
    for (const auto& b : model.grid.buses) {
        names.push_back("bus" + std::to_string(b.id) + ".e");
        names.push_back("bus" + std::to_string(b.id) + ".f");
    }
    for (const auto& n : model.gas.nodes)
        names.push_back("node" + std::to_string(n.id) + ".pressure_bar");
    for (const auto& p : model.gas.pipelines) {
        const std::string stem = "pipe" + std::to_string(p.from) + "_" + std::to_string(p.to);
        names.push_back(stem + ".mflow_i");
        names.push_back(stem + ".mflow_j");
    }
    return names;
}

Matrix states_to_io(const IgesModel& model, const Matrix& states) {
    Matrix io = states;
    const double c2 = model.gas.sound_speed_mps * model.gas.sound_speed_mps;
    const Index off = 2 * model.grid.bus_count();
    io.middleCols(off, model.gas.node_count()) *= c2 / kBarToPa;
    return io;
}

Matrix io_to_states(const IgesModel& model, const Matrix& io) {
    Matrix states = io;
    const double c2 = model.gas.sound_speed_mps * model.gas.sound_speed_mps;
    const Index off = 2 * model.grid.bus_count();
    states.middleCols(off, model.gas.node_count()) *= kBarToPa / c2;
    return states;
}

std::vector<std::string> meas_channel_names(const JointModel& jm) {
    std::vector<std::string> names;
    for (const auto& ch : jm.mlayout.channels) names.push_back(ch.name);
    return names;
}

Matrix meas_to_io(const JointModel& jm, const Matrix& z) {
    Matrix io = z;
    for (Index c = 0; c < jm.mlayout.dim(); ++c)
        io.col(c) /= jm.mlayout.channels[static_cast<std::size_t>(c)].io_scale;
    return io;
}

Matrix io_to_meas(const JointModel& jm, const Matrix& io) {
    Matrix z = io;
    for (Index c = 0; c < jm.mlayout.dim(); ++c)
        z.col(c) *= jm.mlayout.channels[static_cast<std::size_t>(c)].io_scale;
    return z;
}

// --------------------------------------------------------------- internals

namespace {

template <typename F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SingularModel& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergence& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const NumericFailure& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    }
}

std::filesystem::path resolve_out(const IgesModel& model, const RunOverrides& ov) {
    if (!ov.out_dir.empty()) return ov.out_dir;
    return std::filesystem::path("runs") /
           (ov.scenario + "_seed" + std::to_string(model.scenario.seed));
}

void write_manifest(const std::filesystem::path& dir, const std::filesystem::path& config,
                    const IgesModel& model, const RunOverrides& ov, const ChannelScales& scales) {
    json j;
    j["format_version"] = 1;
    j["config"] = std::filesystem::absolute(config).string();
    j["scenario"] = ov.scenario;
    j["seed"] = model.scenario.seed;
    j["steps"] = model.scenario.horizon_steps;
    j["warmup"] = model.scenario.warmup_steps;
    j["bias"] = ov.bias;
    if (ov.sigma) j["sigma"] = *ov.sigma;
    j["out_dir"] = std::filesystem::absolute(dir).string();
    j["scales"] = json{{"pressure_pa", scales.pressure_pa}, {"flow_kg_s", scales.flow_kg_s}};
    j["defaults"] = json{{"process_noise_electric", model.scenario.process_noise_electric},
                         {"process_noise_gas", model.scenario.process_noise_gas},
                         {"init_covariance", model.scenario.init_covariance}};
    std::ofstream out(dir / "run_manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << j.dump(2) << "\n";
}

struct EstimateOutput {
    Matrix estimates;
    double mean_step_seconds = 0.0;
};

EstimateOutput estimate_from_measurements(const IgesModel& model, const BuiltSystem& sys,
                                          const Matrix& z) {
    const NoiseCov cov = default_noise_cov(sys.jm, model.scenario);
    DseOptions opts;
    opts.warmup = model.scenario.warmup_steps;
    if (z.rows() == 0) return {Matrix(0, sys.jm.layout.dim()), 0.0};

    Matrix sched_loads;
    if (model.scenario.load_predictor == "scheduled") {
        const auto& slots = sys.jm.load_sink_slots;
        sched_loads.resize(std::min(z.rows(), sys.schedule.sink_offtake_kg_s.rows()),
                           static_cast<Index>(slots.size()));
        for (std::size_t k = 0; k < slots.size(); ++k)
            sched_loads.col(static_cast<Index>(k)) =
                sys.schedule.sink_offtake_kg_s.col(slots[k]).head(sched_loads.rows());
        if (sched_loads.rows() == z.rows()) opts.scheduled_loads = &sched_loads;
    }
    const KalmanState init =
        initial_state(sys.jm, z.row(0).transpose(), model.scenario.init_covariance);
    DseResult dse = run_dse(sys.jm, z, cov, init, opts);
    return {std::move(dse.estimates), dse.mean_step_seconds};
}

void print_summary(const MetricsTable& table, double mean_step_seconds) {
    std::printf("  %-10s %9s %11s %11s %12s %12s\n", "group", "channels", "eps1.mean", "eps1.max",
                "eps2.mean", "eps2.max");
    for (const auto& g : table.groups)
        std::printf("  %-10s %9d %11.4g %11.4g %12.4g %12.4g\n", g.group.c_str(), g.channels,
                    g.eps1_mean, g.eps1_max, g.eps2_mean, g.eps2_max);
    int flagged = 0;
    for (const auto& r : table.rows) flagged += r.flag != MetricFlag::Ok;
    if (flagged) std::printf("  (%d degenerate channel(s) flagged)\n", flagged);
    if (mean_step_seconds > 0.0)
        std::printf("mean KF step: %.3f ms\n", 1e3 * mean_step_seconds);
}

}  // namespace

// ----------------------------------------------------------------- cmd_...

int cmd_validate(const std::filesystem::path& config) {
    return guarded([&] {
        IgesModel model = load_model(config);
        const auto issues = validate(model);  // load_model already threw on issues
        std::printf("ok: %d gas nodes, %d pipelines, %d buses, %d branches, %zu gtus\n",
                    model.gas.node_count(), model.gas.pipe_count(), model.grid.bus_count(),
                    model.grid.branch_count(), model.gtus.size());
        return issues.empty() ? 0 : 1;
    });
}

int cmd_simulate(const std::filesystem::path& config, const RunOverrides& ov) {
    return guarded([&] {
        IgesModel model = load_model(config);
        apply_overrides(model, ov);
        const BuiltSystem sys = build_system(model);
        const TruthSeries truth = simulate_truth(model);
        const auto specs = scenario_noise_specs(model, ov.scenario, -1.0, ov.bias);
        const Matrix z = synthesize_measurements(sys.jm, truth.states, specs,
                                                 model.scenario.seed);
        const auto dir = resolve_out(model, ov);
        std::filesystem::create_directories(dir);
        csv::write(dir / "truth.csv", state_channel_names(model),
                   states_to_io(model, truth.states));
        csv::write(dir / "measurements.csv", meas_channel_names(sys.jm),
                   meas_to_io(sys.jm, z));
        write_manifest(dir, config, model, ov, sys.scales);
        std::printf("wrote %s/{truth,measurements}.csv\n", dir.string().c_str());
        return 0;
    });
}

int cmd_run(const std::filesystem::path& config, const RunOverrides& ov) {
    return guarded([&] {
        IgesModel model = load_model(config);
        apply_overrides(model, ov);
        const BuiltSystem sys = build_system(model);
        const TruthSeries truth = simulate_truth(model);
        const auto specs = scenario_noise_specs(model, ov.scenario, -1.0, ov.bias);
        const Matrix z = synthesize_measurements(sys.jm, truth.states, specs,
                                                 model.scenario.seed);
        const auto dir = resolve_out(model, ov);
        std::filesystem::create_directories(dir);
        csv::write(dir / "truth.csv", state_channel_names(model),
                   states_to_io(model, truth.states));
        csv::write(dir / "measurements.csv", meas_channel_names(sys.jm),
                   meas_to_io(sys.jm, z));
        write_manifest(dir, config, model, ov, sys.scales);

        // estimate from the files just written; the estimate command sees the
        // exact same values, so the two paths agree byte for byte
        const Matrix z_io = csv::read(dir / "measurements.csv").values;
        const Matrix truth_io = csv::read(dir / "truth.csv").values;
        const Matrix z2 = io_to_meas(sys.jm, z_io);
        const Matrix truth2 = io_to_states(model, truth_io);
        const EstimateOutput est = estimate_from_measurements(model, sys, z2);
        csv::write(dir / "estimates.csv", state_channel_names(model),
                   states_to_io(model, est.estimates));
        const RunArtifacts art =
            make_artifacts(sys.jm, truth2, z2, est.estimates, model.scenario.warmup_steps);
        const MetricsTable table = report(art);
        std::ofstream mout(dir / "metrics.csv");
        if (!mout) throw IoError("cannot write metrics.csv");
        mout << metrics_to_csv(table);
        mout.close();

        std::printf("scenario %s seed %llu steps %d\n", ov.scenario.c_str(),
                    static_cast<unsigned long long>(model.scenario.seed),
                    model.scenario.horizon_steps);
        print_summary(table, est.mean_step_seconds);
        std::printf("wrote %s/{truth,measurements,estimates,metrics}.csv + run_manifest.json\n",
                    dir.string().c_str());
        return 0;
    });
}

int cmd_estimate(const std::filesystem::path& config, const std::filesystem::path& measurements,
                 const std::optional<std::filesystem::path>& truth, const RunOverrides& ov) {
    return guarded([&] {
        IgesModel model = load_model(config);
        apply_overrides(model, ov);
        const BuiltSystem sys = build_system(model);
        const csv::Table zt = csv::read(measurements);
        if (zt.columns != meas_channel_names(sys.jm))
            throw ParseError(measurements.string() + ": channel set does not match the model");
        const Matrix z = io_to_meas(sys.jm, zt.values);
        const EstimateOutput est = estimate_from_measurements(model, sys, z);
        const auto dir = resolve_out(model, ov);
        std::filesystem::create_directories(dir);
        csv::write(dir / "estimates.csv", state_channel_names(model),
                   states_to_io(model, est.estimates));
        if (truth) {
            const Matrix truth2 = io_to_states(model, csv::read(*truth).values);
            const RunArtifacts art =
                make_artifacts(sys.jm, truth2, z, est.estimates, model.scenario.warmup_steps);
            const MetricsTable table = report(art);
            std::ofstream mout(dir / "metrics.csv");
            if (!mout) throw IoError("cannot write metrics.csv");
            mout << metrics_to_csv(table);
            print_summary(table, est.mean_step_seconds);
        }
        std::printf("wrote %s/estimates.csv\n", dir.string().c_str());
        return 0;
    });
}

int cmd_run_manifest(const std::filesystem::path& manifest) {
    return guarded([&] {
        std::ifstream in(manifest);
        if (!in) throw IoError("cannot read manifest " + manifest.string());
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
        }
        RunOverrides ov;
        ov.scenario = j.value("scenario", "gaussian");
        ov.seed = j.value("seed", std::uint64_t{42});
        ov.steps = j.value("steps", 144);
        ov.warmup = j.value("warmup", 2);
        ov.bias = j.value("bias", 0.02);
        if (j.contains("sigma")) ov.sigma = j.at("sigma").get<double>();
        ov.out_dir = j.value("out_dir", std::string{});
        return cmd_run(j.at("config").get<std::string>(), ov);
    });
}

int cmd_run_scenarios(const std::filesystem::path& config, const RunOverrides& base,
                      const std::vector<std::string>& scenarios, int jobs) {
    if (scenarios.size() == 1) {
        RunOverrides ov = base;
        ov.scenario = scenarios.front();
        return cmd_run(config, ov);
    }
    std::vector<int> rc(scenarios.size(), 0);
    std::size_t next = 0;
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
    std::vector<std::thread> pool;
    std::mutex mu;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t mine;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= scenarios.size()) return;
                    mine = next++;
                }
                RunOverrides ov = base;
                ov.scenario = scenarios[mine];
                ov.out_dir = (base.out_dir.empty() ? std::filesystem::path("runs")
                                                   : base.out_dir) /
                             scenarios[mine];
                rc[mine] = cmd_run(config, ov);
            }
        });
    for (auto& t : pool) t.join();
    int worst = 0;
    for (int r : rc) worst = std::max(worst, r);
    return worst;
}

}  // namespace iges::cli
