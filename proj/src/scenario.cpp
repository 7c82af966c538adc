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
#include "iges/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace iges {

namespace {
constexpr std::uint64_t kNoiseStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kJitterStream = 0xd1b54a32d192ed03ULL;
}  // namespace

double NoiseRng::uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

double NoiseRng::gaussian() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double NoiseRng::laplace() {
    const double u = uniform() - 0.5;
    const double s = u < 0.0 ? -1.0 : 1.0;
    return -s * std::log(1.0 - 2.0 * std::abs(u));
}

double NoiseRng::cauchy() {
    return std::tan(std::numbers::pi * (uniform() - 0.5));
}

double shape_value(const LoadShape& shape, double hour) {
    const double h = std::fmod(std::fmod(hour, 24.0) + 24.0, 24.0);
    const double peak = shape.peak_hour;
    const double trough = shape.trough_hour;
    double rise = std::fmod(peak - trough + 24.0, 24.0);
    if (rise == 0.0) rise = 24.0;
    const double fall = 24.0 - rise;
    const double since_trough = std::fmod(h - trough + 24.0, 24.0);
    if (since_trough <= rise)
        return -std::cos(std::numbers::pi * since_trough / rise);
    return std::cos(std::numbers::pi * (since_trough - rise) / fall);
}

Schedule compute_schedule(const IgesModel& model) {
    const auto& cfg = model.scenario;
    const Index steps = cfg.horizon_steps;
    const Index nb = model.grid.bus_count();
    const Index ngen = static_cast<Index>(model.grid.generators.size());
    const auto sinks = model.gas.sink_nodes();
    const Index nsink = static_cast<Index>(sinks.size());
    const double dt_h = model.gas.dt_s / 3600.0;

    Schedule s;
    s.bus_p_mw.resize(steps, nb);
    s.bus_q_mvar.resize(steps, nb);
    s.gen_p_mw.resize(steps, ngen);
    s.sink_offtake_kg_s.resize(steps, nsink);
    s.sys_scale.resize(steps);
    s.hours.resize(steps);

    double base_total = 0.0;
    for (const auto& b : model.grid.buses) base_total += b.p_load_mw;

    NoiseRng jitter(cfg.seed ^ kJitterStream);
    for (Index t = 0; t < steps; ++t) {
        const double hour = static_cast<double>(t) * dt_h;
        s.hours[t] = hour;
        const double sh = 1.0 + cfg.load_shape.swing * shape_value(cfg.load_shape, hour);

        double total = 0.0;
        for (Index i = 0; i < nb; ++i) {
            const auto& bus = model.grid.buses[static_cast<std::size_t>(i)];
            const double wiggle = 1.0 + cfg.load_shape.jitter * jitter.gaussian();
            s.bus_p_mw(t, i) = bus.p_load_mw * sh * wiggle;
            s.bus_q_mvar(t, i) = bus.q_load_mvar * sh * wiggle;
            total += s.bus_p_mw(t, i);
        }
        s.sys_scale[t] = base_total > 0.0 ? total / base_total : 1.0;

        for (Index g = 0; g < ngen; ++g) {
            const auto& gen = model.grid.generators[static_cast<std::size_t>(g)];
            double nominal = gen.p_mw;
            if (auto it = cfg.gtu_power_mw.find(gen.bus); it != cfg.gtu_power_mw.end())
                nominal = it->second;
            s.gen_p_mw(t, g) = nominal * s.sys_scale[t];
        }
        for (Index k = 0; k < nsink; ++k) {
            const int node = sinks[static_cast<std::size_t>(k)];
            if (const GtuCoupling* gtu = model.gtu_at_sink(node)) {
                double dispatch = 0.0;
                for (Index g = 0; g < ngen; ++g)
                    if (model.grid.generators[static_cast<std::size_t>(g)].bus == gtu->bus)
                        dispatch += s.gen_p_mw(t, g);
                s.sink_offtake_kg_s(t, k) = gtu_power_to_flow(dispatch, gtu->eta_mw_s_per_kg);
            } else {
                double nominal = 0.0;
                if (auto it = cfg.gas_loads_kg_s.find(node); it != cfg.gas_loads_kg_s.end())
                    nominal = it->second;
                const double wiggle = 1.0 + cfg.load_shape.jitter * jitter.gaussian();
                s.sink_offtake_kg_s(t, k) = nominal * sh * wiggle;
            }
        }
    }
    return s;
}

ChannelScales channel_scales(const IgesModel& model, const Schedule& sched) {
    ChannelScales sc;
    const double c2 = model.gas.sound_speed_mps * model.gas.sound_speed_mps;
    sc.pressure_pa = model.gas.source_densities().maxCoeff() * c2;
    double peak = 0.0;
    if (sched.sink_offtake_kg_s.size() > 0)
        peak = sched.sink_offtake_kg_s.cwiseAbs().maxCoeff();
    sc.flow_kg_s = std::max(peak, 1.0);
    return sc;
}

TruthSeries simulate_truth(const IgesModel& model) {
    const auto& cfg = model.scenario;
    const Index steps = cfg.horizon_steps;
    const Index nb = model.grid.bus_count();
    const Index ng = model.gas.state_dim();
    const auto sinks = model.gas.sink_nodes();
    const auto sources = model.gas.source_nodes();
    const Index nsink = static_cast<Index>(sinks.size());

    TruthSeries out;
    out.schedule = compute_schedule(model);
    out.states.resize(steps, 2 * nb + ng);
    out.sink_offtakes.resize(steps, nsink);

    const power::Admittance adm = power::build_admittance(model.grid);
    const gas::GasTransition tr = gas::build_transition(model.gas);
    const Vector rho_c = model.gas.source_densities();

    Vector prev_voltages;
    gas::GasState xg;
    for (Index t = 0; t < steps; ++t) {
        power::BusSchedule bs;
        bs.p_injected = Vector::Zero(nb);
        bs.q_injected = Vector::Zero(nb);
        for (Index i = 0; i < nb; ++i) {
            bs.p_injected[i] = -out.schedule.bus_p_mw(t, i) / model.grid.base_mva;
            bs.q_injected[i] = -out.schedule.bus_q_mvar(t, i) / model.grid.base_mva;
        }
        for (std::size_t g = 0; g < model.grid.generators.size(); ++g)
            bs.p_injected[model.grid.generators[g].bus - 1] +=
                out.schedule.gen_p_mw(t, static_cast<Index>(g)) / model.grid.base_mva;

        power::PowerFlowOptions opts;
        opts.warm_start = prev_voltages.size() ? &prev_voltages : nullptr;
        const power::PowerFlowResult pf = power_flow(model.grid, adm, bs, opts);
        for (Index i = 0; i < nb; ++i) {
            const double vm = std::hypot(pf.voltages[2 * i], pf.voltages[2 * i + 1]);
            if (vm < cfg.voltage_band_lo || vm > cfg.voltage_band_hi)
                throw NumericFailure("truth voltage magnitude " + std::to_string(vm) +
                                     " at bus " + std::to_string(i + 1) +
                                     " outside the sanity band");
        }
        prev_voltages = pf.voltages;

        // actual offtakes: unit coupling for GTU sinks, schedule otherwise
        Vector offtakes(nsink);
        for (Index k = 0; k < nsink; ++k) {
            const int node = sinks[static_cast<std::size_t>(k)];
            if (const GtuCoupling* gtu = model.gtu_at_sink(node))
                offtakes[k] = gtu_predicted_offtake(pf.voltages, adm, *gtu, model.grid.base_mva);
            else
                offtakes[k] = out.schedule.sink_offtake_kg_s(t, k);
        }
        out.sink_offtakes.row(t) = offtakes.transpose();

        const Vector u = gas::boundary_vector(model.gas, rho_c, offtakes);
        if (t == 0)
            xg = gas::solve_steady(model.gas, rho_c, offtakes);
        else
            xg = gas::step_gas(tr, xg, u);
        // boundary densities are commanded values; hold them exactly
        for (std::size_t k = 0; k < sources.size(); ++k)
            xg.densities[sources[k] - 1] = rho_c[static_cast<Index>(k)];
        if (xg.densities.minCoeff() <= 0.0)
            throw NumericFailure("negative gas density in truth simulation at step " +
                                 std::to_string(t));

        out.states.row(t).head(2 * nb) = pf.voltages.transpose();
        out.states.row(t).segment(2 * nb, xg.densities.size()) = xg.densities.transpose();
        out.states.row(t).tail(xg.pipe_flows.size()) = xg.pipe_flows.transpose();
    }
    return out;
}

const NoiseSpec* resolve_noise(const std::vector<NoiseSpec>& specs, const MeasChannel& ch) {
    const NoiseSpec* hit = nullptr;
    for (const auto& spec : specs) {
        if (spec.target == "all" || spec.target == "group:" + to_string(ch.group) ||
            spec.target == "channel:" + ch.name)
            hit = &spec;
    }
    return hit;
}

Matrix synthesize_measurements(const JointModel& jm, const Matrix& truth_states,
                               const std::vector<NoiseSpec>& specs, std::uint64_t seed) {
    const Index steps = truth_states.rows();
    const Index m = jm.mlayout.dim();
    Matrix z = truth_states * jm.h.transpose();
    NoiseRng rng(seed ^ kNoiseStream);
    for (Index t = 0; t < steps; ++t) {
        for (Index c = 0; c < m; ++c) {
            const auto& ch = jm.mlayout.channels[static_cast<std::size_t>(c)];
            const NoiseSpec* spec = resolve_noise(specs, ch);
            if (!spec) continue;
            double w = 0.0;
            switch (spec->kind) {
                case NoiseKind::Gaussian: w = spec->sigma * rng.gaussian(); break;
                case NoiseKind::BiasedGaussian:
                    w = spec->sigma * rng.gaussian() + spec->bias;
                    break;
                case NoiseKind::Laplace: w = spec->location + spec->scale * rng.laplace(); break;
                case NoiseKind::Cauchy: w = spec->location + spec->scale * rng.cauchy(); break;
            }
            z(t, c) += ch.scale * w;
        }
    }
    return z;
}

std::vector<NoiseSpec> scenario_noise_specs(const IgesModel& model, const std::string& name,
                                            double sigma, double bias) {
    double base_sigma = 0.02;
    for (const auto& ns : model.scenario.noise)
        if (ns.kind == NoiseKind::Gaussian || ns.kind == NoiseKind::BiasedGaussian) {
            base_sigma = ns.sigma;
            break;
        }
    if (sigma > 0.0) base_sigma = sigma;

    std::vector<NoiseSpec> specs;
    NoiseSpec all;
    all.target = "all";
    if (name == "gaussian" || name == "biased") {
        all.kind = NoiseKind::Gaussian;
        all.sigma = base_sigma;
    } else if (name == "laplace") {
        // variance-matched to the Gaussian sigma^2
        all.kind = NoiseKind::Laplace;
        all.location = 0.0;
        all.scale = base_sigma / std::numbers::sqrt2;
    } else if (name == "cauchy") {
        all.kind = NoiseKind::Cauchy;
        all.location = 0.0;
        all.scale = base_sigma;
    } else {
        throw ParseError("unknown scenario '" + name + "'");
    }
    specs.push_back(all);
    if (name == "biased") {
        for (const auto& ch : model.scenario.bias_channels) {
            NoiseSpec b;
            b.kind = NoiseKind::BiasedGaussian;
            b.target = "channel:" + ch;
            b.sigma = base_sigma;
            b.bias = bias;
            specs.push_back(b);
        }
    }
    return specs;
}

}  // namespace iges
