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
#include "iges/model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace iges {

using nlohmann::json;

// ----------------------------------------------------------------- helpers

std::vector<int> GasNetworkSpec::source_nodes() const {
    std::vector<int> ids;
    for (const auto& n : nodes)
        if (n.kind == GasNodeKind::Source) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<int> GasNetworkSpec::sink_nodes() const {
    std::vector<int> ids;
    for (const auto& n : nodes)
        if (n.kind == GasNodeKind::Sink) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

Vector GasNetworkSpec::source_densities() const {
    auto src = source_nodes();
    Vector rho(static_cast<Index>(src.size()));
    for (std::size_t k = 0; k < src.size(); ++k)
        rho[static_cast<Index>(k)] = nodes[static_cast<std::size_t>(src[k]) - 1].fixed_density;
    return rho;
}

bool IgesModel::is_gtu_sink(int node) const { return gtu_at_sink(node) != nullptr; }

const GtuCoupling* IgesModel::gtu_at_sink(int node) const {
    for (const auto& g : gtus)
        if (g.gas_sink == node) return &g;
    return nullptr;
}

std::string to_string(IssueCode code) {
    switch (code) {
        case IssueCode::DuplicateNodeId: return "DuplicateNodeId";
        case IssueCode::NonDenseNodeIds: return "NonDenseNodeIds";
        case IssueCode::UnknownNodeRef: return "UnknownNodeRef";
        case IssueCode::PipelineOrientation: return "PipelineOrientation";
        case IssueCode::NonPositiveLength: return "NonPositiveLength";
        case IssueCode::NonPositiveDiameter: return "NonPositiveDiameter";
        case IssueCode::NonPositiveVelocity: return "NonPositiveVelocity";
        case IssueCode::NoSourceNode: return "NoSourceNode";
        case IssueCode::SourceDensityNotPositive: return "SourceDensityNotPositive";
        case IssueCode::DisconnectedGasNetwork: return "DisconnectedGasNetwork";
        case IssueCode::NonPositiveFriction: return "NonPositiveFriction";
        case IssueCode::NonPositiveSoundSpeed: return "NonPositiveSoundSpeed";
        case IssueCode::NonPositiveTimeStep: return "NonPositiveTimeStep";
        case IssueCode::DuplicateBusId: return "DuplicateBusId";
        case IssueCode::NonDenseBusIds: return "NonDenseBusIds";
        case IssueCode::UnknownBusRef: return "UnknownBusRef";
        case IssueCode::NoSlackBus: return "NoSlackBus";
        case IssueCode::MultipleSlackBuses: return "MultipleSlackBuses";
        case IssueCode::BadVoltageSetpoint: return "BadVoltageSetpoint";
        case IssueCode::NegativeTap: return "NegativeTap";
        case IssueCode::GtuSinkNotSink: return "GtuSinkNotSink";
        case IssueCode::GtuBusUnknown: return "GtuBusUnknown";
        case IssueCode::NonPositiveEta: return "NonPositiveEta";
        case IssueCode::GtuSinkShared: return "GtuSinkShared";
        case IssueCode::GtuSinkHasLoad: return "GtuSinkHasLoad";
        case IssueCode::BadSmoothing: return "BadSmoothing";
        case IssueCode::HorizonTooShort: return "HorizonTooShort";
        case IssueCode::BadNoiseSpec: return "BadNoiseSpec";
        case IssueCode::UnknownLoadNode: return "UnknownLoadNode";
        case IssueCode::UnknownGtuPowerBus: return "UnknownGtuPowerBus";
    }
    return "Unknown";
}

// -------------------------------------------------------------- validation

namespace {

void push(std::vector<Issue>& issues, IssueCode code, std::string msg) {
    issues.push_back(Issue{code, std::move(msg)});
}

bool gas_connected(const GasNetworkSpec& net) {
    const int n = net.node_count();
    if (n == 0) return false;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n) + 1);
    for (const auto& p : net.pipelines) {
        if (p.from < 1 || p.from > n || p.to < 1 || p.to > n) return false;
        adj[static_cast<std::size_t>(p.from)].push_back(p.to);
        adj[static_cast<std::size_t>(p.to)].push_back(p.from);
    }
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> stack{1};
    seen[1] = 1;
    int count = 0;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        ++count;
        for (int v : adj[static_cast<std::size_t>(u)])
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                stack.push_back(v);
            }
    }
    return count == n;
}

}  // namespace

std::vector<Issue> validate(const IgesModel& model) {
    std::vector<Issue> issues;
    const auto& gas = model.gas;
    const auto& grid = model.grid;

    // gas node ids dense 1..n, unique
    std::set<int> node_ids;
    for (const auto& n : gas.nodes) {
        if (!node_ids.insert(n.id).second)
            push(issues, IssueCode::DuplicateNodeId,
                 "gas node id " + std::to_string(n.id) + " appears more than once");
        if (n.kind == GasNodeKind::Source && n.fixed_density <= 0.0)
            push(issues, IssueCode::SourceDensityNotPositive,
                 "source node " + std::to_string(n.id) + " needs fixed_density > 0");
    }
    bool dense_nodes = !gas.nodes.empty();
    for (int i = 1; i <= gas.node_count(); ++i)
        if (!node_ids.count(i)) dense_nodes = false;
    if (!dense_nodes)
        push(issues, IssueCode::NonDenseNodeIds, "gas node ids must be 1..n_N");

    for (const auto& p : gas.pipelines) {
        if (!node_ids.count(p.from) || !node_ids.count(p.to))
            push(issues, IssueCode::UnknownNodeRef,
                 "pipeline " + std::to_string(p.from) + "-" + std::to_string(p.to) +
                     " references a missing node");
        if (p.from >= p.to)
            push(issues, IssueCode::PipelineOrientation,
                 "pipeline " + std::to_string(p.from) + "-" + std::to_string(p.to) +
                     " must be oriented from < to");
        if (p.length_m <= 0.0)
            push(issues, IssueCode::NonPositiveLength,
                 "pipeline " + std::to_string(p.from) + "-" + std::to_string(p.to) +
                     " length_m must be > 0");
        if (p.diameter_m <= 0.0)
            push(issues, IssueCode::NonPositiveDiameter,
                 "pipeline " + std::to_string(p.from) + "-" + std::to_string(p.to) +
                     " diameter_m must be > 0");
        if (p.avg_velocity_mps <= 0.0)
            push(issues, IssueCode::NonPositiveVelocity,
                 "pipeline " + std::to_string(p.from) + "-" + std::to_string(p.to) +
                     " avg_velocity_mps must be > 0");
    }
    if (gas.source_nodes().empty())
        push(issues, IssueCode::NoSourceNode, "gas network needs at least one source node");
    if (dense_nodes && !gas_connected(gas))
        push(issues, IssueCode::DisconnectedGasNetwork, "gas network must be connected");
    if (gas.friction <= 0.0)
        push(issues, IssueCode::NonPositiveFriction, "gas_network.friction must be > 0");
    if (gas.sound_speed_mps <= 0.0)
        push(issues, IssueCode::NonPositiveSoundSpeed, "gas_network.sound_speed_mps must be > 0");
    if (gas.dt_s <= 0.0)
        push(issues, IssueCode::NonPositiveTimeStep, "gas_network.dt_s must be > 0");

    // buses dense 1..n_B, one slack
    std::set<int> bus_ids;
    int slack_count = 0;
    for (const auto& b : grid.buses) {
        if (!bus_ids.insert(b.id).second)
            push(issues, IssueCode::DuplicateBusId,
                 "bus id " + std::to_string(b.id) + " appears more than once");
        if (b.kind == BusKind::Slack) ++slack_count;
        if ((b.kind != BusKind::PQ) && (b.v_setpoint <= 0.0))
            push(issues, IssueCode::BadVoltageSetpoint,
                 "bus " + std::to_string(b.id) + " v_setpoint must be > 0");
    }
    bool dense_buses = !grid.buses.empty();
    for (int i = 1; i <= grid.bus_count(); ++i)
        if (!bus_ids.count(i)) dense_buses = false;
    if (!dense_buses)
        push(issues, IssueCode::NonDenseBusIds, "bus ids must be 1..n_B");
    if (slack_count == 0)
        push(issues, IssueCode::NoSlackBus, "power grid needs a slack bus");
    if (slack_count > 1)
        push(issues, IssueCode::MultipleSlackBuses, "power grid must have exactly one slack bus");
    for (const auto& br : grid.branches) {
        if (!bus_ids.count(br.from) || !bus_ids.count(br.to))
            push(issues, IssueCode::UnknownBusRef,
                 "branch " + std::to_string(br.from) + "-" + std::to_string(br.to) +
                     " references a missing bus");
        if (br.tap <= 0.0)
            push(issues, IssueCode::NegativeTap,
                 "branch " + std::to_string(br.from) + "-" + std::to_string(br.to) +
                     " tap must be > 0");
    }
    for (const auto& g : grid.generators)
        if (!bus_ids.count(g.bus))
            push(issues, IssueCode::UnknownBusRef,
                 "generator references missing bus " + std::to_string(g.bus));

    // couplings
    std::set<int> used_sinks;
    for (const auto& g : model.gtus) {
        if (!bus_ids.count(g.bus))
            push(issues, IssueCode::GtuBusUnknown,
                 "gtu references missing bus " + std::to_string(g.bus));
        if (!node_ids.count(g.gas_sink)) {
            push(issues, IssueCode::UnknownNodeRef,
                 "gtu references missing gas node " + std::to_string(g.gas_sink));
        } else {
            const auto& node = gas.nodes[static_cast<std::size_t>(g.gas_sink) - 1];
            if (dense_nodes && node.kind != GasNodeKind::Sink)
                push(issues, IssueCode::GtuSinkNotSink,
                     "gtu gas_sink " + std::to_string(g.gas_sink) + " is not a sink node");
        }
        if (!used_sinks.insert(g.gas_sink).second)
            push(issues, IssueCode::GtuSinkShared,
                 "gas sink " + std::to_string(g.gas_sink) + " feeds more than one gtu");
        if (g.eta_mw_s_per_kg <= 0.0)
            push(issues, IssueCode::NonPositiveEta,
                 "gtu at bus " + std::to_string(g.bus) + " eta must be > 0");
        if (model.scenario.gas_loads_kg_s.count(g.gas_sink) &&
            model.scenario.gas_loads_kg_s.at(g.gas_sink) != 0.0)
            push(issues, IssueCode::GtuSinkHasLoad,
                 "gtu sink " + std::to_string(g.gas_sink) +
                     " must not also carry a scheduled gas load");
    }

    // scenario
    const auto& sc = model.scenario;
    if (!(sc.smoothing.alpha > 0.0 && sc.smoothing.alpha < 1.0 && sc.smoothing.beta > 0.0 &&
          sc.smoothing.beta < 1.0))
        push(issues, IssueCode::BadSmoothing, "smoothing alpha/beta must lie in (0,1)");
    if (sc.horizon_steps < 3)
        push(issues, IssueCode::HorizonTooShort, "scenario.horizon_steps must be >= 3");
    for (const auto& ns : sc.noise) {
        const bool gaussian =
            ns.kind == NoiseKind::Gaussian || ns.kind == NoiseKind::BiasedGaussian;
        if ((gaussian && ns.sigma <= 0.0) || (!gaussian && ns.scale <= 0.0))
            push(issues, IssueCode::BadNoiseSpec, "noise sigma/scale must be > 0");
    }
    for (const auto& [node, load] : sc.gas_loads_kg_s) {
        (void)load;
        if (!node_ids.count(node))
            push(issues, IssueCode::UnknownLoadNode,
                 "gas_loads_kg_s references missing node " + std::to_string(node));
    }
    for (const auto& [bus, mw] : sc.gtu_power_mw) {
        (void)mw;
        bool found = false;
        for (const auto& g : model.gtus) found = found || g.bus == bus;
        if (!found)
            push(issues, IssueCode::UnknownGtuPowerBus,
                 "gtu_power_mw references bus " + std::to_string(bus) + " with no gtu");
    }
    return issues;
}

// ----------------------------------------------------------------- parsing

namespace {

double require_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ParseError(where + ": missing numeric field '" + key + "'");
    return j.at(key).get<double>();
}

GasNetworkSpec parse_gas(const json& j) {
    GasNetworkSpec net;
    net.sound_speed_mps = require_number(j, "sound_speed_mps", "gas_network");
    net.friction = require_number(j, "friction", "gas_network");
    net.dt_s = require_number(j, "dt_s", "gas_network");
    net.subdivide = j.value("subdivide", 1);
    if (!j.contains("nodes") || !j.at("nodes").is_array())
        throw ParseError("gas_network: missing 'nodes' array");
    for (const auto& nj : j.at("nodes")) {
        GasNode n;
        n.id = static_cast<int>(require_number(nj, "id", "gas node"));
        const std::string kind = nj.value("kind", "sink");
        if (kind == "source") {
            n.kind = GasNodeKind::Source;
            const double c2 = net.sound_speed_mps * net.sound_speed_mps;
            if (nj.contains("pressure_bar"))
                n.fixed_density = nj.at("pressure_bar").get<double>() * kBarToPa / c2;
            else
                n.fixed_density = require_number(nj, "fixed_density", "source node");
        } else if (kind == "sink") {
            n.kind = GasNodeKind::Sink;
        } else {
            throw ParseError("gas node " + std::to_string(n.id) + ": unknown kind '" + kind + "'");
        }
        net.nodes.push_back(n);
    }
    std::sort(net.nodes.begin(), net.nodes.end(),
              [](const GasNode& a, const GasNode& b) { return a.id < b.id; });
    if (!j.contains("pipelines") || !j.at("pipelines").is_array())
        throw ParseError("gas_network: missing 'pipelines' array");
    for (const auto& pj : j.at("pipelines")) {
        Pipeline p;
        p.from = static_cast<int>(require_number(pj, "from", "pipeline"));
        p.to = static_cast<int>(require_number(pj, "to", "pipeline"));
        p.length_m = require_number(pj, "length_m", "pipeline");
        p.diameter_m = require_number(pj, "diameter_m", "pipeline");
        p.avg_velocity_mps = pj.value("avg_velocity_mps", 5.0);
        net.pipelines.push_back(p);
    }
    return net;
}

/// Split every pipeline into `parts` equal segments, appending passive sink
/// nodes. Segments keep the (min,max) orientation so from < to always holds.
GasNetworkSpec subdivide_network(const GasNetworkSpec& net, int parts) {
    GasNetworkSpec out = net;
    out.pipelines.clear();
    int next_id = net.node_count() + 1;
    for (const auto& p : net.pipelines) {
        std::vector<int> chain{p.from};
        for (int k = 1; k < parts; ++k) {
            GasNode mid;
            mid.id = next_id++;
            mid.kind = GasNodeKind::Sink;
            out.nodes.push_back(mid);
            chain.push_back(mid.id);
        }
        chain.push_back(p.to);
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
            Pipeline seg = p;
            seg.from = std::min(chain[k], chain[k + 1]);
            seg.to = std::max(chain[k], chain[k + 1]);
            seg.length_m = p.length_m / parts;
            out.pipelines.push_back(seg);
        }
    }
    out.subdivide = 1;
    return out;
}

PowerGridSpec parse_grid_inline(const json& j) {
    PowerGridSpec grid;
    grid.base_mva = j.value("base_mva", 100.0);
    if (!j.contains("buses") || !j.at("buses").is_array())
        throw ParseError("power_grid: missing 'buses' array");
    for (const auto& bj : j.at("buses")) {
        Bus b;
        b.id = static_cast<int>(require_number(bj, "id", "bus"));
        const std::string kind = bj.value("kind", "pq");
        if (kind == "slack") b.kind = BusKind::Slack;
        else if (kind == "pv") b.kind = BusKind::PV;
        else if (kind == "pq") b.kind = BusKind::PQ;
        else throw ParseError("bus " + std::to_string(b.id) + ": unknown kind '" + kind + "'");
        b.v_setpoint = bj.value("v_setpoint", 1.0);
        b.p_load_mw = bj.value("p_load_mw", 0.0);
        b.q_load_mvar = bj.value("q_load_mvar", 0.0);
        b.gs_mw = bj.value("gs_mw", 0.0);
        b.bs_mvar = bj.value("bs_mvar", 0.0);
        grid.buses.push_back(b);
    }
    std::sort(grid.buses.begin(), grid.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });
    for (const auto& brj : j.value("branches", json::array())) {
        Branch br;
        br.from = static_cast<int>(require_number(brj, "from", "branch"));
        br.to = static_cast<int>(require_number(brj, "to", "branch"));
        br.r_pu = require_number(brj, "r_pu", "branch");
        br.x_pu = require_number(brj, "x_pu", "branch");
        br.b_shunt_pu = brj.value("b_pu", 0.0);
        br.tap = brj.value("tap", 1.0);
        grid.branches.push_back(br);
    }
    for (const auto& gj : j.value("generators", json::array())) {
        Generator g;
        g.bus = static_cast<int>(require_number(gj, "bus", "generator"));
        g.p_mw = gj.value("p_mw", 0.0);
        g.v_setpoint = gj.value("v_setpoint", 1.0);
        grid.generators.push_back(g);
    }
    // PV / slack setpoints come from their generators
    for (const auto& g : grid.generators)
        for (auto& b : grid.buses)
            if (b.id == g.bus && b.kind != BusKind::PQ) b.v_setpoint = g.v_setpoint;
    return grid;
}

ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig sc;
    sc.horizon_steps = j.value("horizon_steps", 144);
    sc.seed = j.value("seed", std::uint64_t{42});
    sc.warmup_steps = j.value("warmup_steps", 2);
    if (j.contains("smoothing")) {
        sc.smoothing.alpha = j.at("smoothing").value("alpha", 0.8);
        sc.smoothing.beta = j.at("smoothing").value("beta", 0.7);
    }
    if (j.contains("load_shape")) {
        const auto& ls = j.at("load_shape");
        sc.load_shape.swing = ls.value("swing", 0.30);
        sc.load_shape.peak_hour = ls.value("peak_hour", 18.0);
        sc.load_shape.trough_hour = ls.value("trough_hour", 4.0);
        sc.load_shape.jitter = ls.value("jitter", 0.01);
    }
    const json loads = j.value("gas_loads_kg_s", json::object());
    for (const auto& [key, val] : loads.items())
        sc.gas_loads_kg_s[std::stoi(key)] = val.get<double>();
    const json gtup = j.value("gtu_power_mw", json::object());
    for (const auto& [key, val] : gtup.items())
        sc.gtu_power_mw[std::stoi(key)] = val.get<double>();
    if (j.contains("noise")) {
        sc.noise.clear();
        for (const auto& nj : j.at("noise")) {
            NoiseSpec ns;
            const std::string kind = nj.value("kind", "gaussian");
            if (kind == "gaussian") ns.kind = NoiseKind::Gaussian;
            else if (kind == "biased_gaussian") ns.kind = NoiseKind::BiasedGaussian;
            else if (kind == "cauchy") ns.kind = NoiseKind::Cauchy;
            else if (kind == "laplace") ns.kind = NoiseKind::Laplace;
            else throw ParseError("noise: unknown kind '" + kind + "'");
            ns.target = nj.value("target", "all");
            ns.sigma = nj.value("sigma", 0.02);
            ns.bias = nj.value("bias", 0.0);
            ns.location = nj.value("location", 0.0);
            ns.scale = nj.value("scale", 0.02);
            sc.noise.push_back(ns);
        }
    }
    for (const auto& ch : j.value("bias_channels", json::array()))
        sc.bias_channels.push_back(ch.get<std::string>());
    if (j.contains("process_noise")) {
        sc.process_noise_electric = j.at("process_noise").value("electric", 1e-6);
        sc.process_noise_gas = j.at("process_noise").value("gas", 1e-4);
    }
    sc.init_covariance = j.value("init_covariance", 1e-2);
    sc.load_predictor = j.value("load_predictor", "scheduled");
    if (sc.load_predictor != "scheduled" && sc.load_predictor != "measured")
        throw ParseError("scenario.load_predictor must be 'scheduled' or 'measured'");
    if (j.contains("voltage_band") && j.at("voltage_band").is_array()) {
        sc.voltage_band_lo = j.at("voltage_band").at(0).get<double>();
        sc.voltage_band_hi = j.at("voltage_band").at(1).get<double>();
    }
    return sc;
}

}  // namespace

IgesModel parse_model(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.contains("gas_network")) throw ParseError("config: missing 'gas_network'");
    if (!j.contains("power_grid")) throw ParseError("config: missing 'power_grid'");

    IgesModel model;
    model.gas = parse_gas(j.at("gas_network"));
    if (model.gas.subdivide > 1) model.gas = subdivide_network(model.gas, model.gas.subdivide);

    const auto& gj = j.at("power_grid");
    if (gj.contains("matpower_case"))
        model.grid = load_matpower_case(base_dir / gj.at("matpower_case").get<std::string>());
    else
        model.grid = parse_grid_inline(gj);

    for (const auto& cj : j.value("gtus", json::array())) {
        GtuCoupling g;
        g.bus = static_cast<int>(require_number(cj, "bus", "gtu"));
        g.gas_sink = static_cast<int>(require_number(cj, "gas_sink", "gtu"));
        g.eta_mw_s_per_kg = require_number(cj, "eta_mw_s_per_kg", "gtu");
        model.gtus.push_back(g);
    }
    if (j.contains("scenario")) model.scenario = parse_scenario(j.at("scenario"));
    return model;
}

IgesModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    IgesModel model = parse_model(buf.str(), path.parent_path());
    auto issues = validate(model);
    if (!issues.empty()) {
        std::string msg = "model validation failed:";
        for (const auto& i : issues) msg += "\n  [" + to_string(i.code) + "] " + i.message;
        throw ValidationError(msg);
    }
    return model;
}

// ------------------------------------------------------------- serializing

nlohmann::json serialize(const IgesModel& model) {
    json j;
    json gas;
    gas["sound_speed_mps"] = model.gas.sound_speed_mps;
    gas["friction"] = model.gas.friction;
    gas["dt_s"] = model.gas.dt_s;
    gas["nodes"] = json::array();
    for (const auto& n : model.gas.nodes) {
        json nj{{"id", n.id}};
        if (n.kind == GasNodeKind::Source) {
            nj["kind"] = "source";
            nj["fixed_density"] = n.fixed_density;
        } else {
            nj["kind"] = "sink";
        }
        gas["nodes"].push_back(nj);
    }
    gas["pipelines"] = json::array();
    for (const auto& p : model.gas.pipelines)
        gas["pipelines"].push_back(json{{"from", p.from},
                                        {"to", p.to},
                                        {"length_m", p.length_m},
                                        {"diameter_m", p.diameter_m},
                                        {"avg_velocity_mps", p.avg_velocity_mps}});
    j["gas_network"] = gas;

    json grid;
    grid["base_mva"] = model.grid.base_mva;
    grid["buses"] = json::array();
    for (const auto& b : model.grid.buses) {
        const char* kind = b.kind == BusKind::Slack ? "slack" : b.kind == BusKind::PV ? "pv" : "pq";
        grid["buses"].push_back(json{{"id", b.id},
                                     {"kind", kind},
                                     {"v_setpoint", b.v_setpoint},
                                     {"p_load_mw", b.p_load_mw},
                                     {"q_load_mvar", b.q_load_mvar},
                                     {"gs_mw", b.gs_mw},
                                     {"bs_mvar", b.bs_mvar}});
    }
    grid["branches"] = json::array();
    for (const auto& br : model.grid.branches)
        grid["branches"].push_back(json{{"from", br.from},
                                        {"to", br.to},
                                        {"r_pu", br.r_pu},
                                        {"x_pu", br.x_pu},
                                        {"b_pu", br.b_shunt_pu},
                                        {"tap", br.tap}});
    grid["generators"] = json::array();
    for (const auto& g : model.grid.generators)
        grid["generators"].push_back(
            json{{"bus", g.bus}, {"p_mw", g.p_mw}, {"v_setpoint", g.v_setpoint}});
    j["power_grid"] = grid;

    j["gtus"] = json::array();
    for (const auto& g : model.gtus)
        j["gtus"].push_back(json{
            {"bus", g.bus}, {"gas_sink", g.gas_sink}, {"eta_mw_s_per_kg", g.eta_mw_s_per_kg}});

    const auto& sc = model.scenario;
    json sj;
    sj["horizon_steps"] = sc.horizon_steps;
    sj["seed"] = sc.seed;
    sj["warmup_steps"] = sc.warmup_steps;
    sj["smoothing"] = json{{"alpha", sc.smoothing.alpha}, {"beta", sc.smoothing.beta}};
    sj["load_shape"] = json{{"swing", sc.load_shape.swing},
                            {"peak_hour", sc.load_shape.peak_hour},
                            {"trough_hour", sc.load_shape.trough_hour},
                            {"jitter", sc.load_shape.jitter}};
    json loads = json::object();
    for (const auto& [node, val] : sc.gas_loads_kg_s) loads[std::to_string(node)] = val;
    sj["gas_loads_kg_s"] = loads;
    json gtup = json::object();
    for (const auto& [bus, val] : sc.gtu_power_mw) gtup[std::to_string(bus)] = val;
    sj["gtu_power_mw"] = gtup;
    sj["noise"] = json::array();
    for (const auto& ns : sc.noise) {
        const char* kind = ns.kind == NoiseKind::Gaussian         ? "gaussian"
                           : ns.kind == NoiseKind::BiasedGaussian ? "biased_gaussian"
                           : ns.kind == NoiseKind::Cauchy         ? "cauchy"
                                                                  : "laplace";
        sj["noise"].push_back(json{{"kind", kind},
                                   {"target", ns.target},
                                   {"sigma", ns.sigma},
                                   {"bias", ns.bias},
                                   {"location", ns.location},
                                   {"scale", ns.scale}});
    }
    sj["bias_channels"] = sc.bias_channels;
    sj["process_noise"] =
        json{{"electric", sc.process_noise_electric}, {"gas", sc.process_noise_gas}};
    sj["init_covariance"] = sc.init_covariance;
    sj["load_predictor"] = sc.load_predictor;
    sj["voltage_band"] = json::array({sc.voltage_band_lo, sc.voltage_band_hi});
    j["scenario"] = sj;
    return j;
}

// -------------------------------------------------------- MATPOWER parsing

namespace {

/// Pull the numeric rows of `mpc.<name> = [ ... ];` out of the file body.
std::vector<std::vector<double>> matpower_table(const std::string& body, const std::string& name) {
    const std::string key = "mpc." + name;
    auto pos = body.find(key);
    if (pos == std::string::npos) throw ParseError("matpower case: missing table " + key);
    pos = body.find('[', pos);
    auto end = body.find(']', pos);
    if (pos == std::string::npos || end == std::string::npos)
        throw ParseError("matpower case: unterminated table " + key);
    std::string block = body.substr(pos + 1, end - pos - 1);
    // strip % comments
    std::string clean;
    bool comment = false;
    for (char c : block) {
        if (c == '%') comment = true;
        if (c == '\n') comment = false;
        clean.push_back(comment ? ' ' : c);
    }
    std::vector<std::vector<double>> rows;
    std::stringstream ss(clean);
    std::string line;
    while (std::getline(ss, line, ';')) {
        std::stringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(row);
    }
    return rows;
}

double scalar_after(const std::string& body, const std::string& key, double fallback) {
    auto pos = body.find(key);
    if (pos == std::string::npos) return fallback;
    pos = body.find('=', pos);
    if (pos == std::string::npos) return fallback;
    return std::strtod(body.c_str() + pos + 1, nullptr);
}

}  // namespace

PowerGridSpec load_matpower_case(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open matpower case: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string body = buf.str();

    PowerGridSpec grid;
    grid.base_mva = scalar_after(body, "mpc.baseMVA", 100.0);

    for (const auto& row : matpower_table(body, "bus")) {
        if (row.size() < 9) throw ParseError("matpower bus row too short");
        Bus b;
        b.id = static_cast<int>(row[0]);
        const int type = static_cast<int>(row[1]);
        b.kind = type == 3 ? BusKind::Slack : type == 2 ? BusKind::PV : BusKind::PQ;
        b.p_load_mw = row[2];
        b.q_load_mvar = row[3];
        b.gs_mw = row[4];
        b.bs_mvar = row[5];
        b.v_setpoint = row[7];  // refined below from the gen table
        grid.buses.push_back(b);
    }
    std::sort(grid.buses.begin(), grid.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });

    for (const auto& row : matpower_table(body, "gen")) {
        if (row.size() < 8) throw ParseError("matpower gen row too short");
        if (row[7] <= 0) continue;  // out of service
        Generator g;
        g.bus = static_cast<int>(row[0]);
        g.p_mw = row[1];
        g.v_setpoint = row[5];
        grid.generators.push_back(g);
        for (auto& b : grid.buses)
            if (b.id == g.bus && b.kind != BusKind::PQ) b.v_setpoint = g.v_setpoint;
    }

    for (const auto& row : matpower_table(body, "branch")) {
        if (row.size() < 11) throw ParseError("matpower branch row too short");
        if (row[10] <= 0) continue;  // out of service
        if (row.size() > 9 && row[9] != 0.0)
            throw ParseError("matpower branch with phase shift is not supported");
        Branch br;
        br.from = static_cast<int>(row[0]);
        br.to = static_cast<int>(row[1]);
        br.r_pu = row[2];
        br.x_pu = row[3];
        br.b_shunt_pu = row[4];
        br.tap = row[8] != 0.0 ? row[8] : 1.0;
        grid.branches.push_back(br);
    }
    return grid;
}

// ---------------------------------------------------------------- equality

namespace {
bool eq(double a, double b) { return a == b; }
}  // namespace

bool operator==(const IgesModel& a, const IgesModel& b) {
    if (a.gas.node_count() != b.gas.node_count() || a.gas.pipe_count() != b.gas.pipe_count() ||
        !eq(a.gas.friction, b.gas.friction) || !eq(a.gas.sound_speed_mps, b.gas.sound_speed_mps) ||
        !eq(a.gas.dt_s, b.gas.dt_s))
        return false;
    for (int i = 0; i < a.gas.node_count(); ++i) {
        const auto& x = a.gas.nodes[static_cast<std::size_t>(i)];
        const auto& y = b.gas.nodes[static_cast<std::size_t>(i)];
        if (x.id != y.id || x.kind != y.kind || !eq(x.fixed_density, y.fixed_density)) return false;
    }
    for (int i = 0; i < a.gas.pipe_count(); ++i) {
        const auto& x = a.gas.pipelines[static_cast<std::size_t>(i)];
        const auto& y = b.gas.pipelines[static_cast<std::size_t>(i)];
        if (x.from != y.from || x.to != y.to || !eq(x.length_m, y.length_m) ||
            !eq(x.diameter_m, y.diameter_m) || !eq(x.avg_velocity_mps, y.avg_velocity_mps))
            return false;
    }
    if (a.grid.bus_count() != b.grid.bus_count() ||
        a.grid.branch_count() != b.grid.branch_count() ||
        a.grid.generators.size() != b.grid.generators.size() ||
        !eq(a.grid.base_mva, b.grid.base_mva))
        return false;
    for (std::size_t i = 0; i < a.grid.buses.size(); ++i) {
        const auto& x = a.grid.buses[i];
        const auto& y = b.grid.buses[i];
        if (x.id != y.id || x.kind != y.kind || !eq(x.v_setpoint, y.v_setpoint) ||
            !eq(x.p_load_mw, y.p_load_mw) || !eq(x.q_load_mvar, y.q_load_mvar) ||
            !eq(x.gs_mw, y.gs_mw) || !eq(x.bs_mvar, y.bs_mvar))
            return false;
    }
    for (std::size_t i = 0; i < a.grid.branches.size(); ++i) {
        const auto& x = a.grid.branches[i];
        const auto& y = b.grid.branches[i];
        if (x.from != y.from || x.to != y.to || !eq(x.r_pu, y.r_pu) || !eq(x.x_pu, y.x_pu) ||
            !eq(x.b_shunt_pu, y.b_shunt_pu) || !eq(x.tap, y.tap))
            return false;
    }
    for (std::size_t i = 0; i < a.grid.generators.size(); ++i) {
        const auto& x = a.grid.generators[i];
        const auto& y = b.grid.generators[i];
        if (x.bus != y.bus || !eq(x.p_mw, y.p_mw) || !eq(x.v_setpoint, y.v_setpoint)) return false;
    }
    if (a.gtus.size() != b.gtus.size()) return false;
    for (std::size_t i = 0; i < a.gtus.size(); ++i) {
        const auto& x = a.gtus[i];
        const auto& y = b.gtus[i];
        if (x.bus != y.bus || x.gas_sink != y.gas_sink ||
            !eq(x.eta_mw_s_per_kg, y.eta_mw_s_per_kg))
            return false;
    }
    const auto& sa = a.scenario;
    const auto& sb = b.scenario;
    return sa.horizon_steps == sb.horizon_steps && sa.seed == sb.seed &&
           sa.warmup_steps == sb.warmup_steps && eq(sa.smoothing.alpha, sb.smoothing.alpha) &&
           eq(sa.smoothing.beta, sb.smoothing.beta) && sa.gas_loads_kg_s == sb.gas_loads_kg_s &&
           sa.gtu_power_mw == sb.gtu_power_mw && sa.bias_channels == sb.bias_channels &&
           eq(sa.load_shape.swing, sb.load_shape.swing) &&
           eq(sa.load_shape.peak_hour, sb.load_shape.peak_hour) &&
           eq(sa.load_shape.trough_hour, sb.load_shape.trough_hour) &&
           eq(sa.load_shape.jitter, sb.load_shape.jitter) &&
           eq(sa.process_noise_electric, sb.process_noise_electric) &&
           eq(sa.process_noise_gas, sb.process_noise_gas) &&
           eq(sa.init_covariance, sb.init_covariance) &&
           sa.load_predictor == sb.load_predictor && sa.noise.size() == sb.noise.size();
}

}  // namespace iges
