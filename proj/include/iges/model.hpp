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
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "iges/errors.hpp"
#include "iges/types.hpp"

namespace iges {

// ---------------------------------------------------------------- gas side

enum class GasNodeKind { Source, Sink };

struct GasNode {
    int id = 0;
    GasNodeKind kind = GasNodeKind::Sink;
    double fixed_density = 0.0;  // kg/m^3, sources only (rho_C = p_C / c^2)
};

struct Pipeline {
    int from = 0;  // lower-numbered end
    int to = 0;    // higher-numbered end
    double length_m = 0.0;
    double diameter_m = 0.0;
    double avg_velocity_mps = 5.0;  // |v| used by the linearized friction term

    double cross_section_m2() const {
        return std::numbers::pi * diameter_m * diameter_m / 4.0;
    }
};

struct GasNetworkSpec {
    std::vector<GasNode> nodes;       // sorted by id, ids 1..n dense
    std::vector<Pipeline> pipelines;  // states per pipe l: slot 2l-1 = flow at `from`, slot 2l = flow at `to`
    double friction = 0.015;
    double sound_speed_mps = 340.0;
    double dt_s = 600.0;
    int subdivide = 1;  // >1 splits every pipe into equal segments with passive sink nodes

    int node_count() const { return static_cast<int>(nodes.size()); }
    int pipe_count() const { return static_cast<int>(pipelines.size()); }
    int state_dim() const { return node_count() + 2 * pipe_count(); }
    std::vector<int> source_nodes() const;  // ascending node ids
    std::vector<int> sink_nodes() const;
    /// Fixed densities of the source nodes, in source_nodes() order.
    Vector source_densities() const;
};

// -------------------------------------------------------------- power side

enum class BusKind { Slack, PV, PQ };

struct Bus {
    int id = 0;
    BusKind kind = BusKind::PQ;
    double v_setpoint = 1.0;    // p.u., Slack/PV only
    double p_load_mw = 0.0;     // base load
    double q_load_mvar = 0.0;
    double gs_mw = 0.0;         // bus shunt at V = 1 p.u.
    double bs_mvar = 0.0;
};

struct Branch {
    int from = 0;
    int to = 0;
    double r_pu = 0.0;
    double x_pu = 0.0;
    double b_shunt_pu = 0.0;  // total line charging susceptance
    double tap = 1.0;         // fixed off-nominal ratio at the from side, 1 = none
};

struct Generator {
    int bus = 0;
    double p_mw = 0.0;
    double v_setpoint = 1.0;
};

struct PowerGridSpec {
    std::vector<Bus> buses;  // sorted by id, ids 1..n dense
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    double base_mva = 100.0;

    int bus_count() const { return static_cast<int>(buses.size()); }
    int branch_count() const { return static_cast<int>(branches.size()); }
};

// ---------------------------------------------------------------- coupling

struct GtuCoupling {
    int bus = 0;       // electric bus the unit feeds
    int gas_sink = 0;  // sink node supplying the unit
    double eta_mw_s_per_kg = 0.0;
};

// ---------------------------------------------------------------- scenario

struct SmoothingParams {
    double alpha = 0.8;
    double beta = 0.7;
};

struct LoadShape {
    double swing = 0.30;       // relative amplitude around nominal
    double peak_hour = 18.0;
    double trough_hour = 4.0;
    double jitter = 0.01;      // seeded per-step relative perturbation
};

enum class NoiseKind { Gaussian, BiasedGaussian, Cauchy, Laplace };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::Gaussian;
    std::string target = "all";  // "all" | "group:<name>" | "channel:<name>"
    double sigma = 0.02;         // Gaussian / BiasedGaussian std
    double bias = 0.0;           // BiasedGaussian offset
    double location = 0.0;       // Cauchy / Laplace
    double scale = 0.02;         // Cauchy / Laplace
};

struct ScenarioConfig {
    int horizon_steps = 144;
    std::uint64_t seed = 42;
    SmoothingParams smoothing;
    int warmup_steps = 2;  // leading steps estimated statically and excluded from indexes
    LoadShape load_shape;
    std::map<int, double> gas_loads_kg_s;  // nominal offtake per non-GTU sink node
    std::map<int, double> gtu_power_mw;    // nominal dispatch override per GTU bus
    std::vector<NoiseSpec> noise{NoiseSpec{}};
    std::vector<std::string> bias_channels;  // channels targeted by the biased scenario
    /// What the gas-load smoother observes: the scheduled demand series
    /// ("scheduled", the operator's forecast) or the metered net offtakes
    /// ("measured").
    std::string load_predictor = "scheduled";
    double process_noise_electric = 1e-6;    // Q diagonal, electric block
    double process_noise_gas = 1e-4;         // Q diagonal, gas block
    double init_covariance = 1e-2;           // P0 diagonal
    double voltage_band_lo = 0.5;            // truth |V| sanity band, p.u.
    double voltage_band_hi = 1.5;
};

// ------------------------------------------------------------------- model

struct IgesModel {
    GasNetworkSpec gas;
    PowerGridSpec grid;
    std::vector<GtuCoupling> gtus;
    ScenarioConfig scenario;

    bool is_gtu_sink(int node) const;
    const GtuCoupling* gtu_at_sink(int node) const;
};

// ------------------------------------------------------------- validation

enum class IssueCode {
    DuplicateNodeId,
    NonDenseNodeIds,
    UnknownNodeRef,
    PipelineOrientation,
    NonPositiveLength,
    NonPositiveDiameter,
    NonPositiveVelocity,
    NoSourceNode,
    SourceDensityNotPositive,
    DisconnectedGasNetwork,
    NonPositiveFriction,
    NonPositiveSoundSpeed,
    NonPositiveTimeStep,
    DuplicateBusId,
    NonDenseBusIds,
    UnknownBusRef,
    NoSlackBus,
    MultipleSlackBuses,
    BadVoltageSetpoint,
    NegativeTap,
    GtuSinkNotSink,
    GtuBusUnknown,
    NonPositiveEta,
    GtuSinkShared,
    GtuSinkHasLoad,
    BadSmoothing,
    HorizonTooShort,
    BadNoiseSpec,
    UnknownLoadNode,
    UnknownGtuPowerBus,
};

std::string to_string(IssueCode code);

struct Issue {
    IssueCode code;
    std::string message;
};

/// Full invariant sweep; empty result means the model is well formed.
std::vector<Issue> validate(const IgesModel& model);

/// Parse + validate a model config file. Throws ParseError / ValidationError.
IgesModel load_model(const std::filesystem::path& path);

/// Parse a model from JSON text (matpower references resolved against base_dir).
IgesModel parse_model(const std::string& text, const std::filesystem::path& base_dir);

/// Canonical JSON form; load of the serialization reproduces the model.
nlohmann::json serialize(const IgesModel& model);

/// Parse a MATPOWER-style case file (bus/gen/branch tables) into a grid.
PowerGridSpec load_matpower_case(const std::filesystem::path& path);

bool operator==(const IgesModel& a, const IgesModel& b);

}  // namespace iges
