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
#include <random>
#include <string>
#include <vector>

#include "iges/coupling.hpp"
#include "iges/model.hpp"
#include "iges/types.hpp"

namespace iges {

/// Deterministic noise stream. The transforms are pinned (Box-Muller cosine
/// branch, inverse-CDF Laplace, tangent Cauchy) so sequences stay reproducible
/// across library and compiler versions.
class NoiseRng {
  public:
    explicit NoiseRng(std::uint64_t seed) : rng_(seed) {}
    double uniform();   // [0, 1)
    double gaussian();  // standard normal
    double laplace();   // unit scale, zero location
    double cauchy();    // unit scale, zero location

  private:
    std::mt19937_64 rng_;
};

/// Diurnal profile value in [-1, 1]: piecewise cosine with the configured
/// peak and trough hours.
double shape_value(const LoadShape& shape, double hour);

/// Deterministic per-step operating schedule derived from the config.
struct Schedule {
    Matrix bus_p_mw;           // S x n_B
    Matrix bus_q_mvar;         // S x n_B
    Matrix gen_p_mw;           // S x n_gen
    Matrix sink_offtake_kg_s;  // S x n_sink; GTU sinks carry scheduled dispatch / eta
    Vector sys_scale;          // S, aggregate load scaling applied to generation
    Vector hours;              // S, hour of day per step
};

Schedule compute_schedule(const IgesModel& model);

/// Nominal channel magnitudes: max source pressure and peak scheduled flow.
ChannelScales channel_scales(const IgesModel& model, const Schedule& sched);

struct TruthSeries {
    Matrix states;             // S x (2 n_B + n_N + 2 n_P)
    Matrix sink_offtakes;      // S x n_sink, actual offtakes the gas stepping used
    Schedule schedule;
};

/// Ground truth: per step a power flow, the unit coupling, and one gas
/// transition step from a steady-state start. Throws NonConvergence /
/// NumericFailure.
TruthSeries simulate_truth(const IgesModel& model);

/// z_t = H x_t + w_t with w drawn per spec; deterministic given the seed.
Matrix synthesize_measurements(const JointModel& jm, const Matrix& truth_states,
                               const std::vector<NoiseSpec>& specs, std::uint64_t seed);

/// Noise spec list for a named scenario: "gaussian", "biased", "laplace",
/// "cauchy". sigma < 0 keeps the configured default; bias applies to the
/// config's designated channels.
std::vector<NoiseSpec> scenario_noise_specs(const IgesModel& model, const std::string& name,
                                            double sigma = -1.0, double bias = 0.02);

/// Resolved noise spec for one channel (last matching entry wins).
const NoiseSpec* resolve_noise(const std::vector<NoiseSpec>& specs, const MeasChannel& ch);

}  // namespace iges
