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

#include <functional>

#include "iges/coupling.hpp"
#include "iges/kalman.hpp"
#include "iges/types.hpp"

namespace iges {

/// Diagonal process / measurement covariances.
struct NoiseCov {
    Vector q_diag;
    Vector r_diag;
};

/// Spec defaults: electric block 1e-6, gas block 1e-4 (overridable through the
/// scenario config); R from the configured Gaussian sigma times the channel
/// nominal scale. Heavy-tailed scenarios keep this R on purpose.
NoiseCov default_noise_cov(const JointModel& jm, const ScenarioConfig& cfg);

/// Observable-consistent initial state from one measurement vector: electric
/// and density blocks by least squares through H, the pipe-flow block from the
/// steady-state solve driven by the measured net offtakes.
KalmanState initial_state(const JointModel& jm, const Vector& z, double p0_diag);

struct DseOptions {
    int warmup = 2;  // leading steps estimated statically (smoother seeding)
    /// Scheduled demand per load-driven sink (rows = steps, columns aligned
    /// with JointModel::load_sink_slots). When set, the load smoother runs on
    /// this series; otherwise it is seeded from the first measurements and
    /// advances on the filtered offtake estimates.
    const Matrix* scheduled_loads = nullptr;
    std::function<void(int step, const KalmanState&)> observer;  // optional
};

struct DseResult {
    Matrix estimates;  // S x state dim, filtered
    double mean_step_seconds = 0.0;  // predict+update only
};

/// Filtered estimates over a measurement series (rows = steps). The voltage
/// smoother advances on the filtered estimates; the load smoother on the
/// measured sink net-flow channels. Throws NumericFailure with the step index.
DseResult run_dse(const JointModel& jm, const Matrix& measurements, const NoiseCov& cov,
                  const KalmanState& init, const DseOptions& opts = {});

/// Measured net offtakes of the load-driven sinks, pulled out of one
/// measurement row.
Vector sink_load_channels(const JointModel& jm, const Vector& z);

/// Net offtakes of the load-driven sinks implied by a filtered joint state.
Vector filtered_sink_loads(const JointModel& jm, const Vector& x);

}  // namespace iges
