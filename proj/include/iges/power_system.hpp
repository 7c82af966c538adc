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

#include <utility>
#include <vector>

#include "iges/model.hpp"
#include "iges/types.hpp"

namespace iges::power {

/// Bus admittance split into real and imaginary parts (p.u.).
struct Admittance {
    Matrix g;
    Matrix b;
};

/// Standard pi-model bus admittance; diagonals include line charging halves,
/// bus shunts, and off-nominal tap scaling.
Admittance build_admittance(const PowerGridSpec& grid);

/// Rectangular voltages interleaved (e_1, f_1, ..., e_nB, f_nB), p.u.
struct PowerFlowResult {
    Vector voltages;
    int iterations = 0;
    double max_mismatch = 0.0;
};

struct PowerFlowOptions {
    double tolerance = 1e-10;  // max |S_sched - S_inj| in p.u.
    int max_iterations = 20;
    const Vector* warm_start = nullptr;  // rectangular, used on retry
};

/// Per-bus schedule in p.u.: net injected P for PV/PQ buses, Q for PQ buses.
struct BusSchedule {
    Vector p_injected;  // n_B (slack entry ignored)
    Vector q_injected;  // n_B (PV/slack entries ignored)
};

/// Newton-Raphson power flow (polar internally). Throws NonConvergence.
/// Tries a flat start first and retries from `warm_start` when provided.
PowerFlowResult power_flow(const PowerGridSpec& grid, const Admittance& adm,
                           const BusSchedule& sched, const PowerFlowOptions& opts = {});

/// Which quantities are metered; defaults to everything (full observability).
struct ElectricMeterPlan {
    std::vector<int> voltage_buses;                    // 1-based ids
    std::vector<std::pair<int, bool>> branch_meters;   // (branch index, at from end)
    std::vector<int> injection_buses;

    static ElectricMeterPlan full(const PowerGridSpec& grid);
    Index row_count() const {
        return 2 * static_cast<Index>(voltage_buses.size() + branch_meters.size() +
                                      injection_buses.size());
    }
};

/// Linear measurement matrix over the rectangular voltage state: identity
/// rows for metered voltages, pi-model branch-end current rows, and
/// admittance injected-current rows.
Matrix electric_measurement_matrix(const PowerGridSpec& grid, const Admittance& adm,
                                   const ElectricMeterPlan& plan);

}  // namespace iges::power
