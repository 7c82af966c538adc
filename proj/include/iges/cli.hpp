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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "iges/estimator.hpp"
#include "iges/eval.hpp"
#include "iges/scenario.hpp"

namespace iges::cli {

struct RunOverrides {
    std::string scenario = "gaussian";  // gaussian | biased | laplace | cauchy
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<double> sigma;
    double bias = 0.02;                 // biased scenario offset, normalized units
    std::optional<int> warmup;
    std::filesystem::path out_dir;      // empty -> runs/<scenario>_seed<seed>
};

/// Everything a run needs besides the truth series.
struct BuiltSystem {
    Schedule schedule;
    ChannelScales scales;
    JointModel jm;
};

void apply_overrides(IgesModel& model, const RunOverrides& ov);
BuiltSystem build_system(const IgesModel& model);

// state-series CSV channelization (densities written as pressure_bar)
std::vector<std::string> state_channel_names(const IgesModel& model);
Matrix states_to_io(const IgesModel& model, const Matrix& states);
Matrix io_to_states(const IgesModel& model, const Matrix& io);
std::vector<std::string> meas_channel_names(const JointModel& jm);
Matrix meas_to_io(const JointModel& jm, const Matrix& z);
Matrix io_to_meas(const JointModel& jm, const Matrix& io);

/// Exit codes: 0 success, 1 config/validation, 2 numeric failure, 3 I/O.
int cmd_validate(const std::filesystem::path& config);
int cmd_simulate(const std::filesystem::path& config, const RunOverrides& ov);
int cmd_run(const std::filesystem::path& config, const RunOverrides& ov);
int cmd_estimate(const std::filesystem::path& config, const std::filesystem::path& measurements,
                 const std::optional<std::filesystem::path>& truth, const RunOverrides& ov);
int cmd_run_manifest(const std::filesystem::path& manifest);

/// Runs several scenarios concurrently (output under out_dir/<scenario>).
int cmd_run_scenarios(const std::filesystem::path& config, const RunOverrides& base,
                      const std::vector<std::string>& scenarios, int jobs);

}  // namespace iges::cli
