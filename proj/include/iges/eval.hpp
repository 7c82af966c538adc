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

#include <string>
#include <vector>

#include "iges/coupling.hpp"
#include "iges/types.hpp"

namespace iges {

/// Ratio of estimation-error energy to measurement-error energy over a
/// channel. Throws DegenerateDenominator when measurement == truth throughout.
double filter_coefficient(const Vector& est, const Vector& meas, const Vector& truth);

/// Mean squared estimation error over a channel.
double total_variance(const Vector& est, const Vector& truth);

enum class MetricFlag { Ok, ConstantTruth, ZeroDenominator };

std::string to_string(MetricFlag flag);

struct ChannelMetrics {
    std::string channel;
    std::string group;
    double eps1 = 0.0;  // NaN when flagged ZeroDenominator
    double eps2 = 0.0;  // in normalized channel units
    MetricFlag flag = MetricFlag::Ok;
};

struct GroupSummary {
    std::string group;
    int channels = 0;
    double eps1_min = 0, eps1_mean = 0, eps1_max = 0;
    double eps2_min = 0, eps2_mean = 0, eps2_max = 0;
};

struct MetricsTable {
    std::vector<ChannelMetrics> rows;
    std::vector<GroupSummary> groups;  // aggregates over unflagged channels
};

/// Truth / measurement / estimate series aligned on the directly-metered
/// channels (bus voltages, node pressures, node net flows).
struct RunArtifacts {
    std::vector<std::string> channel_names;
    std::vector<std::string> groups;
    Vector scales;  // per-channel normalization used by eps2
    Matrix truth;
    Matrix meas;
    Matrix est;
    int warmup = 2;  // leading steps excluded from the indexes
};

/// Projects state-space truth/estimates and the measurement series onto the
/// comparable channel set.
RunArtifacts make_artifacts(const JointModel& jm, const Matrix& truth_states,
                            const Matrix& measurements, const Matrix& estimates, int warmup);

MetricsTable report(const RunArtifacts& artifacts);

/// CSV body: channel,group,eps1,eps2,flag.
std::string metrics_to_csv(const MetricsTable& table);

}  // namespace iges
