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
#include "iges/eval.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

namespace iges {

double filter_coefficient(const Vector& est, const Vector& meas, const Vector& truth) {
    if (est.size() != truth.size() || meas.size() != truth.size() || est.size() == 0)
        throw NumericFailure("filter_coefficient: series lengths disagree");
    const double num = (est - truth).squaredNorm();
    const double den = (meas - truth).squaredNorm();
    if (den == 0.0)
        throw DegenerateDenominator("filter_coefficient: measurement equals truth on every step");
    return num / den;
}

double total_variance(const Vector& est, const Vector& truth) {
    if (est.size() != truth.size() || est.size() == 0)
        throw NumericFailure("total_variance: series lengths disagree");
    return (est - truth).squaredNorm() / static_cast<double>(est.size());
}

std::string to_string(MetricFlag flag) {
    switch (flag) {
        case MetricFlag::Ok: return "ok";
        case MetricFlag::ConstantTruth: return "constant_truth";
        case MetricFlag::ZeroDenominator: return "zero_denominator";
    }
    return "?";
}

RunArtifacts make_artifacts(const JointModel& jm, const Matrix& truth_states,
                            const Matrix& measurements, const Matrix& estimates, int warmup) {
    const auto& ml = jm.mlayout;
    std::vector<Index> rows;
    for (Index c = 0; c < ml.dim(); ++c) {
        const auto g = ml.channels[static_cast<std::size_t>(c)].group;
        if (g == ChannelGroup::VoltE || g == ChannelGroup::VoltF || g == ChannelGroup::Pressure ||
            g == ChannelGroup::NetFlow)
            rows.push_back(c);
    }
    RunArtifacts art;
    art.warmup = warmup;
    const Index nc = static_cast<Index>(rows.size());
    const Index steps = truth_states.rows();
    art.scales.resize(nc);
    art.truth.resize(steps, nc);
    art.meas.resize(steps, nc);
    art.est.resize(steps, nc);
    Matrix h_sel(nc, jm.h.cols());
    for (Index k = 0; k < nc; ++k) {
        const auto& ch = ml.channels[static_cast<std::size_t>(rows[static_cast<std::size_t>(k)])];
        art.channel_names.push_back(ch.name);
        art.groups.push_back(to_string(ch.group));
        art.scales[k] = ch.scale;
        h_sel.row(k) = jm.h.row(rows[static_cast<std::size_t>(k)]);
        art.meas.col(k) = measurements.col(rows[static_cast<std::size_t>(k)]);
    }
    art.truth = truth_states * h_sel.transpose();
    art.est = estimates * h_sel.transpose();
    return art;
}

MetricsTable report(const RunArtifacts& art) {
    MetricsTable table;
    const Index steps = art.truth.rows();
    const Index lo = std::min<Index>(art.warmup, steps);
    const Index len = steps - lo;
    std::map<std::string, std::vector<const ChannelMetrics*>> by_group;

    for (std::size_t c = 0; c < art.channel_names.size(); ++c) {
        const Index ci = static_cast<Index>(c);
        const Vector truth = art.truth.col(ci).segment(lo, len);
        const Vector meas = art.meas.col(ci).segment(lo, len);
        const Vector est = art.est.col(ci).segment(lo, len);

        ChannelMetrics m;
        m.channel = art.channel_names[c];
        m.group = art.groups[c];
        const double scale = art.scales[ci];
        m.eps2 = total_variance(est / scale, truth / scale);
        if (truth.maxCoeff() - truth.minCoeff() == 0.0) m.flag = MetricFlag::ConstantTruth;
        try {
            m.eps1 = filter_coefficient(est, meas, truth);
        } catch (const DegenerateDenominator&) {
            m.flag = MetricFlag::ZeroDenominator;
            m.eps1 = std::numeric_limits<double>::quiet_NaN();
        }
        table.rows.push_back(m);
    }
    for (const auto& row : table.rows)
        if (row.flag == MetricFlag::Ok) by_group[row.group].push_back(&row);
    for (const auto& [name, rows] : by_group) {
        GroupSummary g;
        g.group = name;
        g.channels = static_cast<int>(rows.size());
        g.eps1_min = g.eps2_min = std::numeric_limits<double>::infinity();
        for (const auto* r : rows) {
            g.eps1_min = std::min(g.eps1_min, r->eps1);
            g.eps1_max = std::max(g.eps1_max, r->eps1);
            g.eps1_mean += r->eps1 / rows.size();
            g.eps2_min = std::min(g.eps2_min, r->eps2);
            g.eps2_max = std::max(g.eps2_max, r->eps2);
            g.eps2_mean += r->eps2 / rows.size();
        }
        table.groups.push_back(g);
    }
    return table;
}

std::string metrics_to_csv(const MetricsTable& table) {
    std::string out = "channel,group,eps1,eps2,flag\n";
    char buf[128];
    for (const auto& r : table.rows) {
        out += r.channel + "," + r.group + ",";
        if (std::isnan(r.eps1))
            out += "";
        else {
            std::snprintf(buf, sizeof buf, "%.17g", r.eps1);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g,", r.eps2);
        out += buf;
        out += to_string(r.flag) + "\n";
    }
    return out;
}

}  // namespace iges
