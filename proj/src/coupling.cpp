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
#include "iges/coupling.hpp"

namespace iges {

double gtu_power_to_flow(double p_mw, double eta_mw_s_per_kg) {
    return p_mw / eta_mw_s_per_kg;
}

double injected_power(const Vector& voltages, const power::Admittance& adm, int bus) {
    const Index i = bus - 1;
    const Index n = adm.g.rows();
    const double ei = voltages[2 * i];
    const double fi = voltages[2 * i + 1];
    double p = 0.0;
    for (Index j = 0; j < n; ++j) {
        const double gij = adm.g(i, j);
        const double bij = adm.b(i, j);
        if (gij == 0.0 && bij == 0.0) continue;
        const double ej = voltages[2 * j];
        const double fj = voltages[2 * j + 1];
        p += ei * (gij * ej - bij * fj) + fi * (gij * fj + bij * ej);
    }
    return p;
}

double gtu_predicted_offtake(const Vector& predicted_voltages, const power::Admittance& adm,
                             const GtuCoupling& gtu, double base_mva) {
    const double p_pu = injected_power(predicted_voltages, adm, gtu.bus);
    return gtu_power_to_flow(p_pu * base_mva, gtu.eta_mw_s_per_kg);
}

std::string to_string(ChannelGroup g) {
    switch (g) {
        case ChannelGroup::VoltE: return "e";
        case ChannelGroup::VoltF: return "f";
        case ChannelGroup::BranchCurrent: return "branch_current";
        case ChannelGroup::InjectedCurrent: return "injected_current";
        case ChannelGroup::Pressure: return "pressure";
        case ChannelGroup::NetFlow: return "mflow";
    }
    return "?";
}

Index MeasurementLayout::find(const std::string& name) const {
    for (Index i = 0; i < dim(); ++i)
        if (channels[static_cast<std::size_t>(i)].name == name) return i;
    return -1;
}

JointModel build_joint(const IgesModel& model, gas::GasTransition tr, const Matrix& h_e,
                       const Matrix& h_g, const power::ElectricMeterPlan& plan,
                       const ChannelScales& scales) {
    JointModel jm;
    jm.layout.n_bus = model.grid.bus_count();
    jm.layout.n_node = model.gas.node_count();
    jm.layout.n_pipe = model.gas.pipe_count();
    jm.alpha = model.scenario.smoothing.alpha;
    jm.beta = model.scenario.smoothing.beta;
    jm.base_mva = model.grid.base_mva;
    jm.adm = power::build_admittance(model.grid);
    jm.gas_tr = std::move(tr);
    jm.source_densities = model.gas.source_densities();
    jm.sink_nodes = model.gas.sink_nodes();
    jm.gtus = model.gtus;
    jm.gtu_of_sink.assign(jm.sink_nodes.size(), -1);
    for (std::size_t k = 0; k < jm.sink_nodes.size(); ++k) {
        for (std::size_t g = 0; g < jm.gtus.size(); ++g)
            if (jm.gtus[g].gas_sink == jm.sink_nodes[k]) jm.gtu_of_sink[k] = static_cast<int>(g);
        if (jm.gtu_of_sink[k] < 0) jm.load_sink_slots.push_back(static_cast<int>(k));
    }

    const Index ne = jm.layout.electric_dim();
    const Index ng = model.gas.state_dim();
    if (h_e.cols() != ne) throw NumericFailure("build_joint: H_E column count mismatch");
    if (h_g.cols() != ng) throw NumericFailure("build_joint: H_G column count mismatch");

    jm.f = Matrix::Zero(ne + ng, ne + ng);
    jm.f.topLeftCorner(ne, ne) = jm.alpha * Matrix::Identity(ne, ne);
    jm.f.bottomRightCorner(ng, ng) = jm.gas_tr.f;

    jm.h = Matrix::Zero(h_e.rows() + h_g.rows(), ne + ng);
    jm.h.topLeftCorner(h_e.rows(), ne) = h_e;
    jm.h.bottomRightCorner(h_g.rows(), ng) = h_g;

    // channel metadata mirrors the rows of H
    auto& ml = jm.mlayout;
    ml.voltage_offset = 0;
    for (int bus : plan.voltage_buses) {
        ml.channels.push_back({"bus" + std::to_string(bus) + ".e", ChannelGroup::VoltE, 1.0, 1.0});
        ml.channels.push_back({"bus" + std::to_string(bus) + ".f", ChannelGroup::VoltF, 1.0, 1.0});
    }
    ml.branch_offset = ml.dim();
    for (const auto& [bidx, at_from] : plan.branch_meters) {
        const auto& br = model.grid.branches[static_cast<std::size_t>(bidx)];
        const std::string stem = "branch" + std::to_string(bidx + 1) + "_" +
                                 std::to_string(br.from) + "_" + std::to_string(br.to) +
                                 (at_from ? ".from" : ".to");
        ml.channels.push_back({stem + ".ire", ChannelGroup::BranchCurrent, 1.0, 1.0});
        ml.channels.push_back({stem + ".iim", ChannelGroup::BranchCurrent, 1.0, 1.0});
    }
    ml.injection_offset = ml.dim();
    for (int bus : plan.injection_buses) {
        ml.channels.push_back(
            {"bus" + std::to_string(bus) + ".iinj_re", ChannelGroup::InjectedCurrent, 1.0, 1.0});
        ml.channels.push_back(
            {"bus" + std::to_string(bus) + ".iinj_im", ChannelGroup::InjectedCurrent, 1.0, 1.0});
    }
    ml.pressure_offset = ml.dim();
    for (const auto& node : model.gas.nodes)
        ml.channels.push_back({"node" + std::to_string(node.id) + ".pressure_bar",
                               ChannelGroup::Pressure, scales.pressure_pa, kBarToPa});
    ml.netflow_offset = ml.dim();
    for (const auto& node : model.gas.nodes)
        ml.channels.push_back({"node" + std::to_string(node.id) + ".net_mflow",
                               ChannelGroup::NetFlow, scales.flow_kg_s, 1.0});
    if (ml.dim() != jm.h.rows())
        throw NumericFailure("build_joint: channel metadata does not match H rows");
    return jm;
}

Vector assemble_u(const JointModel& jm, const Vector& u_electric, const Vector& sink_offtakes) {
    const Index np = jm.layout.n_pipe;
    const Index ns = jm.source_densities.size();
    const Index nsi = static_cast<Index>(jm.sink_nodes.size());
    if (sink_offtakes.size() != nsi)
        throw NumericFailure("assemble_u: expected one offtake per sink node");
    Vector bound = Vector::Zero(jm.gas_tr.dim());
    bound.segment(2 * np, ns) = jm.source_densities;
    bound.segment(2 * np + ns, nsi) = sink_offtakes;
    Vector u(jm.layout.dim());
    u << u_electric, jm.gas_tr.apply_a_inverse(bound);
    return u;
}

void UBuilder::seed(const Vector& voltages_first, const Vector& voltages_second,
                    const Vector& loads_first, const Vector& loads_second) {
    voltage_holt_ = holt_init(voltages_first, voltages_second, jm_->alpha, jm_->beta);
    load_holt_ = holt_init(loads_first, loads_second, jm_->alpha, jm_->beta);
    pred_voltages_ = voltage_holt_.level + voltage_holt_.trend;
    u_voltages_ = pred_voltages_ - jm_->alpha * voltages_second;
    pred_loads_ = load_holt_.level + load_holt_.trend;
    seeded_ = true;
}

void UBuilder::observe(const Vector& voltages, const Vector& loads) {
    if (!seeded_) throw NumericFailure("UBuilder::observe before seed");
    const auto vh = holt_step(voltage_holt_, voltages);
    voltage_holt_ = vh.next;
    pred_voltages_ = vh.predicted;
    u_voltages_ = vh.u;
    const auto lh = holt_step(load_holt_, loads);
    load_holt_ = lh.next;
    pred_loads_ = lh.predicted;
}

UBuilder::Input UBuilder::next_input() const {
    if (!seeded_) throw NumericFailure("UBuilder::next_input before seed");
    Vector offtakes(static_cast<Index>(jm_->sink_nodes.size()));
    Index load_slot = 0;
    for (std::size_t k = 0; k < jm_->sink_nodes.size(); ++k) {
        const int g = jm_->gtu_of_sink[k];
        if (g >= 0)
            offtakes[static_cast<Index>(k)] = gtu_predicted_offtake(
                pred_voltages_, jm_->adm, jm_->gtus[static_cast<std::size_t>(g)], jm_->base_mva);
        else
            offtakes[static_cast<Index>(k)] = pred_loads_[load_slot++];
    }
    Input in;
    in.u = assemble_u(*jm_, u_voltages_, offtakes);
    in.predicted_voltages = pred_voltages_;
    in.sink_offtakes = offtakes;
    return in;
}

Vector exact_u(const JointModel& jm, const Vector& x_e_now, const Vector& x_e_next,
               const Vector& sink_offtakes_next) {
    const Vector u_e = x_e_next - jm.alpha * x_e_now;
    return assemble_u(jm, u_e, sink_offtakes_next);
}

}  // namespace iges
