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

#include "iges/gas_dynamics.hpp"
#include "iges/holt.hpp"
#include "iges/model.hpp"
#include "iges/power_system.hpp"
#include "iges/types.hpp"

namespace iges {

/// Gas mass flow (kg/s) a unit consumes to produce p_mw at conversion eta.
double gtu_power_to_flow(double p_mw, double eta_mw_s_per_kg);

/// Real power injected at a bus (p.u.) for an interleaved rectangular state.
double injected_power(const Vector& voltages, const power::Admittance& adm, int bus);

/// Predicted gas offtake (kg/s) of a unit, from a predicted voltage state.
double gtu_predicted_offtake(const Vector& predicted_voltages, const power::Admittance& adm,
                             const GtuCoupling& gtu, double base_mva);

/// Slot map of the joint state [x_E ; x_G].
struct StateLayout {
    Index n_bus = 0;
    Index n_node = 0;
    Index n_pipe = 0;

    Index electric_dim() const { return 2 * n_bus; }
    Index density_offset() const { return 2 * n_bus; }
    Index flow_offset() const { return 2 * n_bus + n_node; }
    Index dim() const { return 2 * n_bus + n_node + 2 * n_pipe; }
};

enum class ChannelGroup { VoltE, VoltF, BranchCurrent, InjectedCurrent, Pressure, NetFlow };

std::string to_string(ChannelGroup g);

struct MeasChannel {
    std::string name;
    ChannelGroup group;
    double scale = 1.0;     // nominal magnitude used for noise / index normalization
    double io_scale = 1.0;  // internal value = io_scale * CSV value
};

struct MeasurementLayout {
    std::vector<MeasChannel> channels;
    Index voltage_offset = 0;
    Index branch_offset = 0;
    Index injection_offset = 0;
    Index pressure_offset = 0;
    Index netflow_offset = 0;

    Index dim() const { return static_cast<Index>(channels.size()); }
    Index find(const std::string& name) const;  // -1 when absent
};

/// Nominal magnitudes for the gas measurement groups.
struct ChannelScales {
    double pressure_pa = 1.0;
    double flow_kg_s = 1.0;
};

/// Block-diagonal joint transition/measurement model plus everything the
/// per-step control-input recipe needs.
struct JointModel {
    StateLayout layout;
    MeasurementLayout mlayout;
    Matrix f;  // diag(alpha * I, F_G)
    Matrix h;  // diag(H_E, H_G)
    gas::GasTransition gas_tr;
    power::Admittance adm;
    double alpha = 0.8;
    double beta = 0.7;
    double base_mva = 100.0;
    Vector source_densities;            // ascending source node order
    std::vector<int> sink_nodes;        // ascending, matches the sink boundary rows
    std::vector<GtuCoupling> gtus;
    std::vector<int> gtu_of_sink;       // index into gtus, -1 when load-driven
    std::vector<int> load_sink_slots;   // positions in sink_nodes driven by load prediction

    Vector electric_part(const Vector& joint) const { return joint.head(layout.electric_dim()); }
};

JointModel build_joint(const IgesModel& model, gas::GasTransition tr, const Matrix& h_e,
                       const Matrix& h_g, const power::ElectricMeterPlan& plan,
                       const ChannelScales& scales);

/// Stateful per-run recipe for u_I: a Holt smoother over the filtered voltage
/// estimates, one Holt smoother over the measured net offtakes of the
/// load-driven sinks, and the unit coupling for GTU-fed sinks.
class UBuilder {
  public:
    explicit UBuilder(const JointModel& jm) : jm_(&jm) {}

    bool seeded() const { return seeded_; }

    /// Seed both smoothers from the first two samples.
    void seed(const Vector& voltages_first, const Vector& voltages_second,
              const Vector& loads_first, const Vector& loads_second);

    /// Record the filtered voltages and measured sink loads of the step just
    /// estimated; refreshes the prediction for the following step.
    void observe(const Vector& voltages, const Vector& loads);

    struct Input {
        Vector u;                   // joint control input
        Vector predicted_voltages;  // Holt forecast used by the coupling
        Vector sink_offtakes;       // per sink_nodes entry
    };
    /// Control input for the upcoming step, from the current smoother states.
    Input next_input() const;

  private:
    const JointModel* jm_;
    HoltState voltage_holt_;
    HoltState load_holt_;
    Vector pred_voltages_, u_voltages_, pred_loads_;
    bool seeded_ = false;
};

/// u_I for known (exact) next voltages and sink offtakes; the gas block goes
/// through the same boundary assembly the runtime recipe uses.
Vector exact_u(const JointModel& jm, const Vector& x_e_now, const Vector& x_e_next,
               const Vector& sink_offtakes_next);

/// Assembles [u_E ; A^{-1} U] from an electric input and per-sink offtakes.
Vector assemble_u(const JointModel& jm, const Vector& u_electric, const Vector& sink_offtakes);

}  // namespace iges
