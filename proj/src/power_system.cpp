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
#include "iges/power_system.hpp"

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/LU>

namespace iges::power {

using Complex = std::complex<double>;

Admittance build_admittance(const PowerGridSpec& grid) {
    const Index n = grid.bus_count();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& br : grid.branches) {
        const Complex ys = 1.0 / Complex(br.r_pu, br.x_pu);
        const Complex ysh(0.0, br.b_shunt_pu / 2.0);
        const double t = br.tap;
        const Index i = br.from - 1;
        const Index j = br.to - 1;
        y(i, i) += (ys + ysh) / (t * t);
        y(j, j) += ys + ysh;
        y(i, j) += -ys / t;
        y(j, i) += -ys / t;
    }
    for (const auto& bus : grid.buses)
        y(bus.id - 1, bus.id - 1) += Complex(bus.gs_mw, bus.bs_mvar) / grid.base_mva;
    return Admittance{y.real(), y.imag()};
}

namespace {

Eigen::VectorXcd complex_voltages(const Vector& vm, const Vector& va) {
    Eigen::VectorXcd v(vm.size());
    for (Index i = 0; i < vm.size(); ++i) v[i] = std::polar(vm[i], va[i]);
    return v;
}

PowerFlowResult newton_attempt(const PowerGridSpec& grid, const Eigen::MatrixXcd& y,
                               const BusSchedule& sched, const PowerFlowOptions& opts,
                               Vector vm, Vector va) {
    const Index n = grid.bus_count();
    Index slack = 0;
    std::vector<Index> pq;
    std::vector<Index> nonslack;
    for (const auto& b : grid.buses) {
        const Index i = b.id - 1;
        if (b.kind == BusKind::Slack) slack = i;
        else nonslack.push_back(i);
        if (b.kind == BusKind::PQ) pq.push_back(i);
    }
    const Index nns = static_cast<Index>(nonslack.size());
    const Index npq = static_cast<Index>(pq.size());

    double mismatch = 0.0;
    for (int it = 0; it <= opts.max_iterations; ++it) {
        const Eigen::VectorXcd v = complex_voltages(vm, va);
        const Eigen::VectorXcd ibus = y * v;
        const Eigen::VectorXcd s = v.array() * ibus.array().conjugate();

        Vector dp(nns), dq(npq);
        for (Index k = 0; k < nns; ++k) dp[k] = sched.p_injected[nonslack[k]] - s[nonslack[k]].real();
        for (Index k = 0; k < npq; ++k) dq[k] = sched.q_injected[pq[k]] - s[pq[k]].imag();
        mismatch = 0.0;
        if (nns) mismatch = std::max(mismatch, dp.cwiseAbs().maxCoeff());
        if (npq) mismatch = std::max(mismatch, dq.cwiseAbs().maxCoeff());
        if (mismatch < opts.tolerance) {
            Vector rect(2 * n);
            for (Index i = 0; i < n; ++i) {
                rect[2 * i] = v[i].real();
                rect[2 * i + 1] = v[i].imag();
            }
            return PowerFlowResult{rect, it, mismatch};
        }
        if (it == opts.max_iterations) break;

        // dS/dVa and dS/dVm in polar coordinates
        Eigen::MatrixXcd diag_v = v.asDiagonal();
        Eigen::MatrixXcd diag_ibus = ibus.asDiagonal();
        Eigen::VectorXcd vnorm(n);
        for (Index i = 0; i < n; ++i) vnorm[i] = v[i] / vm[i];
        Eigen::MatrixXcd ds_dva =
            Complex(0, 1) * diag_v * (diag_ibus - y * diag_v).conjugate();
        Eigen::MatrixXcd ds_dvm = Eigen::MatrixXcd(vnorm.asDiagonal()) * diag_ibus.conjugate() +
                                  diag_v * (y * Eigen::MatrixXcd(vnorm.asDiagonal())).conjugate();

        Matrix jac(nns + npq, nns + npq);
        for (Index r = 0; r < nns; ++r) {
            for (Index c = 0; c < nns; ++c) jac(r, c) = ds_dva(nonslack[r], nonslack[c]).real();
            for (Index c = 0; c < npq; ++c) jac(r, nns + c) = ds_dvm(nonslack[r], pq[c]).real();
        }
        for (Index r = 0; r < npq; ++r) {
            for (Index c = 0; c < nns; ++c) jac(nns + r, c) = ds_dva(pq[r], nonslack[c]).imag();
            for (Index c = 0; c < npq; ++c) jac(nns + r, nns + c) = ds_dvm(pq[r], pq[c]).imag();
        }
        Vector rhs(nns + npq);
        rhs << dp, dq;
        const Vector dx = jac.partialPivLu().solve(rhs);
        for (Index k = 0; k < nns; ++k) va[nonslack[k]] += dx[k];
        for (Index k = 0; k < npq; ++k) vm[pq[k]] += dx[nns + k];
    }
    throw NonConvergence("power flow did not converge (mismatch " + std::to_string(mismatch) +
                         " p.u.)");
}

}  // namespace

PowerFlowResult power_flow(const PowerGridSpec& grid, const Admittance& adm,
                           const BusSchedule& sched, const PowerFlowOptions& opts) {
    const Index n = grid.bus_count();
    Eigen::MatrixXcd y(n, n);
    y.real() = adm.g;
    y.imag() = adm.b;

    Vector vm = Vector::Ones(n);
    Vector va = Vector::Zero(n);
    for (const auto& b : grid.buses)
        if (b.kind != BusKind::PQ) vm[b.id - 1] = b.v_setpoint;

    try {
        return newton_attempt(grid, y, sched, opts, vm, va);
    } catch (const NonConvergence&) {
        if (!opts.warm_start) throw;
    }
    // retry seeded from the previous operating point
    Vector vm2(n), va2(n);
    for (Index i = 0; i < n; ++i) {
        const Complex v((*opts.warm_start)[2 * i], (*opts.warm_start)[2 * i + 1]);
        vm2[i] = std::abs(v);
        va2[i] = std::arg(v);
    }
    for (const auto& b : grid.buses)
        if (b.kind != BusKind::PQ) vm2[b.id - 1] = b.v_setpoint;
    return newton_attempt(grid, y, sched, opts, vm2, va2);
}

ElectricMeterPlan ElectricMeterPlan::full(const PowerGridSpec& grid) {
    ElectricMeterPlan plan;
    for (const auto& b : grid.buses) plan.voltage_buses.push_back(b.id);
    for (int l = 0; l < grid.branch_count(); ++l) {
        plan.branch_meters.emplace_back(l, true);
        plan.branch_meters.emplace_back(l, false);
    }
    for (const auto& b : grid.buses) plan.injection_buses.push_back(b.id);
    return plan;
}

Matrix electric_measurement_matrix(const PowerGridSpec& grid, const Admittance& adm,
                                   const ElectricMeterPlan& plan) {
    const Index n = grid.bus_count();
    Matrix h = Matrix::Zero(plan.row_count(), 2 * n);
    Index row = 0;
    for (int bus : plan.voltage_buses) {
        h(row, 2 * (bus - 1)) = 1.0;
        h(row + 1, 2 * (bus - 1) + 1) = 1.0;
        row += 2;
    }
    // branch-end current I = (y_s + y_sh/2) V_end - y_s V_other, tap-adjusted
    for (const auto& [bidx, at_from] : plan.branch_meters) {
        const auto& br = grid.branches[static_cast<std::size_t>(bidx)];
        const Complex ys = 1.0 / Complex(br.r_pu, br.x_pu);
        const Complex ysh(0.0, br.b_shunt_pu / 2.0);
        const double t = br.tap;
        Complex y_own, y_other;
        Index own, other;
        if (at_from) {
            y_own = (ys + ysh) / (t * t);
            y_other = -ys / t;
            own = br.from - 1;
            other = br.to - 1;
        } else {
            y_own = ys + ysh;
            y_other = -ys / t;
            own = br.to - 1;
            other = br.from - 1;
        }
        // I_re = g e - b f ; I_im = b e + g f, per terminal contribution
        h(row, 2 * own) = y_own.real();
        h(row, 2 * own + 1) = -y_own.imag();
        h(row, 2 * other) = y_other.real();
        h(row, 2 * other + 1) = -y_other.imag();
        h(row + 1, 2 * own) = y_own.imag();
        h(row + 1, 2 * own + 1) = y_own.real();
        h(row + 1, 2 * other) = y_other.imag();
        h(row + 1, 2 * other + 1) = y_other.real();
        row += 2;
    }
    for (int bus : plan.injection_buses) {
        const Index i = bus - 1;
        for (Index j = 0; j < n; ++j) {
            if (adm.g(i, j) == 0.0 && adm.b(i, j) == 0.0) continue;
            h(row, 2 * j) = adm.g(i, j);
            h(row, 2 * j + 1) = -adm.b(i, j);
            h(row + 1, 2 * j) = adm.b(i, j);
            h(row + 1, 2 * j + 1) = adm.g(i, j);
        }
        row += 2;
    }
    return h;
}

}  // namespace iges::power
