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
#include "iges/estimator.hpp"

#include <chrono>
#include <string>

#include <Eigen/SVD>

namespace iges {

NoiseCov default_noise_cov(const JointModel& jm, const ScenarioConfig& cfg) {
    NoiseCov cov;
    const Index ne = jm.layout.electric_dim();
    const Index n = jm.layout.dim();
    cov.q_diag = Vector::Zero(n);
    cov.q_diag.head(ne).setConstant(cfg.process_noise_electric);

    // gas prediction error enters through the predicted sink offtakes; spread
    // the per-sink variance over the states with the boundary solve
    const Index np = jm.layout.n_pipe;
    const Index ns = jm.source_densities.size();
    Vector gas_q = Vector::Constant(jm.gas_tr.dim(), 1e-10);
    for (std::size_t k = 0; k < jm.sink_nodes.size(); ++k) {
        Vector unit = Vector::Zero(jm.gas_tr.dim());
        unit[2 * np + ns + static_cast<Index>(k)] = 1.0;
        gas_q += cfg.process_noise_gas * jm.gas_tr.apply_a_inverse(unit).cwiseAbs2();
    }
    cov.q_diag.tail(jm.gas_tr.dim()) = gas_q;

    double sigma = 0.02;
    for (const auto& ns : cfg.noise)
        if (ns.kind == NoiseKind::Gaussian || ns.kind == NoiseKind::BiasedGaussian) {
            sigma = ns.sigma;
            break;
        }
    cov.r_diag.resize(jm.mlayout.dim());
    for (Index c = 0; c < jm.mlayout.dim(); ++c) {
        const double s = sigma * jm.mlayout.channels[static_cast<std::size_t>(c)].scale;
        cov.r_diag[c] = s * s;
    }
    return cov;
}

Vector sink_load_channels(const JointModel& jm, const Vector& z) {
    Vector loads(static_cast<Index>(jm.load_sink_slots.size()));
    for (std::size_t k = 0; k < jm.load_sink_slots.size(); ++k) {
        const int node = jm.sink_nodes[static_cast<std::size_t>(jm.load_sink_slots[k])];
        loads[static_cast<Index>(k)] = z[jm.mlayout.netflow_offset + node - 1];
    }
    return loads;
}

Vector filtered_sink_loads(const JointModel& jm, const Vector& x) {
    const Vector flows = x.segment(jm.layout.flow_offset(), 2 * jm.layout.n_pipe);
    Vector loads(static_cast<Index>(jm.load_sink_slots.size()));
    for (std::size_t k = 0; k < jm.load_sink_slots.size(); ++k)
        loads[static_cast<Index>(k)] =
            jm.gas_tr.bounds.b22.row(jm.load_sink_slots[k]).dot(flows);
    return loads;
}

KalmanState initial_state(const JointModel& jm, const Vector& z, double p0_diag) {
    if (z.size() != jm.mlayout.dim())
        throw NumericFailure("initial_state: measurement dimension mismatch");
    KalmanState kf;
    kf.x = Eigen::BDCSVD<Matrix>(jm.h, Eigen::ComputeThinU | Eigen::ComputeThinV).solve(z);

    // the net-flow rows do not pin the pipe-end flows; complete them with the
    // steady state implied by the measured offtakes
    Vector offtakes(static_cast<Index>(jm.sink_nodes.size()));
    for (std::size_t k = 0; k < jm.sink_nodes.size(); ++k)
        offtakes[static_cast<Index>(k)] =
            z[jm.mlayout.netflow_offset + jm.sink_nodes[k] - 1];
    const Index np = jm.layout.n_pipe;
    const Index ns = jm.source_densities.size();
    const Matrix steady = jm.gas_tr.a_stacked - jm.gas_tr.b_stacked;
    Vector scale = Vector::Ones(steady.rows());
    for (Index r = 0; r < steady.rows(); ++r) {
        const double m = steady.row(r).cwiseAbs().maxCoeff();
        if (m > 0.0) scale[r] = 1.0 / m;
    }
    Vector bound = Vector::Zero(jm.gas_tr.dim());
    bound.segment(2 * np, ns) = jm.source_densities;
    bound.segment(2 * np + ns, offtakes.size()) = offtakes;
    const Vector xg =
        (scale.asDiagonal() * steady).partialPivLu().solve(scale.asDiagonal() * bound);
    kf.x.segment(jm.layout.flow_offset(), 2 * np) = xg.tail(2 * np);

    kf.p = p0_diag * Matrix::Identity(jm.layout.dim(), jm.layout.dim());
    return kf;
}

DseResult run_dse(const JointModel& jm, const Matrix& measurements, const NoiseCov& cov,
                  const KalmanState& init, const DseOptions& opts) {
    const Index steps = measurements.rows();
    const Index n = jm.layout.dim();
    DseResult res;
    res.estimates.resize(steps, n);
    if (steps == 0) return res;
    if (measurements.cols() != jm.mlayout.dim())
        throw NumericFailure("run_dse: measurement column count mismatch");

    const double p0 = init.p.diagonal().maxCoeff();
    const Index warm = std::min<Index>(steps, std::max(2, opts.warmup));

    res.estimates.row(0) = init.x.transpose();
    if (opts.observer) opts.observer(0, init);
    for (Index t = 1; t < warm; ++t) {
        const KalmanState st = initial_state(jm, measurements.row(t).transpose(), p0);
        res.estimates.row(t) = st.x.transpose();
        if (opts.observer) opts.observer(static_cast<int>(t), st);
    }
    if (steps <= warm) return res;

    const Matrix* sched = opts.scheduled_loads;
    if (sched && (sched->rows() != steps ||
                  sched->cols() != static_cast<Index>(jm.load_sink_slots.size())))
        throw NumericFailure("run_dse: scheduled_loads shape mismatch");

    UBuilder builder(jm);
    builder.seed(jm.electric_part(res.estimates.row(warm - 2).transpose()),
                 jm.electric_part(res.estimates.row(warm - 1).transpose()),
                 sched ? Vector(sched->row(warm - 2).transpose())
                       : sink_load_channels(jm, measurements.row(warm - 2).transpose()),
                 sched ? Vector(sched->row(warm - 1).transpose())
                       : sink_load_channels(jm, measurements.row(warm - 1).transpose()));

    KalmanState kf{res.estimates.row(warm - 1).transpose(), init.p};
    double elapsed = 0.0;
    for (Index t = warm; t < steps; ++t) {
        try {
            const UBuilder::Input in = builder.next_input();
            const auto tic = std::chrono::steady_clock::now();
            kf = kf_predict(kf, jm.f, in.u, cov.q_diag);
            kf = kf_update(kf, measurements.row(t).transpose(), jm.h, cov.r_diag);
            elapsed += std::chrono::duration<double>(std::chrono::steady_clock::now() - tic)
                           .count();
        } catch (const NumericFailure& e) {
            throw NumericFailure("step " + std::to_string(t) + ": " + e.what());
        }
        res.estimates.row(t) = kf.x.transpose();
        if (opts.observer) opts.observer(static_cast<int>(t), kf);
        builder.observe(jm.electric_part(kf.x),
                        sched ? Vector(sched->row(t).transpose())
                              : filtered_sink_loads(jm, kf.x));
    }
    res.mean_step_seconds = elapsed / static_cast<double>(steps - warm);
    return res;
}

}  // namespace iges
