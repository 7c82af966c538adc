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
#include "iges/gas_dynamics.hpp"

#include <string>

namespace iges::gas {

Vector GasState::stacked() const {
    Vector x(densities.size() + pipe_flows.size());
    x << densities, pipe_flows;
    return x;
}

GasState GasState::from_stacked(const GasNetworkSpec& net, const Vector& x) {
    const Index n = net.node_count();
    const Index m = 2 * net.pipe_count();
    GasState s;
    s.densities = x.head(n);
    s.pipe_flows = x.segment(n, m);
    return s;
}

double xi_coeff(const GasNetworkSpec& net, int pipe) {
    const auto& p = net.pipelines[static_cast<std::size_t>(pipe)];
    return net.dt_s / (p.length_m * p.cross_section_m2());
}

double beta_coeff(const GasNetworkSpec& net, int pipe) {
    const auto& p = net.pipelines[static_cast<std::size_t>(pipe)];
    const double c = net.sound_speed_mps;
    return p.cross_section_m2() * net.dt_s * c * c / p.length_m;
}

double gamma_coeff(const GasNetworkSpec& net, int pipe) {
    const auto& p = net.pipelines[static_cast<std::size_t>(pipe)];
    return net.friction * p.avg_velocity_mps * net.dt_s /
           (4.0 * p.diameter_m * p.cross_section_m2());
}

PdeBlocks assemble_pde_blocks(const GasNetworkSpec& net) {
    const Index nn = net.node_count();
    const Index np = net.pipe_count();
    PdeBlocks blk;
    blk.a11 = Matrix::Zero(np, nn);
    blk.a12 = Matrix::Zero(np, 2 * np);
    blk.a21 = Matrix::Zero(np, nn);
    blk.a22 = Matrix::Zero(np, 2 * np);
    for (Index l = 0; l < np; ++l) {
        const auto& p = net.pipelines[static_cast<std::size_t>(l)];
        const Index lo = p.from - 1;
        const Index hi = p.to - 1;
        const double xi = xi_coeff(net, static_cast<int>(l));
        const double beta = beta_coeff(net, static_cast<int>(l));
        const double gl = gamma_coeff(net, static_cast<int>(l));
        blk.a11(l, lo) = 1.0;
        blk.a11(l, hi) = 1.0;
        blk.a12(l, 2 * l) = -xi;
        blk.a12(l, 2 * l + 1) = xi;
        blk.a21(l, lo) = -beta;
        blk.a21(l, hi) = beta;
        blk.a22(l, 2 * l) = gl - 1.0;
        blk.a22(l, 2 * l + 1) = gl + 1.0;
    }
    return blk;
}

BoundaryBlocks assemble_boundary_blocks(const GasNetworkSpec& net) {
    const Index nn = net.node_count();
    const Index np = net.pipe_count();
    BoundaryBlocks blk;
    blk.source_nodes = net.source_nodes();
    blk.sink_nodes = net.sink_nodes();
    blk.b11 = Matrix::Zero(static_cast<Index>(blk.source_nodes.size()), nn);
    blk.b22 = Matrix::Zero(static_cast<Index>(blk.sink_nodes.size()), 2 * np);
    for (Index r = 0; r < blk.b11.rows(); ++r)
        blk.b11(r, blk.source_nodes[static_cast<std::size_t>(r)] - 1) = 1.0;
    for (Index r = 0; r < blk.b22.rows(); ++r) {
        const int node = blk.sink_nodes[static_cast<std::size_t>(r)];
        for (Index l = 0; l < np; ++l) {
            const auto& p = net.pipelines[static_cast<std::size_t>(l)];
            if (p.to == node) blk.b22(r, 2 * l + 1) += 1.0;   // arriving from a lower node
            if (p.from == node) blk.b22(r, 2 * l) += -1.0;    // leaving toward a higher node
        }
    }
    return blk;
}

Vector GasTransition::apply_a_inverse(const Vector& u) const {
    return lu_.solve(row_scale_.asDiagonal() * u);
}

GasTransition build_transition(const GasNetworkSpec& net) {
    const Index nn = net.node_count();
    const Index np = net.pipe_count();
    const Index dim = nn + 2 * np;

    GasTransition tr;
    tr.pde = assemble_pde_blocks(net);
    tr.bounds = assemble_boundary_blocks(net);
    const Index ns = tr.bounds.b11.rows();
    const Index nsi = tr.bounds.b22.rows();

    tr.a_stacked = Matrix::Zero(dim, dim);
    tr.a_stacked.block(0, 0, np, nn) = tr.pde.a11;
    tr.a_stacked.block(0, nn, np, 2 * np) = tr.pde.a12;
    tr.a_stacked.block(np, 0, np, nn) = tr.pde.a21;
    tr.a_stacked.block(np, nn, np, 2 * np) = tr.pde.a22;
    tr.a_stacked.block(2 * np, 0, ns, nn) = tr.bounds.b11;
    tr.a_stacked.block(2 * np + ns, nn, nsi, 2 * np) = tr.bounds.b22;

    tr.b_stacked = Matrix::Zero(dim, dim);
    tr.b_stacked.block(0, 0, np, nn) = tr.pde.a11;
    tr.b_stacked.block(0, nn, np, 2 * np) = -tr.pde.a12;
    tr.b_stacked.block(np, 0, np, nn) = -tr.pde.a21;
    tr.b_stacked.block(np, nn, np, 2 * np) = -tr.pde.a22;

    // row equilibration; solutions are unchanged, the factorization conditions better
    tr.row_scale_ = Vector::Ones(dim);
    for (Index r = 0; r < dim; ++r) {
        const double m = tr.a_stacked.row(r).cwiseAbs().maxCoeff();
        if (m > 0.0) tr.row_scale_[r] = 1.0 / m;
    }
    const Matrix scaled = tr.row_scale_.asDiagonal() * tr.a_stacked;
    tr.lu_.compute(scaled);
    tr.rcond = tr.lu_.rcond();
    if (!(tr.rcond >= 1e-12))
        throw SingularModel("gas transition matrix is numerically singular (rcond " +
                            std::to_string(tr.rcond) + ")");
    tr.f = tr.lu_.solve(tr.row_scale_.asDiagonal() * tr.b_stacked);
    return tr;
}

Vector boundary_vector(const GasNetworkSpec& net, const Vector& source_densities,
                       const Vector& sink_outflows) {
    const Index np = net.pipe_count();
    const auto sources = net.source_nodes();
    const auto sinks = net.sink_nodes();
    if (source_densities.size() != static_cast<Index>(sources.size()))
        throw NumericFailure("boundary_vector: expected " + std::to_string(sources.size()) +
                             " source densities, got " + std::to_string(source_densities.size()));
    if (sink_outflows.size() != static_cast<Index>(sinks.size()))
        throw NumericFailure("boundary_vector: expected " + std::to_string(sinks.size()) +
                             " sink outflows, got " + std::to_string(sink_outflows.size()));
    Vector u = Vector::Zero(net.state_dim());
    u.segment(2 * np, source_densities.size()) = source_densities;
    u.segment(2 * np + source_densities.size(), sink_outflows.size()) = sink_outflows;
    return u;
}

GasState step_gas(const GasTransition& tr, const GasState& x, const Vector& u_vec) {
    Vector next = tr.f * x.stacked() + tr.apply_a_inverse(u_vec);
    GasState s;
    const Index nn = x.densities.size();
    s.densities = next.head(nn);
    s.pipe_flows = next.tail(next.size() - nn);
    return s;
}

GasState solve_steady(const GasNetworkSpec& net, const Vector& source_densities,
                      const Vector& sink_outflows) {
    GasTransition tr = build_transition(net);
    const Matrix steady = tr.a_stacked - tr.b_stacked;
    Vector scale = Vector::Ones(steady.rows());
    for (Index r = 0; r < steady.rows(); ++r) {
        const double m = steady.row(r).cwiseAbs().maxCoeff();
        if (m > 0.0) scale[r] = 1.0 / m;
    }
    Eigen::PartialPivLU<Matrix> lu(scale.asDiagonal() * steady);
    if (!(lu.rcond() >= 1e-12))
        throw SingularModel("steady gas system is numerically singular (rcond " +
                            std::to_string(lu.rcond()) + ")");
    const Vector u = boundary_vector(net, source_densities, sink_outflows);
    const Vector x = lu.solve(scale.asDiagonal() * u);
    return GasState::from_stacked(net, x);
}

Matrix gas_measurement_matrix(const GasNetworkSpec& net) {
    const Index nn = net.node_count();
    const Index np = net.pipe_count();
    const double c2 = net.sound_speed_mps * net.sound_speed_mps;
    Matrix h = Matrix::Zero(2 * nn, nn + 2 * np);
    h.topLeftCorner(nn, nn) = c2 * Matrix::Identity(nn, nn);
    for (Index l = 0; l < np; ++l) {
        const auto& p = net.pipelines[static_cast<std::size_t>(l)];
        h(nn + p.to - 1, nn + 2 * l + 1) += 1.0;
        h(nn + p.from - 1, nn + 2 * l) += -1.0;
    }
    return h;
}

}  // namespace iges::gas
