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

#include <Eigen/LU>

#include "iges/model.hpp"
#include "iges/types.hpp"

namespace iges::gas {

/// Gas state: node densities (kg/m^3) followed by pipe-end mass flows (kg/s).
/// Flow slots per pipeline l: 2l = flow at the lower-numbered end, 2l+1 = flow
/// at the higher-numbered end, both signed positive in the low->high direction.
struct GasState {
    Vector densities;   // n_N
    Vector pipe_flows;  // 2 n_P

    Vector stacked() const;
    static GasState from_stacked(const GasNetworkSpec& net, const Vector& x);
};

/// Per-pipeline discretization coefficients.
double xi_coeff(const GasNetworkSpec& net, int pipe);     // dt / (L a)
double beta_coeff(const GasNetworkSpec& net, int pipe);   // a dt c^2 / L
double gamma_coeff(const GasNetworkSpec& net, int pipe);  // gamma |v| dt / (4 d a)

struct PdeBlocks {
    Matrix a11;  // n_P x n_N   continuity, density sum over endpoints
    Matrix a12;  // n_P x 2n_P  continuity, flow space difference
    Matrix a21;  // n_P x n_N   momentum, density difference
    Matrix a22;  // n_P x 2n_P  momentum, flow terms
};

struct BoundaryBlocks {
    Matrix b11;  // n_S  x n_N   source density selector
    Matrix b22;  // n_SI x 2n_P  sink net-outflow rows
    std::vector<int> source_nodes;  // row order of b11
    std::vector<int> sink_nodes;    // row order of b22
};

PdeBlocks assemble_pde_blocks(const GasNetworkSpec& net);
BoundaryBlocks assemble_boundary_blocks(const GasNetworkSpec& net);

/// The assembled one-step transition of the pipeline network.
struct GasTransition {
    Matrix f;          // state transition (n_N + 2n_P square)
    Matrix a_stacked;  // raw stacked left-hand matrix (PDE rows then boundary rows)
    Matrix b_stacked;  // raw stacked right-hand matrix
    PdeBlocks pde;
    BoundaryBlocks bounds;
    double rcond = 0.0;

    Index dim() const { return a_stacked.rows(); }
    /// Solves a_stacked * y = u (the control-input map applied to a boundary vector).
    Vector apply_a_inverse(const Vector& u) const;

  private:
    friend GasTransition build_transition(const GasNetworkSpec& net);
    Vector row_scale_;                  // equilibration used by the factorization
    Eigen::PartialPivLU<Matrix> lu_;    // factor of diag(row_scale_) * a_stacked
};

/// Throws SingularModel when the stacked system is numerically singular.
GasTransition build_transition(const GasNetworkSpec& net);

/// Boundary vector: zeros in the 2 n_P PDE rows, then the source densities
/// (kg/m^3, ascending node id) and sink outflows (kg/s, ascending node id).
Vector boundary_vector(const GasNetworkSpec& net, const Vector& source_densities,
                       const Vector& sink_outflows);

/// One transition step: f * x + A^{-1} u_vec.
GasState step_gas(const GasTransition& tr, const GasState& x, const Vector& u_vec);

/// Fixed point of step_gas for constant boundary values.
GasState solve_steady(const GasNetworkSpec& net, const Vector& source_densities,
                      const Vector& sink_outflows);

/// Measurement matrix: node pressures (Pa, c^2 * density) stacked over node
/// net mass-flow rows (signed sum of incident pipe-end flows).
Matrix gas_measurement_matrix(const GasNetworkSpec& net);

}  // namespace iges::gas
