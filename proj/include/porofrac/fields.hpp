#pragma once

#include <Eigen/Dense>

#include "porofrac/mesh.hpp"

namespace porofrac {

/// Nodal unknowns of the three fields plus the per-element history of the
/// crack driving energy. u_prev/p_prev hold the last accepted time step for
/// the backward-Euler rate terms.
struct FieldState {
    double time = 0.0;
    Eigen::VectorXd u;       ///< displacements, dim components per node (m)
    Eigen::VectorXd phi;     ///< phase field
    Eigen::VectorXd p;       ///< fluid pressure (Pa)
    Eigen::VectorXd history; ///< crack driving energy maximum per element (J/m^3)
    Eigen::VectorXd u_prev;
    Eigen::VectorXd p_prev;

    static FieldState zero(const Mesh& mesh) {
        FieldState s;
        s.u = Eigen::VectorXd::Zero(static_cast<long>(mesh.num_nodes()) * mesh.dim());
        s.phi = Eigen::VectorXd::Zero(mesh.num_nodes());
        s.p = Eigen::VectorXd::Zero(mesh.num_nodes());
        s.history = Eigen::VectorXd::Zero(mesh.num_elements());
        s.u_prev = s.u;
        s.p_prev = s.p;
        return s;
    }

    void commit() {
        u_prev = u;
        p_prev = p;
    }
};

} // namespace porofrac
