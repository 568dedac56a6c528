#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "porofrac/constitutive.hpp"
#include "porofrac/fields.hpp"
#include "porofrac/mesh.hpp"

namespace porofrac {

/// One prescribed degree of freedom (target value, not an increment).
struct DirichletBC {
    int dof = -1;
    double value = 0.0;
};

/// Residual and symmetric tangent of one field. `residual` follows the Newton
/// convention R = F_ext - F_int, so the update solves K * delta = R.
/// apply_dirichlet reduces the system to the unconstrained dofs in place.
struct SparseSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd residual;

    bool eliminated = false;
    int full_size = 0;
    std::vector<int> reduced_index;    ///< full dof -> reduced dof, -1 when constrained
    Eigen::VectorXd constrained_delta; ///< full-size; update of constrained dofs

    /// Scatter a reduced solution back to full size, filling constrained dofs
    /// with their prescribed updates.
    Eigen::VectorXd expand(const Eigen::VectorXd& reduced) const;
};

/// Traction on one boundary tag, given in the frame of the total stress
/// (tension positive); a compressive confinement pushes inward. The callback
/// receives the boundary point and the unit outward normal.
struct BoundaryLoad {
    std::string tag;
    std::function<Vec(const Vec&, const Vec&)> traction; ///< N/m^2
};

struct PressureBCs {
    std::vector<std::pair<std::string, double>> dirichlet; ///< tag -> prescribed pressure (Pa)
    std::vector<std::pair<std::string, double>> flux;      ///< tag -> inward mass flux (kg/(m^2 s))
};

/// Momentum balance: residual from the total stress (effective + degraded
/// pre-existing stress - pore pressure) against the boundary tractions;
/// tangent from the spectral stress tangent at the current iterate.
SparseSystem assemble_displacement(const Mesh& mesh, const FieldState& state,
                                   const MaterialParams& mat, const InitialStressField& sigma0,
                                   const std::vector<BoundaryLoad>& tractions);

/// Screened-Poisson phase-field equation driven by the history field; linear
/// in phi.
SparseSystem assemble_phase(const Mesh& mesh, const FieldState& state, const MaterialParams& mat);

/// Backward-Euler pressure equation with phase-field-blended coefficients,
/// per-element sources (kg/(m^3 s)), and the volumetric-strain-rate coupling.
SparseSystem assemble_pressure(const Mesh& mesh, const FieldState& state, const MaterialParams& mat,
                               double dt, const Eigen::VectorXd& source,
                               const PressureBCs& pressure_bcs);

/// Symmetric elimination of prescribed dofs: removes their rows/columns and
/// moves the known updates (value - current) to the right-hand side.
/// Conflicting duplicate constraints raise ConfigurationError.
void apply_dirichlet(SparseSystem& system, const std::vector<DirichletBC>& constraints,
                     const Eigen::VectorXd& current);

/// Dirichlet pressure constraints of a boundary-condition set.
std::vector<DirichletBC> pressure_constraints(const Mesh& mesh, const PressureBCs& bcs);

/// Worker count for the parallel element loops (POROFRAC_THREADS, default 1).
int assembly_threads();

} // namespace porofrac
