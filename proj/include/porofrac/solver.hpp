#pragma once

#include <string>
#include <vector>

#include "porofrac/assembly.hpp"
#include "porofrac/fields.hpp"

namespace porofrac {

struct SolverSettings {
    int max_newton_iters = 150;
    double rel_tol = 1e-6;
    double abs_tol = 1e-8;
    int staggered_sweeps = 1; ///< field sweeps per time step
    double dt = 0.05;         ///< time step (s)
    double t_end = 1.0;       ///< simulated duration (s)

    void validate() const;
    bool operator==(const SolverSettings&) const = default;
};

/// Direct sparse solve of an assembled (possibly reduced) system. Returns a
/// vector of the system's size; an empty system yields an empty vector.
/// Throws SingularSystemError when the factorization fails or the solution is
/// inaccurate beyond 1e-10 relative.
Eigen::VectorXd linear_solve(const SparseSystem& system);

struct NewtonReport {
    int iterations = 0;
    double residual0 = 0.0;
    double residual = 0.0;
    std::vector<double> history; ///< residual norms per iteration, starting at entry
};

struct StepLog {
    double time = 0.0;
    NewtonReport u, phi, p;
};

struct ProbeSpec {
    std::string name;
    std::string field = "pressure"; ///< pressure | phi | ux | uy | uz
    std::array<double, 3> position{0.0, 0.0, 0.0};
    bool operator==(const ProbeSpec&) const = default;
};

struct ProbeSeries {
    std::string name;
    std::string field;
    Vec position = Vec::Zero();
    std::vector<double> times;
    std::vector<double> values;
};

struct SimulationResult {
    std::vector<double> snapshot_times;
    std::vector<FieldState> snapshots;
    std::vector<ProbeSeries> probes;
    std::vector<StepLog> log;
    bool failed = false;
    std::string failure;
    double phi_min = 0.0, phi_max = 0.0; ///< extremes over the whole run
    bool history_monotone = true;        ///< history never decreased between steps
};

/// Staggered displacement / phase-field / pressure driver on one mesh.
class Simulator {
public:
    /// Everything the three field solves need besides the state. The
    /// pre-existing stress enters with tension positive; pass a zero field to
    /// reproduce the formulation without it (tractions are kept separately).
    struct Problem {
        MaterialParams material;
        InitialStressField sigma0;
        std::vector<BoundaryLoad> tractions;
        std::vector<DirichletBC> displacement_bcs;
        PressureBCs pressure_bcs;
        Eigen::VectorXd source;       ///< per-element fluid source (kg/(m^3 s))
        Eigen::VectorXd seed_history; ///< per-element initial history (J/m^3)
    };

    Simulator(const Mesh& mesh, Problem problem, SolverSettings settings);

    NewtonReport solve_displacement(FieldState& state) const;
    NewtonReport solve_phase(FieldState& state) const;
    NewtonReport solve_pressure(FieldState& state, double dt) const;

    /// Crack driving energy at every quadrature point from the current
    /// displacement, folded into the running maximum.
    void refresh_history(FieldState& state) const;

    /// One staggered time step (u then phi then p, repeated per sweep), then
    /// commits the state and advances time.
    StepLog step(FieldState& state) const;

    /// Seeded state at t = 0: phase field from the seed history, then an
    /// equilibrium displacement solve at zero pressure.
    FieldState initial_state() const;

    SimulationResult run(const std::vector<double>& output_times,
                         const std::vector<ProbeSpec>& probes) const;

    const Mesh& mesh() const { return mesh_; }
    const Problem& problem() const { return problem_; }
    const SolverSettings& settings() const { return settings_; }

private:
    const Mesh& mesh_;
    Problem problem_;
    SolverSettings settings_;
};

/// Value of one probe field at a node.
double probe_nodal_value(const Mesh& mesh, const FieldState& state, const std::string& field,
                         int node);

} // namespace porofrac
