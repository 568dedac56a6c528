#include "porofrac/solver.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>

namespace porofrac {

void SolverSettings::validate() const {
    if (max_newton_iters < 1)
        throw InvalidArgumentError("solver: max_newton_iters must be at least 1");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw InvalidArgumentError("solver: tolerances must be positive");
    if (staggered_sweeps < 1)
        throw InvalidArgumentError("solver: staggered_sweeps must be at least 1");
    if (!(dt > 0.0))
        throw InvalidArgumentError("solver: dt must be positive");
    if (t_end < 0.0)
        throw InvalidArgumentError("solver: t_end must be non-negative");
}

Eigen::VectorXd linear_solve(const SparseSystem& system) {
    if (system.matrix.rows() == 0) return Eigen::VectorXd();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    ldlt.compute(system.matrix);
    if (ldlt.info() != Eigen::Success)
        throw SingularSystemError("sparse factorization failed");
    Eigen::VectorXd x = ldlt.solve(system.residual);
    const double rhs_norm = system.residual.norm();
    if (rhs_norm > 0.0) {
        // one step of iterative refinement keeps stiff coefficient contrasts
        // (fractured vs intact permeability) within the accuracy target
        Eigen::VectorXd defect = system.residual - system.matrix * x;
        if (defect.norm() > 1e-12 * rhs_norm) x += ldlt.solve(defect);
        defect = system.residual - system.matrix * x;
        if (!(defect.norm() <= 1e-10 * rhs_norm))
            throw SingularSystemError("linear solve residual " +
                                      std::to_string(defect.norm() / rhs_norm) +
                                      " exceeds 1e-10 relative");
    }
    return x;
}

Simulator::Simulator(const Mesh& mesh, Problem problem, SolverSettings settings)
    : mesh_(mesh), problem_(std::move(problem)), settings_(settings) {
    settings_.validate();
    problem_.material.validate();
    if (problem_.source.size() != mesh.num_elements())
        throw InvalidArgumentError("source vector size does not match element count");
    if (problem_.seed_history.size() != mesh.num_elements())
        throw InvalidArgumentError("seed history size does not match element count");
}

namespace {

// Newton loop shared by the three fields; phi and p assemble linear systems
// and finish after one update.
template <typename AssembleFn>
NewtonReport newton_solve(const char* field, Eigen::VectorXd& values, const AssembleFn& assemble,
                          const std::vector<DirichletBC>& constraints,
                          const SolverSettings& settings, double time) {
    NewtonReport report;
    SparseSystem sys = assemble();
    apply_dirichlet(sys, constraints, values);
    report.residual0 = sys.residual.norm();
    report.history.push_back(report.residual0);
    const double tol = std::max(settings.abs_tol, settings.rel_tol * report.residual0);
    double res = report.residual0;
    // a pending constraint update forces at least one iteration
    bool constraints_pending = sys.constrained_delta.size() > 0 &&
                               sys.constrained_delta.cwiseAbs().maxCoeff() > 0.0;
    while (res > tol || constraints_pending) {
        if (report.iterations >= settings.max_newton_iters)
            throw ConvergenceFailure(field, time, report.iterations, res);
        values += sys.expand(linear_solve(sys));
        ++report.iterations;
        sys = assemble();
        apply_dirichlet(sys, constraints, values);
        res = sys.residual.norm();
        report.history.push_back(res);
        constraints_pending = false;
    }
    report.residual = res;
    return report;
}

} // namespace

NewtonReport Simulator::solve_displacement(FieldState& state) const {
    return newton_solve(
        "displacement", state.u,
        [&] {
            return assemble_displacement(mesh_, state, problem_.material, problem_.sigma0,
                                         problem_.tractions);
        },
        problem_.displacement_bcs, settings_, state.time);
}

NewtonReport Simulator::solve_phase(FieldState& state) const {
    return newton_solve(
        "phase", state.phi, [&] { return assemble_phase(mesh_, state, problem_.material); }, {},
        settings_, state.time);
}

NewtonReport Simulator::solve_pressure(FieldState& state, double dt) const {
    const std::vector<DirichletBC> constraints = pressure_constraints(mesh_, problem_.pressure_bcs);
    return newton_solve(
        "pressure", state.p,
        [&] {
            return assemble_pressure(mesh_, state, problem_.material, dt, problem_.source,
                                     problem_.pressure_bcs);
        },
        constraints, settings_, state.time);
}

void Simulator::refresh_history(FieldState& state) const {
    const int dim = mesh_.dim();
    const int nn = dim + 1;
    for (int e = 0; e < mesh_.num_elements(); ++e) {
        const int* conn = mesh_.element(e);
        const ElementBasis basis = element_basis(mesh_, e);
        double drive = 0.0;
        if (dim == 2) {
            Tensor<2> grad_u = Tensor<2>::Zero();
            for (int i = 0; i < nn; ++i)
                for (int r = 0; r < 2; ++r)
                    for (int c = 0; c < 2; ++c)
                        grad_u(r, c) += state.u[2 * conn[i] + r] * basis.grad(i, c);
            const auto strain = spectral_split<2>(small_strain(grad_u));
            const Tensor<2> sig0 = problem_.sigma0(basis.point).topLeftCorner<2, 2>();
            drive = crack_drive(strain, sig0, problem_.material.lambda, problem_.material.mu);
        } else {
            Tensor<3> grad_u = Tensor<3>::Zero();
            for (int i = 0; i < nn; ++i)
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c)
                        grad_u(r, c) += state.u[3 * conn[i] + r] * basis.grad(i, c);
            const auto strain = spectral_split<3>(small_strain(grad_u));
            const Tensor<3> sig0 = problem_.sigma0(basis.point).topLeftCorner<3, 3>();
            drive = crack_drive(strain, sig0, problem_.material.lambda, problem_.material.mu);
        }
        state.history[e] = update_history(state.history[e], drive);
    }
}

StepLog Simulator::step(FieldState& state) const {
    StepLog log;
    for (int sweep = 0; sweep < settings_.staggered_sweeps; ++sweep) {
        log.u = solve_displacement(state);
        refresh_history(state);
        log.phi = solve_phase(state);
        log.p = solve_pressure(state, settings_.dt);
    }
    state.time += settings_.dt;
    state.commit();
    log.time = state.time;
    return log;
}

FieldState Simulator::initial_state() const {
    FieldState state = FieldState::zero(mesh_);
    state.history = problem_.seed_history;
    solve_phase(state);
    solve_displacement(state);
    refresh_history(state);
    state.commit();
    return state;
}

double probe_nodal_value(const Mesh& mesh, const FieldState& state, const std::string& field,
                         int node) {
    if (field == "pressure" || field == "p") return state.p[node];
    if (field == "phi") return state.phi[node];
    if (field == "ux") return state.u[mesh.dim() * node];
    if (field == "uy") return state.u[mesh.dim() * node + 1];
    if (field == "uz") {
        if (mesh.dim() < 3) throw InvalidArgumentError("uz probe requires a 3D mesh");
        return state.u[3 * node + 2];
    }
    throw InvalidArgumentError("unknown probe field '" + field + "'");
}

namespace {

double interpolate_probe(const Mesh& mesh, const FieldState& state, const std::string& field,
                         int element, const Vec& point) {
    // linear interpolation via the nodal values of the containing element
    const int* conn = mesh.element(element);
    const int nn = mesh.dim() + 1;
    Eigen::VectorXd bary(nn);
    const Vec a = mesh.node(conn[0]);
    if (mesh.dim() == 2) {
        const Vec b = mesh.node(conn[1]), c = mesh.node(conn[2]);
        const double det = 2.0 * mesh.element_measure(element);
        const double l1 =
            ((c.y() - a.y()) * (point.x() - a.x()) - (c.x() - a.x()) * (point.y() - a.y())) / det;
        const double l2 =
            (-(b.y() - a.y()) * (point.x() - a.x()) + (b.x() - a.x()) * (point.y() - a.y())) / det;
        bary << 1.0 - l1 - l2, l1, l2;
    } else {
        Eigen::Matrix3d m;
        m.col(0) = mesh.node(conn[1]) - a;
        m.col(1) = mesh.node(conn[2]) - a;
        m.col(2) = mesh.node(conn[3]) - a;
        const Eigen::Vector3d lam = m.partialPivLu().solve(point - a);
        bary << 1.0 - lam.sum(), lam[0], lam[1], lam[2];
    }
    double value = 0.0;
    for (int i = 0; i < nn; ++i) value += bary[i] * probe_nodal_value(mesh, state, field, conn[i]);
    return value;
}

} // namespace

SimulationResult Simulator::run(const std::vector<double>& output_times,
                                const std::vector<ProbeSpec>& probes) const {
    SimulationResult result;
    std::vector<int> probe_elements;
    for (const ProbeSpec& spec : probes) {
        const Vec pos(spec.position[0], spec.position[1], spec.position[2]);
        const int e = mesh_.locate(pos);
        if (e < 0)
            throw ConfigurationError("probe '" + spec.name + "' lies outside the mesh");
        probe_elements.push_back(e);
        ProbeSeries series;
        series.name = spec.name;
        series.field = spec.field;
        series.position = pos;
        result.probes.push_back(std::move(series));
    }

    FieldState state = initial_state();
    result.phi_min = state.phi.size() ? state.phi.minCoeff() : 0.0;
    result.phi_max = state.phi.size() ? state.phi.maxCoeff() : 0.0;

    auto sample = [&](const FieldState& s) {
        for (size_t i = 0; i < probes.size(); ++i) {
            const Vec pos(probes[i].position[0], probes[i].position[1], probes[i].position[2]);
            result.probes[i].times.push_back(s.time);
            result.probes[i].values.push_back(
                interpolate_probe(mesh_, s, probes[i].field, probe_elements[i], pos));
        }
    };
    size_t next_output = 0;
    auto snapshot = [&](const FieldState& s) {
        while (next_output < output_times.size() &&
               output_times[next_output] <= s.time + 0.5 * settings_.dt) {
            result.snapshot_times.push_back(s.time);
            result.snapshots.push_back(s);
            ++next_output;
        }
    };

    sample(state);
    snapshot(state);

    const long nsteps = std::lround(settings_.t_end / settings_.dt);
    Eigen::VectorXd prev_history = state.history;
    for (long k = 1; k <= nsteps; ++k) {
        try {
            result.log.push_back(step(state));
        } catch (const ConvergenceFailure& failure) {
            result.failed = true;
            result.failure = failure.what();
            break;
        }
        state.time = static_cast<double>(k) * settings_.dt; // avoid accumulation drift
        result.phi_min = std::min(result.phi_min, state.phi.minCoeff());
        result.phi_max = std::max(result.phi_max, state.phi.maxCoeff());
        if (((state.history - prev_history).array() < 0.0).any()) result.history_monotone = false;
        prev_history = state.history;
        sample(state);
        snapshot(state);
    }
    return result;
}

} // namespace porofrac
