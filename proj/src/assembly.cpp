#include "porofrac/assembly.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "porofrac/poroflow.hpp"

namespace porofrac {

namespace {

using Triplet = Eigen::Triplet<double>;

struct BlockOutput {
    std::vector<Triplet> triplets;
    Eigen::VectorXd residual;
};

// Runs fn(block, begin, end) over a fixed block partition of [0, n). The
// partition does not depend on the worker count, so the assembled triplet
// order (and with it the floating-point accumulation order) is reproducible.
template <typename Fn>
std::vector<BlockOutput> run_blocks(int n, int ndof, Fn&& fn) {
    const int nblocks = std::min(64, std::max(1, n));
    std::vector<BlockOutput> out(nblocks);
    for (auto& b : out) b.residual = Eigen::VectorXd::Zero(ndof);
    auto work = [&](int block) {
        const long lo = static_cast<long>(block) * n / nblocks;
        const long hi = static_cast<long>(block + 1) * n / nblocks;
        fn(out[block], static_cast<int>(lo), static_cast<int>(hi));
    };
    const int nthreads = std::min(assembly_threads(), nblocks);
    if (nthreads <= 1) {
        for (int b = 0; b < nblocks; ++b) work(b);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < nblocks; b = next.fetch_add(1)) work(b);
            });
        for (auto& t : pool) t.join();
    }
    return out;
}

SparseSystem combine(std::vector<BlockOutput> blocks, Eigen::VectorXd residual, int ndof) {
    size_t total = 0;
    for (const auto& b : blocks) total += b.triplets.size();
    std::vector<Triplet> all;
    all.reserve(total);
    for (const auto& b : blocks) {
        all.insert(all.end(), b.triplets.begin(), b.triplets.end());
        residual += b.residual;
    }
    SparseSystem sys;
    sys.matrix.resize(ndof, ndof);
    sys.matrix.setFromTriplets(all.begin(), all.end());
    sys.residual = std::move(residual);
    sys.full_size = ndof;
    return sys;
}

// Strain-displacement matrix in Voigt form (engineering shear).
template <int D>
Eigen::Matrix<double, voigt_size<D>(), D*(D + 1)> strain_matrix(const ElementBasis& basis) {
    Eigen::Matrix<double, voigt_size<D>(), D*(D + 1)> b;
    b.setZero();
    for (int i = 0; i <= D; ++i) {
        const auto g = basis.grad.row(i);
        if constexpr (D == 2) {
            b(0, 2 * i) = g[0];
            b(1, 2 * i + 1) = g[1];
            b(2, 2 * i) = g[1];
            b(2, 2 * i + 1) = g[0];
        } else {
            b(0, 3 * i) = g[0];
            b(1, 3 * i + 1) = g[1];
            b(2, 3 * i + 2) = g[2];
            b(3, 3 * i) = g[1];
            b(3, 3 * i + 1) = g[0];
            b(4, 3 * i + 1) = g[2];
            b(4, 3 * i + 2) = g[1];
            b(5, 3 * i) = g[2];
            b(5, 3 * i + 2) = g[0];
        }
    }
    return b;
}

struct FacetQuadraturePoint {
    Vec point;
    double weight;
    std::array<double, 3> shape;
};

// Degree-2 exact rules: two-point Gauss on edges, mid-edge rule on triangles.
template <typename Fn>
void for_facet_quadrature(const Mesh& mesh, const Facet& facet, Fn&& fn) {
    if (mesh.dim() == 2) {
        const Vec a = mesh.node(facet.nodes[0]), b = mesh.node(facet.nodes[1]);
        const double len = (b - a).norm();
        const double xi = 0.5 / std::sqrt(3.0);
        for (const double s : {0.5 - xi, 0.5 + xi}) {
            FacetQuadraturePoint q;
            q.point = a + s * (b - a);
            q.weight = 0.5 * len;
            q.shape = {1.0 - s, s, 0.0};
            fn(q);
        }
    } else {
        const Vec a = mesh.node(facet.nodes[0]), b = mesh.node(facet.nodes[1]),
                  c = mesh.node(facet.nodes[2]);
        const double area = 0.5 * (b - a).cross(c - a).norm();
        const std::array<std::array<double, 3>, 3> shapes = {
            {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
        for (const auto& sh : shapes) {
            FacetQuadraturePoint q;
            q.point = sh[0] * a + sh[1] * b + sh[2] * c;
            q.weight = area / 3.0;
            q.shape = sh;
            fn(q);
        }
    }
}

template <int D>
SparseSystem assemble_displacement_impl(const Mesh& mesh, const FieldState& state,
                                        const MaterialParams& mat,
                                        const InitialStressField& sigma0,
                                        const std::vector<BoundaryLoad>& tractions) {
    const int nn = D + 1;
    const int edofs = D * nn;
    const int ndof = mesh.num_nodes() * D;

    auto blocks = run_blocks(mesh.num_elements(), ndof, [&](BlockOutput& out, int lo, int hi) {
        out.triplets.reserve(static_cast<size_t>(hi - lo) * edofs * edofs);
        for (int e = lo; e < hi; ++e) {
            const int* conn = mesh.element(e);
            const ElementBasis basis = element_basis(mesh, e);
            const auto bmat = strain_matrix<D>(basis);

            Eigen::Matrix<double, edofs, 1> ue;
            double phi_q = 0.0, p_q = 0.0;
            for (int i = 0; i < nn; ++i) {
                for (int c = 0; c < D; ++c) ue[D * i + c] = state.u[D * conn[i] + c];
                phi_q += basis.shape[i] * state.phi[conn[i]];
                p_q += basis.shape[i] * state.p[conn[i]];
            }

            const auto strain = spectral_split<D>(strain_from_voigt<D>((bmat * ue).eval()));
            const Tensor<D> sig_e = effective_stress(strain, phi_q, mat);
            const Tensor<D> sig0 = sigma0(basis.point).topLeftCorner<D, D>();
            const double alpha = fluid_state(phi_q, mat).alpha;
            const Tensor<D> sig = total_stress(sig_e, phi_q, sig0, alpha, p_q, mat.k);

            const Eigen::Matrix<double, edofs, 1> fint =
                basis.weight * (bmat.transpose() * stress_to_voigt<D>(sig));
            const auto dmat = stress_tangent(strain, phi_q, mat);
            const Eigen::Matrix<double, edofs, edofs> ke =
                basis.weight * (bmat.transpose() * dmat * bmat);

            for (int i = 0; i < nn; ++i)
                for (int ci = 0; ci < D; ++ci) {
                    const int gi = D * conn[i] + ci;
                    out.residual[gi] -= fint[D * i + ci];
                    for (int j = 0; j < nn; ++j)
                        for (int cj = 0; cj < D; ++cj)
                            out.triplets.emplace_back(gi, D * conn[j] + cj,
                                                      ke(D * i + ci, D * j + cj));
                }
        }
    });

    Eigen::VectorXd rext = Eigen::VectorXd::Zero(ndof);
    for (const BoundaryLoad& load : tractions) {
        if (!mesh.has_boundary_tag(load.tag))
            throw ConfigurationError("traction references unknown boundary tag '" + load.tag + "'");
        for (const Facet& facet : mesh.boundary_facets(load.tag)) {
            const Vec normal = mesh.facet_normal(facet);
            for_facet_quadrature(mesh, facet, [&](const FacetQuadraturePoint& q) {
                const Vec t = load.traction(q.point, normal);
                for (int i = 0; i < D; ++i)
                    for (int c = 0; c < D; ++c)
                        rext[D * facet.nodes[i] + c] += q.weight * q.shape[i] * t[c];
            });
        }
    }

    return combine(std::move(blocks), std::move(rext), ndof);
}

} // namespace

SparseSystem assemble_displacement(const Mesh& mesh, const FieldState& state,
                                   const MaterialParams& mat, const InitialStressField& sigma0,
                                   const std::vector<BoundaryLoad>& tractions) {
    return mesh.dim() == 2 ? assemble_displacement_impl<2>(mesh, state, mat, sigma0, tractions)
                           : assemble_displacement_impl<3>(mesh, state, mat, sigma0, tractions);
}

SparseSystem assemble_phase(const Mesh& mesh, const FieldState& state, const MaterialParams& mat) {
    const int ndof = mesh.num_nodes();
    const int nn = mesh.dim() + 1;
    auto blocks = run_blocks(mesh.num_elements(), ndof, [&](BlockOutput& out, int lo, int hi) {
        out.triplets.reserve(static_cast<size_t>(hi - lo) * nn * nn);
        for (int e = lo; e < hi; ++e) {
            const int* conn = mesh.element(e);
            const ElementBasis basis = element_basis(mesh, e);
            const double h = state.history[e];
            const double react = 2.0 * (1.0 - mat.k) * h + mat.gc / mat.l0;

            double phi_q = 0.0;
            Vec grad_phi = Vec::Zero();
            for (int i = 0; i < nn; ++i) {
                phi_q += basis.shape[i] * state.phi[conn[i]];
                grad_phi += basis.grad.row(i).transpose() * state.phi[conn[i]];
            }

            for (int i = 0; i < nn; ++i) {
                const double fint =
                    basis.weight *
                    (-2.0 * (1.0 - mat.k) * (1.0 - phi_q) * h * basis.shape[i] +
                     mat.gc * (mat.l0 * basis.grad.row(i).dot(grad_phi) +
                               phi_q / mat.l0 * basis.shape[i]));
                out.residual[conn[i]] -= fint;
                for (int j = 0; j < nn; ++j) {
                    const double ke = basis.weight *
                                      (mat.gc * mat.l0 * basis.grad.row(i).dot(basis.grad.row(j)) +
                                       basis.shape[i] * react * basis.shape[j]);
                    out.triplets.emplace_back(conn[i], conn[j], ke);
                }
            }
        }
    });
    return combine(std::move(blocks), Eigen::VectorXd::Zero(ndof), ndof);
}

SparseSystem assemble_pressure(const Mesh& mesh, const FieldState& state, const MaterialParams& mat,
                               double dt, const Eigen::VectorXd& source,
                               const PressureBCs& pressure_bcs) {
    if (!(dt > 0.0))
        throw InvalidArgumentError("time step must be positive");
    const int ndof = mesh.num_nodes();
    const int dim = mesh.dim();
    const int nn = dim + 1;

    auto blocks = run_blocks(mesh.num_elements(), ndof, [&](BlockOutput& out, int lo, int hi) {
        out.triplets.reserve(static_cast<size_t>(hi - lo) * nn * nn);
        for (int e = lo; e < hi; ++e) {
            const int* conn = mesh.element(e);
            const ElementBasis basis = element_basis(mesh, e);

            double phi_q = 0.0, p_q = 0.0, p_prev_q = 0.0;
            double eps_vol = 0.0, eps_vol_prev = 0.0;
            Vec grad_p = Vec::Zero();
            for (int i = 0; i < nn; ++i) {
                phi_q += basis.shape[i] * state.phi[conn[i]];
                p_q += basis.shape[i] * state.p[conn[i]];
                p_prev_q += basis.shape[i] * state.p_prev[conn[i]];
                grad_p += basis.grad.row(i).transpose() * state.p[conn[i]];
                for (int c = 0; c < dim; ++c) {
                    eps_vol += basis.grad(i, c) * state.u[dim * conn[i] + c];
                    eps_vol_prev += basis.grad(i, c) * state.u_prev[dim * conn[i] + c];
                }
            }

            const FluidPointState fs = fluid_state(phi_q, mat);
            const double mobility = fs.rho * fs.perm_eff / fs.visc_eff;
            const double capacity = fs.rho * fs.storage / dt;
            const double ext =
                source[e] - fs.rho * fs.alpha * fs.chi_r * (eps_vol - eps_vol_prev) / dt;

            for (int i = 0; i < nn; ++i) {
                const double fint = basis.weight * mobility * basis.grad.row(i).dot(grad_p);
                const double fvis = basis.weight * capacity * (p_q - p_prev_q) * basis.shape[i];
                const double fext = basis.weight * ext * basis.shape[i];
                out.residual[conn[i]] += fext - fint - fvis;
                for (int j = 0; j < nn; ++j) {
                    const double ke =
                        basis.weight * (mobility * basis.grad.row(i).dot(basis.grad.row(j)) +
                                        basis.shape[i] * capacity * basis.shape[j]);
                    out.triplets.emplace_back(conn[i], conn[j], ke);
                }
            }
        }
    });

    Eigen::VectorXd rext = Eigen::VectorXd::Zero(ndof);
    for (const auto& [tag, mass_flux] : pressure_bcs.flux) {
        if (!mesh.has_boundary_tag(tag))
            throw ConfigurationError("flux references unknown boundary tag '" + tag + "'");
        for (const Facet& facet : mesh.boundary_facets(tag)) {
            for_facet_quadrature(mesh, facet, [&](const FacetQuadraturePoint& q) {
                for (int i = 0; i < dim; ++i)
                    rext[facet.nodes[i]] += q.weight * q.shape[i] * mass_flux;
            });
        }
    }

    return combine(std::move(blocks), std::move(rext), ndof);
}

void apply_dirichlet(SparseSystem& system, const std::vector<DirichletBC>& constraints,
                     const Eigen::VectorXd& current) {
    const int n = system.full_size;
    std::vector<char> constrained(n, 0);
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
    std::vector<char> seen(n, 0);
    for (const DirichletBC& bc : constraints) {
        if (bc.dof < 0 || bc.dof >= n)
            throw ConfigurationError("constraint references dof " + std::to_string(bc.dof) +
                                     " outside the system");
        const double d = bc.value - current[bc.dof];
        if (seen[bc.dof] && delta[bc.dof] != d)
            throw ConfigurationError("conflicting constraints on dof " + std::to_string(bc.dof));
        seen[bc.dof] = 1;
        constrained[bc.dof] = 1;
        delta[bc.dof] = d;
    }

    std::vector<int> reduced(n, -1);
    int nred = 0;
    for (int i = 0; i < n; ++i)
        if (!constrained[i]) reduced[i] = nred++;

    Eigen::VectorXd rhs(nred);
    for (int i = 0; i < n; ++i)
        if (reduced[i] >= 0) rhs[reduced[i]] = system.residual[i];

    std::vector<Triplet> kept;
    kept.reserve(system.matrix.nonZeros());
    for (int col = 0; col < system.matrix.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, col); it; ++it) {
            const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
            if (reduced[r] < 0) continue;
            if (reduced[c] < 0) {
                if (delta[c] != 0.0) rhs[reduced[r]] -= it.value() * delta[c];
            } else {
                kept.emplace_back(reduced[r], reduced[c], it.value());
            }
        }
    }

    Eigen::SparseMatrix<double> rmat(nred, nred);
    rmat.setFromTriplets(kept.begin(), kept.end());
    system.matrix = std::move(rmat);
    system.residual = std::move(rhs);
    system.reduced_index = std::move(reduced);
    system.constrained_delta = std::move(delta);
    system.eliminated = true;
}

Eigen::VectorXd SparseSystem::expand(const Eigen::VectorXd& reduced) const {
    if (!eliminated) return reduced;
    Eigen::VectorXd full = constrained_delta;
    for (int i = 0; i < full_size; ++i)
        if (reduced_index[i] >= 0) full[i] = reduced[reduced_index[i]];
    return full;
}

std::vector<DirichletBC> pressure_constraints(const Mesh& mesh, const PressureBCs& bcs) {
    std::vector<DirichletBC> out;
    for (const auto& [tag, value] : bcs.dirichlet) {
        if (!mesh.has_boundary_tag(tag))
            throw ConfigurationError("pressure bc references unknown boundary tag '" + tag + "'");
        for (int node : mesh.boundary_nodes(tag)) out.push_back({node, value});
    }
    return out;
}

int assembly_threads() {
    static const int n = [] {
        if (const char* env = std::getenv("POROFRAC_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return v;
        }
        return 1;
    }();
    return n;
}

} // namespace porofrac
