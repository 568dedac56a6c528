#include "porofrac/constitutive.hpp"

#include <cmath>

namespace porofrac {

void MaterialParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw InvalidArgumentError(std::string("material: ") + what);
    };
    require(lambda > 0.0, "lambda must be positive");
    require(mu > 0.0, "mu must be positive");
    require(gc > 0.0, "gc must be positive");
    require(l0 > 0.0, "l0 must be positive");
    require(k > 0.0 && k < 1e-2, "residual stiffness k must lie in (0, 1e-2)");
    require(biot_r > 0.0 && biot_r <= 1.0, "reservoir Biot coefficient must lie in (0, 1]");
    require(c1 >= 0.0 && c1 < c2 && c2 <= 1.0, "thresholds must satisfy 0 <= c1 < c2 <= 1");
    require(rho_r > 0.0 && rho_f > 0.0, "densities must be positive");
    require(perm_r > 0.0 && perm_f > 0.0, "permeabilities must be positive");
    require(compress_r > 0.0 && compress_f > 0.0, "compressibilities must be positive");
    require(visc_r > 0.0 && visc_f > 0.0, "viscosities must be positive");
    require(porosity > 0.0 && porosity < 1.0, "porosity must lie in (0, 1)");
}

std::pair<double, double> lame_from_young_poisson(double young, double poisson) {
    if (!(young > 0.0))
        throw InvalidArgumentError("Young's modulus must be positive");
    if (!(poisson > -1.0 && poisson < 0.5))
        throw InvalidArgumentError("Poisson's ratio must lie in (-1, 0.5)");
    const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    const double mu = young / (2.0 * (1.0 + poisson));
    return {lambda, mu};
}

Degradation degradation(double phi, double k) {
    if (phi < -1e-9 || phi > 1.0 + 1e-9)
        throw InvalidArgumentError("phase field value " + std::to_string(phi) +
                                   " outside [0, 1]");
    const double c = std::clamp(phi, 0.0, 1.0);
    return {(1.0 - k) * (1.0 - c) * (1.0 - c) + k, 2.0 * (c - 1.0) * (1.0 - k)};
}

namespace {

// Closed-form eigendecomposition of a symmetric 2x2 tensor.
void sym_eigen(const Tensor<2>& m, Eigen::Vector2d& ev, Tensor<2>& vec) {
    const double a = m(0, 0), b = m(1, 1), c = 0.5 * (m(0, 1) + m(1, 0));
    const double mean = 0.5 * (a + b);
    const double r = std::hypot(0.5 * (a - b), c);
    ev << mean + r, mean - r;
    const double theta = 0.5 * std::atan2(2.0 * c, a - b);
    const double ct = std::cos(theta), st = std::sin(theta);
    vec << ct, -st, st, ct;
}

// Cyclic Jacobi sweeps for a symmetric 3x3 tensor, then a descending sort.
void sym_eigen(const Tensor<3>& m, Eigen::Vector3d& ev, Tensor<3>& vec) {
    Tensor<3> a = 0.5 * (m + m.transpose());
    vec.setIdentity();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= 1e-14 * scale) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (std::abs(a(p, q)) <= 1e-300) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cth = 1.0 / std::sqrt(1.0 + t * t);
                const double sth = t * cth;
                Tensor<3> rot = Tensor<3>::Identity();
                rot(p, p) = cth;
                rot(q, q) = cth;
                rot(p, q) = -sth;
                rot(q, p) = sth;
                a = rot.transpose() * a * rot;
                vec = vec * rot;
            }
    }
    ev = a.diagonal();
    // sort descending, keeping eigenvector columns aligned
    for (int i = 0; i < 2; ++i) {
        int imax = i;
        for (int j = i + 1; j < 3; ++j)
            if (ev[j] > ev[imax]) imax = j;
        if (imax != i) {
            std::swap(ev[i], ev[imax]);
            vec.col(i).swap(vec.col(imax));
        }
    }
}

} // namespace

template <int D>
StrainState<D> spectral_split(const Tensor<D>& eps) {
    const double tol = 1e-12 * std::max(1.0, eps.cwiseAbs().maxCoeff());
    if (((eps - eps.transpose()).cwiseAbs().maxCoeff()) > tol)
        throw InvalidArgumentError("strain tensor is not symmetric");
    StrainState<D> s;
    s.eps = 0.5 * (eps + eps.transpose());
    sym_eigen(s.eps, s.eigenvalues, s.eigenvectors);
    s.plus.setZero();
    s.minus.setZero();
    for (int a = 0; a < D; ++a) {
        const auto n = s.eigenvectors.col(a);
        const Tensor<D> mode = n * n.transpose();
        s.plus += macaulay_plus(s.eigenvalues[a]) * mode;
        s.minus += macaulay_minus(s.eigenvalues[a]) * mode;
    }
    return s;
}

template <int D>
std::pair<double, double> energy_split(const StrainState<D>& strain, double lambda, double mu) {
    const double tr = strain.eps.trace();
    double sq_plus = 0.0, sq_minus = 0.0;
    for (int a = 0; a < D; ++a) {
        const double ev = strain.eigenvalues[a];
        sq_plus += macaulay_plus(ev) * macaulay_plus(ev);
        sq_minus += macaulay_minus(ev) * macaulay_minus(ev);
    }
    const double psi_plus = 0.5 * lambda * macaulay_plus(tr) * macaulay_plus(tr) + mu * sq_plus;
    const double psi_minus = 0.5 * lambda * macaulay_minus(tr) * macaulay_minus(tr) + mu * sq_minus;
    return {psi_plus, psi_minus};
}

template <int D>
Tensor<D> effective_stress(const StrainState<D>& strain, double phi, const MaterialParams& mat) {
    const double g = degradation(phi, mat.k).g;
    const double tr = strain.eps.trace();
    Tensor<D> sig = g * (mat.lambda * macaulay_plus(tr) * Tensor<D>::Identity() + 2.0 * mat.mu * strain.plus);
    sig += mat.lambda * macaulay_minus(tr) * Tensor<D>::Identity() + 2.0 * mat.mu * strain.minus;
    return sig;
}

template <int D>
Tensor<D> total_stress(const Tensor<D>& sigma_e, double phi, const Tensor<D>& sigma0, double alpha,
                       double p, double k) {
    const double tol = 1e-9 * std::max(1.0, sigma0.cwiseAbs().maxCoeff());
    if (((sigma0 - sigma0.transpose()).cwiseAbs().maxCoeff()) > tol)
        throw InvalidArgumentError("pre-existing stress tensor is not symmetric");
    const double g = degradation(phi, k).g;
    return sigma_e + g * sigma0 - alpha * p * Tensor<D>::Identity();
}

template <int D>
double crack_drive(const StrainState<D>& strain, const Tensor<D>& sigma0, double lambda, double mu) {
    return energy_split(strain, lambda, mu).first + (sigma0.array() * strain.eps.array()).sum();
}

template <>
Eigen::Matrix<double, 3, 1> strain_to_voigt<2>(const Tensor<2>& eps) {
    return {eps(0, 0), eps(1, 1), eps(0, 1) + eps(1, 0)};
}

template <>
Eigen::Matrix<double, 6, 1> strain_to_voigt<3>(const Tensor<3>& eps) {
    Eigen::Matrix<double, 6, 1> v;
    v << eps(0, 0), eps(1, 1), eps(2, 2), eps(0, 1) + eps(1, 0), eps(1, 2) + eps(2, 1),
        eps(0, 2) + eps(2, 0);
    return v;
}

template <>
Tensor<2> strain_from_voigt<2>(const Eigen::Matrix<double, 3, 1>& v) {
    Tensor<2> eps;
    eps << v[0], 0.5 * v[2], 0.5 * v[2], v[1];
    return eps;
}

template <>
Tensor<3> strain_from_voigt<3>(const Eigen::Matrix<double, 6, 1>& v) {
    Tensor<3> eps;
    eps << v[0], 0.5 * v[3], 0.5 * v[5], 0.5 * v[3], v[1], 0.5 * v[4], 0.5 * v[5], 0.5 * v[4], v[2];
    return eps;
}

template <>
Eigen::Matrix<double, 3, 1> stress_to_voigt<2>(const Tensor<2>& sig) {
    return {sig(0, 0), sig(1, 1), 0.5 * (sig(0, 1) + sig(1, 0))};
}

template <>
Eigen::Matrix<double, 6, 1> stress_to_voigt<3>(const Tensor<3>& sig) {
    Eigen::Matrix<double, 6, 1> v;
    v << sig(0, 0), sig(1, 1), sig(2, 2), 0.5 * (sig(0, 1) + sig(1, 0)),
        0.5 * (sig(1, 2) + sig(2, 1)), 0.5 * (sig(0, 2) + sig(2, 0));
    return v;
}

namespace {

// Derivative of the tensile projection applied to a direction, expressed via
// the eigenbasis. Coincident eigenvalues fall back to the continuous limit of
// the rotation factor.
template <int D>
Tensor<D> tensile_projection_derivative(const StrainState<D>& s, const Tensor<D>& deps) {
    const double tol = 1e-12 * std::max(1.0, s.eps.cwiseAbs().maxCoeff());
    const Tensor<D>& q = s.eigenvectors;
    const Tensor<D> d = q.transpose() * deps * q;
    Tensor<D> out = Tensor<D>::Zero();
    auto heaviside = [](double t) { return t > 0.0 ? 1.0 : 0.0; };
    for (int a = 0; a < D; ++a) {
        out(a, a) = heaviside(s.eigenvalues[a]) * d(a, a);
        for (int b = a + 1; b < D; ++b) {
            const double gap = s.eigenvalues[a] - s.eigenvalues[b];
            const double f =
                std::abs(gap) > tol
                    ? (macaulay_plus(s.eigenvalues[a]) - macaulay_plus(s.eigenvalues[b])) / gap
                    : 0.5 * (heaviside(s.eigenvalues[a]) + heaviside(s.eigenvalues[b]));
            out(a, b) = f * d(a, b);
            out(b, a) = f * d(b, a);
        }
    }
    return q * out * q.transpose();
}

} // namespace

template <int D>
Eigen::Matrix<double, voigt_size<D>(), voigt_size<D>()> stress_tangent(const StrainState<D>& strain,
                                                                       double phi,
                                                                       const MaterialParams& mat) {
    constexpr int N = voigt_size<D>();
    const double g = degradation(phi, mat.k).g;
    const double tr = strain.eps.trace();
    const double h_tr = tr > 0.0 ? 1.0 : 0.0;
    Eigen::Matrix<double, N, N> tangent;
    for (int b = 0; b < N; ++b) {
        Eigen::Matrix<double, N, 1> unit = Eigen::Matrix<double, N, 1>::Zero();
        unit[b] = 1.0;
        const Tensor<D> deps = strain_from_voigt<D>(unit);
        const Tensor<D> dplus = tensile_projection_derivative(strain, deps);
        const Tensor<D> dminus = deps - dplus;
        const double dtr = deps.trace();
        Tensor<D> dsig =
            g * (mat.lambda * h_tr * dtr * Tensor<D>::Identity() + 2.0 * mat.mu * dplus);
        dsig += mat.lambda * (1.0 - h_tr) * dtr * Tensor<D>::Identity() + 2.0 * mat.mu * dminus;
        tangent.col(b) = stress_to_voigt<D>(dsig);
    }
    return tangent;
}

template StrainState<2> spectral_split<2>(const Tensor<2>&);
template StrainState<3> spectral_split<3>(const Tensor<3>&);
template std::pair<double, double> energy_split<2>(const StrainState<2>&, double, double);
template std::pair<double, double> energy_split<3>(const StrainState<3>&, double, double);
template Tensor<2> effective_stress<2>(const StrainState<2>&, double, const MaterialParams&);
template Tensor<3> effective_stress<3>(const StrainState<3>&, double, const MaterialParams&);
template Tensor<2> total_stress<2>(const Tensor<2>&, double, const Tensor<2>&, double, double, double);
template Tensor<3> total_stress<3>(const Tensor<3>&, double, const Tensor<3>&, double, double, double);
template double crack_drive<2>(const StrainState<2>&, const Tensor<2>&, double, double);
template double crack_drive<3>(const StrainState<3>&, const Tensor<3>&, double, double);
template Eigen::Matrix<double, 3, 3> stress_tangent<2>(const StrainState<2>&, double,
                                                       const MaterialParams&);
template Eigen::Matrix<double, 6, 6> stress_tangent<3>(const StrainState<3>&, double,
                                                       const MaterialParams&);

} // namespace porofrac
