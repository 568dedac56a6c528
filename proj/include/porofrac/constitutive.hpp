#pragma once

#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "porofrac/errors.hpp"
#include "porofrac/mesh.hpp"

namespace porofrac {

/// Solid and fluid constants. Stress-like quantities in Pa, permeabilities in
/// m^2, compressibilities in 1/Pa, viscosities in Pa*s.
struct MaterialParams {
    // solid
    double lambda = 34.62e9;  ///< first Lame constant
    double mu = 23.08e9;      ///< shear modulus
    double gc = 500.0;        ///< critical energy release rate (N/m)
    double l0 = 0.1;          ///< crack regularization length (m)
    double k = 1e-9;          ///< residual stiffness factor
    double biot_r = 0.05;     ///< Biot coefficient of the intact rock
    // fluid, reservoir / fractured endpoints
    double rho_r = 1.0e3, rho_f = 1.0e3;         ///< densities (kg/m^3)
    double perm_r = 1e-15, perm_f = 8.333e-4;    ///< permeabilities (m^2)
    double compress_r = 1e-8, compress_f = 1e-8; ///< fluid compressibilities (1/Pa)
    double visc_r = 1e-3, visc_f = 1e-3;         ///< viscosities (Pa*s)
    double porosity = 0.05;
    double c1 = 0.4, c2 = 1.0; ///< phase-field thresholds of the fluid blending

    /// Drained bulk modulus used in the storage coefficient.
    double bulk_modulus() const { return lambda + 2.0 * mu / 3.0; }

    void validate() const;
    bool operator==(const MaterialParams&) const = default;
};

/// (lambda, mu) from Young's modulus and Poisson's ratio.
std::pair<double, double> lame_from_young_poisson(double young, double poisson);

inline double macaulay_plus(double x) { return x > 0.0 ? x : 0.0; }
inline double macaulay_minus(double x) { return x < 0.0 ? x : 0.0; }

template <int D>
using Tensor = Eigen::Matrix<double, D, D>;

/// Strain with its spectral decomposition into tensile and compressive parts.
template <int D>
struct StrainState {
    Tensor<D> eps = Tensor<D>::Zero();
    Tensor<D> plus = Tensor<D>::Zero();   ///< sum of positive principal modes
    Tensor<D> minus = Tensor<D>::Zero();  ///< sum of negative principal modes
    Eigen::Matrix<double, D, 1> eigenvalues = Eigen::Matrix<double, D, 1>::Zero(); ///< descending
    Tensor<D> eigenvectors = Tensor<D>::Identity(); ///< columns match eigenvalues
};

/// Symmetric gradient of the displacement.
template <int D>
Tensor<D> small_strain(const Tensor<D>& grad_u) {
    return 0.5 * (grad_u + grad_u.transpose());
}

/// Spectral decomposition of a symmetric strain tensor. Throws
/// InvalidArgumentError when the input is not symmetric within 1e-12.
template <int D>
StrainState<D> spectral_split(const Tensor<D>& eps);

/// Tensile/compressive elastic energy densities (J/m^3).
template <int D>
std::pair<double, double> energy_split(const StrainState<D>& strain, double lambda, double mu);

struct Degradation {
    double g;  ///< stiffness multiplier
    double dg; ///< derivative with respect to the phase field
};

/// Quadratic degradation g = (1-k)(1-phi)^2 + k. Inputs outside [0,1] by more
/// than 1e-9 are rejected; smaller excursions are clamped.
Degradation degradation(double phi, double k);

/// Effective stress: degraded tensile branch plus intact compressive branch.
template <int D>
Tensor<D> effective_stress(const StrainState<D>& strain, double phi, const MaterialParams& mat);

/// Total stress combining effective stress, the degraded pre-existing stress,
/// and the pore-pressure term.
template <int D>
Tensor<D> total_stress(const Tensor<D>& sigma_e, double phi, const Tensor<D>& sigma0, double alpha,
                       double p, double k);

/// Crack driving energy density: tensile elastic energy plus the work of the
/// pre-existing stress on the induced strain (may be negative).
template <int D>
double crack_drive(const StrainState<D>& strain, const Tensor<D>& sigma0, double lambda, double mu);

/// Running-maximum update of the history field.
inline double update_history(double h_prev, double drive) { return drive > h_prev ? drive : h_prev; }

/// Number of independent components of a symmetric DxD tensor.
template <int D>
constexpr int voigt_size() {
    return D * (D + 1) / 2;
}

/// Voigt component order: 2D (xx, yy, xy); 3D (xx, yy, zz, xy, yz, xz).
/// Strain vectors use engineering shear (gamma = 2 eps_xy).
template <int D>
Eigen::Matrix<double, voigt_size<D>(), 1> strain_to_voigt(const Tensor<D>& eps);
template <int D>
Tensor<D> strain_from_voigt(const Eigen::Matrix<double, voigt_size<D>(), 1>& v);
template <int D>
Eigen::Matrix<double, voigt_size<D>(), 1> stress_to_voigt(const Tensor<D>& sig);

/// Tangent d sigma_e / d eps in Voigt form, built from the spectral
/// decomposition at the given state. Symmetric; coincident eigenvalues use the
/// well-defined limit of the rotation terms.
template <int D>
Eigen::Matrix<double, voigt_size<D>(), voigt_size<D>()> stress_tangent(const StrainState<D>& strain,
                                                                       double phi,
                                                                       const MaterialParams& mat);

/// Pre-existing stress as a function of position; returns a symmetric tensor
/// padded to 3x3 (2D uses the upper-left block).
using InitialStressField = std::function<Eigen::Matrix3d(const Vec&)>;

} // namespace porofrac
