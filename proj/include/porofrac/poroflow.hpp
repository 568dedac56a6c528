#pragma once

#include <utility>

#include <Eigen/Dense>

#include "porofrac/constitutive.hpp"

namespace porofrac {

/// Pointwise fluid properties blended between the intact-rock and fractured
/// endpoint values by the phase-field indicator functions.
struct FluidPointState {
    double chi_r = 1.0, chi_f = 0.0; ///< indicator weights, chi_r + chi_f = 1
    double rho = 0.0;                ///< fluid density (kg/m^3)
    double alpha = 0.0;              ///< Biot coefficient
    double compressibility = 0.0;    ///< fluid compressibility (1/Pa)
    double visc_eff = 0.0;           ///< effective viscosity (Pa*s)
    double perm_eff = 0.0;           ///< effective permeability (m^2)
    double storage = 0.0;            ///< storage coefficient S (1/Pa)
};

/// Indicator weights of the intact and fractured regimes for a phase-field
/// value: (1,0) below c1, (0,1) above c2, linear in between.
std::pair<double, double> indicators(double phi, double c1, double c2);

/// Linear blends of the endpoint fluid constants plus the storage coefficient
/// S = porosity*c + (alpha - porosity)(1 - alpha)/K with the drained bulk
/// modulus K.
FluidPointState effective_properties(double chi_r, double chi_f, const MaterialParams& mat);

/// Convenience: indicators + blends straight from a phase-field value.
FluidPointState fluid_state(double phi, const MaterialParams& mat);

/// Darcy velocity v = -(K/mu) grad p. Throws for non-positive viscosity.
Vec darcy_velocity(double perm_eff, double visc_eff, const Vec& grad_p);

} // namespace porofrac
