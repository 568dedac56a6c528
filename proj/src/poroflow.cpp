#include "porofrac/poroflow.hpp"

namespace porofrac {

std::pair<double, double> indicators(double phi, double c1, double c2) {
    if (phi <= c1) return {1.0, 0.0};
    if (phi >= c2) return {0.0, 1.0};
    const double chi_f = (phi - c1) / (c2 - c1);
    return {1.0 - chi_f, chi_f};
}

FluidPointState effective_properties(double chi_r, double chi_f, const MaterialParams& mat) {
    FluidPointState s;
    s.chi_r = chi_r;
    s.chi_f = chi_f;
    s.rho = mat.rho_r * chi_r + mat.rho_f * chi_f;
    s.alpha = mat.biot_r * chi_r + chi_f; // fully broken material has Biot coefficient 1
    s.compressibility = mat.compress_r * chi_r + mat.compress_f * chi_f;
    s.visc_eff = mat.visc_r * chi_r + mat.visc_f * chi_f;
    s.perm_eff = mat.perm_r * chi_r + mat.perm_f * chi_f;
    s.storage = mat.porosity * s.compressibility +
                (s.alpha - mat.porosity) * (1.0 - s.alpha) / mat.bulk_modulus();
    return s;
}

FluidPointState fluid_state(double phi, const MaterialParams& mat) {
    const auto [chi_r, chi_f] = indicators(phi, mat.c1, mat.c2);
    return effective_properties(chi_r, chi_f, mat);
}

Vec darcy_velocity(double perm_eff, double visc_eff, const Vec& grad_p) {
    if (!(visc_eff > 0.0))
        throw InvalidArgumentError("effective viscosity must be positive");
    return -(perm_eff / visc_eff) * grad_p;
}

} // namespace porofrac
