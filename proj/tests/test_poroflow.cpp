#include <doctest.h>

#include "porofrac/poroflow.hpp"

using namespace porofrac;

TEST_CASE("indicator weights") {
    CHECK(indicators(0.3, 0.4, 1.0) == std::pair{1.0, 0.0});
    const auto [r, f] = indicators(0.7, 0.4, 1.0);
    CHECK(r == doctest::Approx(0.5));
    CHECK(f == doctest::Approx(0.5));
    CHECK(indicators(1.0, 0.4, 1.0) == std::pair{0.0, 1.0});
}

TEST_CASE("indicator partition and continuity") {
    for (double phi = -0.1; phi <= 1.1; phi += 0.01) {
        const auto [r, f] = indicators(phi, 0.4, 1.0);
        CHECK(r + f == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r >= 0.0);
        CHECK(f >= 0.0);
    }
    for (const double c : {0.4, 1.0}) {
        const auto below = indicators(c - 1e-13, 0.4, 1.0);
        const auto above = indicators(c + 1e-13, 0.4, 1.0);
        CHECK(std::abs(below.first - above.first) < 1e-12);
    }
}

TEST_CASE("effective properties at the endpoints") {
    const MaterialParams mat;

    const FluidPointState rock = effective_properties(1.0, 0.0, mat);
    CHECK(rock.perm_eff == doctest::Approx(1e-15));
    CHECK(rock.alpha == doctest::Approx(0.05));
    // the Biot coefficient equals the porosity here, so the poroelastic part
    // of the storage vanishes exactly
    CHECK(rock.storage == doctest::Approx(5e-10).epsilon(1e-14));

    const FluidPointState frac = effective_properties(0.0, 1.0, mat);
    CHECK(frac.perm_eff == doctest::Approx(8.333e-4));
    CHECK(frac.alpha == doctest::Approx(1.0));
    CHECK(frac.storage == doctest::Approx(5e-10).epsilon(1e-14));
}

TEST_CASE("blended properties are arithmetic means at equal weights") {
    MaterialParams mat;
    mat.rho_f = 900.0;
    mat.visc_f = 2e-3;
    const FluidPointState mid = effective_properties(0.5, 0.5, mat);
    CHECK(mid.rho == doctest::Approx(0.5 * (mat.rho_r + mat.rho_f)));
    CHECK(mid.visc_eff == doctest::Approx(0.5 * (mat.visc_r + mat.visc_f)));
    CHECK(mid.perm_eff == doctest::Approx(0.5 * (mat.perm_r + mat.perm_f)));
    CHECK(mid.alpha == doctest::Approx(0.5 * mat.biot_r + 0.5));
}

TEST_CASE("interpolated properties stay within the endpoint range") {
    const MaterialParams mat;
    double prev_perm = -1.0;
    for (double phi = 0.0; phi <= 1.0 + 1e-12; phi += 0.02) {
        const FluidPointState s = fluid_state(phi, mat);
        CHECK(s.perm_eff >= mat.perm_r - 1e-30);
        CHECK(s.perm_eff <= mat.perm_f + 1e-30);
        CHECK(s.alpha >= mat.biot_r - 1e-15);
        CHECK(s.alpha <= 1.0 + 1e-15);
        // permeability never decreases with damage
        CHECK(s.perm_eff >= prev_perm);
        prev_perm = s.perm_eff;
    }
}

TEST_CASE("darcy velocity") {
    CHECK(darcy_velocity(1e-15, 1e-3, Vec::Zero()).norm() == 0.0);
    const Vec v = darcy_velocity(1e-15, 1e-3, Vec(1e6, 0.0, 0.0));
    CHECK(v.x() == doctest::Approx(-1e-6).epsilon(1e-14));
    CHECK(v.y() == 0.0);
    const Vec v2 = darcy_velocity(2e-15, 1e-3, Vec(1e6, 0.0, 0.0));
    CHECK(v2.norm() == doctest::Approx(2.0 * v.norm()));
    CHECK_THROWS_AS(darcy_velocity(1e-15, 0.0, Vec(1.0, 0.0, 0.0)), InvalidArgumentError);
}
