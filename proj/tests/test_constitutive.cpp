#include <doctest.h>

#include <random>

#include "porofrac/constitutive.hpp"

using namespace porofrac;

namespace {

template <int D>
Tensor<D> random_symmetric(std::mt19937& rng, double scale) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    Tensor<D> m;
    for (int i = 0; i < D; ++i)
        for (int j = i; j < D; ++j) m(i, j) = m(j, i) = dist(rng);
    return m;
}

// undecomposed elastic energy density
template <int D>
double elastic_energy(const Tensor<D>& eps, double lambda, double mu) {
    const double tr = eps.trace();
    return 0.5 * lambda * tr * tr + mu * (eps.array() * eps.array()).sum();
}

template <int D>
double degraded_energy(const Tensor<D>& eps, double phi, const MaterialParams& mat) {
    const auto s = spectral_split<D>(eps);
    const auto [plus, minus] = energy_split(s, mat.lambda, mat.mu);
    return degradation(phi, mat.k).g * plus + minus;
}

template <int D>
bool eigenvalues_separated(const Tensor<D>& eps, double gap) {
    const auto s = spectral_split<D>(eps);
    for (int a = 0; a < D; ++a) {
        if (std::abs(s.eigenvalues[a]) < gap) return false;
        for (int b = a + 1; b < D; ++b)
            if (std::abs(s.eigenvalues[a] - s.eigenvalues[b]) < gap) return false;
    }
    return std::abs(eps.trace()) > gap;
}

} // namespace

TEST_CASE("lame constants from stiffness and contraction ratio") {
    // invert the default lambda/mu pair: E = mu(3 lambda + 2 mu)/(lambda+mu)
    const double lambda = 34.62e9, mu = 23.08e9;
    const double young = mu * (3.0 * lambda + 2.0 * mu) / (lambda + mu);
    const double poisson = lambda / (2.0 * (lambda + mu));
    CHECK(poisson == doctest::Approx(0.3).epsilon(1e-12));
    const auto [l2, m2] = lame_from_young_poisson(young, poisson);
    CHECK(l2 == doctest::Approx(lambda).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(mu).epsilon(1e-12));

    CHECK(lame_from_young_poisson(2.6, 0.3).second == doctest::Approx(1.0).epsilon(1e-14));
    const auto [l0, m0] = lame_from_young_poisson(1.0, 0.0);
    CHECK(l0 == doctest::Approx(0.0));
    CHECK(m0 == doctest::Approx(0.5));

    CHECK_THROWS_AS(lame_from_young_poisson(1.0, 0.5), InvalidArgumentError);
    CHECK_THROWS_AS(lame_from_young_poisson(-1.0, 0.2), InvalidArgumentError);
}

TEST_CASE("small strain symmetrizes the displacement gradient") {
    Tensor<2> grad;
    grad << 0.0, 3e-3, 0.0, 0.0;
    const Tensor<2> eps = small_strain(grad);
    CHECK(eps(0, 1) == doctest::Approx(1.5e-3));
    CHECK(eps(1, 0) == doctest::Approx(1.5e-3));
    CHECK(eps(0, 0) == 0.0);

    std::mt19937 rng(1);
    const Tensor<2> sym = random_symmetric<2>(rng, 1e-3);
    CHECK((small_strain(sym) - sym).cwiseAbs().maxCoeff() == 0.0);

    Tensor<2> skew;
    skew << 0.0, 1e-3, -1e-3, 0.0;
    CHECK(small_strain(skew).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("macaulay brackets") {
    CHECK(macaulay_plus(3.0) == 3.0);
    CHECK(macaulay_plus(-3.0) == 0.0);
    CHECK(macaulay_minus(-3.0) == -3.0);
    CHECK(macaulay_minus(3.0) == 0.0);
}

TEST_CASE("spectral split of a diagonal strain") {
    Tensor<2> eps = Tensor<2>::Zero();
    eps(0, 0) = 1e-3;
    eps(1, 1) = -2e-3;
    const auto s = spectral_split<2>(eps);
    CHECK(s.plus(0, 0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(s.plus(1, 1) == doctest::Approx(0.0));
    CHECK(s.minus(1, 1) == doctest::Approx(-2e-3).epsilon(1e-12));
    CHECK(s.eigenvalues[0] > s.eigenvalues[1]);
}

TEST_CASE("spectral split of pure shear") {
    Tensor<2> eps;
    eps << 0.0, 1e-3, 1e-3, 0.0;
    const auto s = spectral_split<2>(eps);
    CHECK(s.eigenvalues[0] == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(s.eigenvalues[1] == doctest::Approx(-1e-3).epsilon(1e-12));
    // tensile part is the rank-one mode along (1,1)/sqrt(2)
    Tensor<2> expected;
    expected << 0.5e-3, 0.5e-3, 0.5e-3, 0.5e-3;
    CHECK((s.plus - expected).cwiseAbs().maxCoeff() < 1e-18);
}

TEST_CASE("spectral split edge cases") {
    const auto zero = spectral_split<2>(Tensor<2>::Zero());
    CHECK(zero.plus.cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.minus.cwiseAbs().maxCoeff() == 0.0);

    Tensor<2> asym;
    asym << 1.0, 1e-3, 0.0, 1.0;
    CHECK_THROWS_AS(spectral_split<2>(asym), InvalidArgumentError);
}

TEST_CASE("spectral split reconstruction and orthogonality") {
    std::mt19937 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Tensor<2> eps2 = random_symmetric<2>(rng, 1e-2);
        const auto s2 = spectral_split<2>(eps2);
        CHECK((s2.plus + s2.minus - eps2).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1e-30, eps2.cwiseAbs().maxCoeff()));
        CHECK(std::abs((s2.plus.array() * s2.minus.array()).sum()) <=
              1e-15 * eps2.squaredNorm() + 1e-30);

        const Tensor<3> eps3 = random_symmetric<3>(rng, 1e-2);
        const auto s3 = spectral_split<3>(eps3);
        CHECK((s3.plus + s3.minus - eps3).cwiseAbs().maxCoeff() <=
              1e-10 * std::max(1e-30, eps3.cwiseAbs().maxCoeff()));
        CHECK(std::abs((s3.plus.array() * s3.minus.array()).sum()) <=
              1e-15 * eps3.squaredNorm() + 1e-30);
    }
}

TEST_CASE("energy split of a uniaxial extension") {
    Tensor<2> eps = Tensor<2>::Zero();
    eps(0, 0) = 1e-3;
    const auto [plus, minus] = energy_split(spectral_split<2>(eps), 34.62e9, 23.08e9);
    CHECK(plus == doctest::Approx(4.039e4).epsilon(1e-4));
    CHECK(minus == 0.0);
}

TEST_CASE("energy split sums to the undecomposed energy") {
    std::mt19937 rng(11);
    const MaterialParams mat;
    for (int i = 0; i < 2000; ++i) {
        const Tensor<2> e2 = random_symmetric<2>(rng, 5e-3);
        const auto [p2, m2] = energy_split(spectral_split<2>(e2), mat.lambda, mat.mu);
        const double ref2 = elastic_energy(e2, mat.lambda, mat.mu);
        CHECK(p2 + m2 == doctest::Approx(ref2).epsilon(1e-10));

        const Tensor<3> e3 = random_symmetric<3>(rng, 5e-3);
        const auto [p3, m3] = energy_split(spectral_split<3>(e3), mat.lambda, mat.mu);
        const double ref3 = elastic_energy(e3, mat.lambda, mat.mu);
        CHECK(p3 + m3 == doctest::Approx(ref3).epsilon(1e-10));
    }
    const auto [pz, mz] = energy_split(spectral_split<2>(Tensor<2>::Zero()), mat.lambda, mat.mu);
    CHECK(pz == 0.0);
    CHECK(mz == 0.0);
}

TEST_CASE("degradation function") {
    CHECK(degradation(0.0, 1e-9).g == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(degradation(1.0, 1e-9).g == doctest::Approx(1e-9).epsilon(1e-12));
    const Degradation d = degradation(0.5, 0.0);
    CHECK(d.g == doctest::Approx(0.25));
    CHECK(d.dg == doctest::Approx(-1.0));
    CHECK_THROWS_AS(degradation(1.1, 1e-9), InvalidArgumentError);
    CHECK_THROWS_AS(degradation(-0.1, 1e-9), InvalidArgumentError);
    // strictly decreasing on [0, 1] for k < 1
    double prev = degradation(0.0, 1e-9).g;
    for (double phi = 0.05; phi <= 1.0; phi += 0.05) {
        const double g = degradation(phi, 1e-9).g;
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("effective stress branches") {
    MaterialParams mat;
    Tensor<2> eps = Tensor<2>::Zero();
    eps(0, 0) = 1e-3;
    eps(1, 1) = 2e-3;
    const auto tension = spectral_split<2>(eps);

    // undamaged: isotropic elasticity
    const Tensor<2> sig0 = effective_stress(tension, 0.0, mat);
    const Tensor<2> iso = mat.lambda * eps.trace() * Tensor<2>::Identity() + 2.0 * mat.mu * eps;
    CHECK((sig0 - iso).cwiseAbs().maxCoeff() <= 1e-9 * iso.cwiseAbs().maxCoeff());

    // fully broken in tension: bounded by the residual factor
    const Tensor<2> sig1 = effective_stress(tension, 1.0, mat);
    CHECK(sig1.cwiseAbs().maxCoeff() <= 2.0 * mat.k * iso.cwiseAbs().maxCoeff());

    // compression is not degraded
    const auto compression = spectral_split<2>((-eps).eval());
    const Tensor<2> c0 = effective_stress(compression, 0.0, mat);
    const Tensor<2> c1 = effective_stress(compression, 1.0, mat);
    CHECK((c0 - c1).cwiseAbs().maxCoeff() <= 1e-12 * c0.cwiseAbs().maxCoeff());
}

TEST_CASE("total stress composition") {
    MaterialParams mat;
    Tensor<2> sigma0;
    sigma0 << 2e6, 0.3e6, 0.3e6, -1e6;
    const auto zero = spectral_split<2>(Tensor<2>::Zero());
    const Tensor<2> sig_e = effective_stress(zero, 0.0, mat);

    // zero displacement, undamaged, dry: the pre-existing stress carries over
    const Tensor<2> total = total_stress(sig_e, 0.0, sigma0, mat.biot_r, 0.0, mat.k);
    CHECK((total - sigma0).cwiseAbs().maxCoeff() <= 1e-9 * sigma0.cwiseAbs().maxCoeff());

    // fully broken tensile state carries only the residual
    Tensor<2> eps = Tensor<2>::Zero();
    eps(0, 0) = 1e-3;
    eps(1, 1) = 1e-3;
    const auto tension = spectral_split<2>(eps);
    const Tensor<2> broken =
        total_stress(effective_stress(tension, 1.0, mat), 1.0, sigma0, 1.0, 0.0, mat.k);
    const Tensor<2> intact =
        total_stress(effective_stress(tension, 0.0, mat), 0.0, sigma0, 1.0, 0.0, mat.k);
    CHECK(broken.cwiseAbs().maxCoeff() <= 2.0 * mat.k * intact.cwiseAbs().maxCoeff() +
                                              mat.k * sigma0.cwiseAbs().maxCoeff());

    // pore pressure enters as an isotropic reduction
    const Tensor<2> wet = total_stress(sig_e, 0.0, sigma0, 1.0, 1e6, mat.k);
    CHECK(wet(0, 0) == doctest::Approx(sigma0(0, 0) - 1e6));
    CHECK(wet(1, 1) == doctest::Approx(sigma0(1, 1) - 1e6));
    CHECK(wet(0, 1) == doctest::Approx(sigma0(0, 1)));

    Tensor<2> asym;
    asym << 1e6, 2e6, 0.0, 1e6;
    CHECK_THROWS_AS(total_stress(sig_e, 0.0, asym, 1.0, 0.0, mat.k), InvalidArgumentError);
}

TEST_CASE("crack driving energy") {
    const MaterialParams mat;
    const auto zero = spectral_split<2>(Tensor<2>::Zero());
    Tensor<2> sigma0;
    sigma0 << 0.5e6, 0.0, 0.0, 0.5e6;
    CHECK(crack_drive(zero, sigma0, mat.lambda, mat.mu) == 0.0);

    Tensor<2> eps = Tensor<2>::Zero();
    eps(0, 0) = 1e-3;
    const auto strain = spectral_split<2>(eps);
    const double psi_plus = energy_split(strain, mat.lambda, mat.mu).first;
    CHECK(crack_drive(strain, Tensor<2>::Zero(), mat.lambda, mat.mu) ==
          doctest::Approx(psi_plus));
    CHECK(crack_drive(strain, sigma0, mat.lambda, mat.mu) ==
          doctest::Approx(psi_plus + 500.0).epsilon(1e-12));
}

TEST_CASE("history update is a running maximum") {
    CHECK(update_history(5.0, 3.0) == 5.0);
    CHECK(update_history(2.0, 7.0) == 7.0);
    CHECK(update_history(2.5e6, 0.0) == 2.5e6);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-1e5, 1e6);
    double h = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double next = update_history(h, dist(rng));
        CHECK(next >= h);
        h = next;
    }
}

TEST_CASE("effective stress is the gradient of the degraded energy") {
    std::mt19937 rng(23);
    const MaterialParams mat;
    const double step = 1e-8;
    int tested = 0;
    while (tested < 60) {
        const Tensor<2> eps = random_symmetric<2>(rng, 2e-3);
        if (!eigenvalues_separated(eps, 2e-5)) continue;
        ++tested;
        const double phi = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const Tensor<2> sig = effective_stress(spectral_split<2>(eps), phi, mat);
        for (int i = 0; i < 2; ++i)
            for (int j = i; j < 2; ++j) {
                Tensor<2> d = Tensor<2>::Zero();
                d(i, j) = d(j, i) = step;
                const double fd = (degraded_energy<2>(eps + d, phi, mat) -
                                   degraded_energy<2>(eps - d, phi, mat)) /
                                  (2.0 * step);
                // perturbing a symmetric pair doubles the off-diagonal response
                const double expected = (i == j ? sig(i, j) : 2.0 * sig(i, j));
                CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
            }
    }
}

TEST_CASE("stress tangent matches directional differences of the stress") {
    std::mt19937 rng(29);
    const MaterialParams mat;
    const double step = 1e-9;
    int tested = 0;
    while (tested < 40) {
        const Tensor<3> eps = random_symmetric<3>(rng, 2e-3);
        if (!eigenvalues_separated(eps, 5e-5)) continue;
        const Tensor<3> dir = random_symmetric<3>(rng, 1.0);
        // keep a safe distance from the branch kinks along the probe direction
        if (!eigenvalues_separated<3>((eps + step * dir).eval(), 2e-5) ||
            !eigenvalues_separated<3>((eps - step * dir).eval(), 2e-5))
            continue;
        ++tested;
        const double phi = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto tangent = stress_tangent(spectral_split<3>(eps), phi, mat);
        const Eigen::Matrix<double, 6, 1> applied = tangent * strain_to_voigt<3>(dir);

        const Tensor<3> sp = effective_stress(spectral_split<3>((eps + step * dir).eval()), phi, mat);
        const Tensor<3> sm = effective_stress(spectral_split<3>((eps - step * dir).eval()), phi, mat);
        const Eigen::Matrix<double, 6, 1> fd = stress_to_voigt<3>(((sp - sm) / (2.0 * step)).eval());
        CHECK((applied - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
    }
}

TEST_CASE("stress tangent is symmetric") {
    std::mt19937 rng(31);
    const MaterialParams mat;
    for (int i = 0; i < 200; ++i) {
        const auto t2 = stress_tangent(spectral_split<2>(random_symmetric<2>(rng, 1e-3)), 0.3, mat);
        CHECK((t2 - t2.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * t2.cwiseAbs().maxCoeff());
        const auto t3 = stress_tangent(spectral_split<3>(random_symmetric<3>(rng, 1e-3)), 0.8, mat);
        CHECK((t3 - t3.transpose()).cwiseAbs().maxCoeff() <=
              1e-10 * t3.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("material validation") {
    MaterialParams mat;
    CHECK_NOTHROW(mat.validate());
    mat.c1 = 1.5;
    CHECK_THROWS_AS(mat.validate(), InvalidArgumentError);
    mat = MaterialParams{};
    mat.mu = -1.0;
    CHECK_THROWS_AS(mat.validate(), InvalidArgumentError);
}
