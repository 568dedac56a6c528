#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "porofrac/mesh.hpp"

using namespace porofrac;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/") + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("structured rectangle counts") {
    const Mesh mesh = generate_structured(1.0, 1.0, 2, 2);
    CHECK(mesh.num_nodes() == 9);
    CHECK(mesh.num_elements() == 8);
    CHECK(mesh.dim() == 2);
}

TEST_CASE("structured rectangle matches the target spacing") {
    const Mesh mesh = generate_structured(10.0, 10.0, 200, 200);
    CHECK(mesh.num_nodes() == 201 * 201);
    CHECK(mesh.max_element_extent() == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("structured box counts") {
    const Mesh mesh = generate_structured(1.0, 1.0, 1.0, 1, 1, 1);
    CHECK(mesh.num_nodes() == 8);
    CHECK(mesh.num_elements() == 6);
    CHECK(mesh.dim() == 3);
}

TEST_CASE("generator rejects bad input") {
    CHECK_THROWS_AS(generate_structured(-1.0, 1.0, 2, 2), InvalidArgumentError);
    CHECK_THROWS_AS(generate_structured(1.0, 1.0, 0, 2), InvalidArgumentError);
    CHECK_THROWS_AS(generate_structured(1.0, 1.0, 1.0, 1, 0, 1), InvalidArgumentError);
}

TEST_CASE("mesh measures sum to the domain measure") {
    const Mesh rect = generate_structured(3.0, 2.0, 7, 5);
    CHECK(rect.total_measure() == doctest::Approx(6.0).epsilon(1e-10));
    const Mesh box = generate_structured(2.0, 1.5, 1.0, 4, 3, 2);
    CHECK(box.total_measure() == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("boundary tagging covers every side") {
    const Mesh mesh = generate_structured(1.0, 1.0, 4, 3);
    CHECK(mesh.boundary_facets("left").size() == 3);
    CHECK(mesh.boundary_facets("right").size() == 3);
    CHECK(mesh.boundary_facets("bottom").size() == 4);
    CHECK(mesh.boundary_facets("top").size() == 4);
    CHECK(!mesh.has_boundary_tag("untagged"));

    const Mesh box = generate_structured(1.0, 1.0, 1.0, 2, 2, 2);
    size_t total = 0;
    for (const char* tag : {"left", "right", "bottom", "top", "back", "front"}) {
        CHECK(box.boundary_facets(tag).size() == 8); // 2x2 faces, 2 triangles each
        total += box.boundary_facets(tag).size();
    }
    CHECK(total == 48);
}

TEST_CASE("facet normals point outward") {
    const Mesh mesh = generate_structured(1.0, 1.0, 2, 2);
    for (const Facet& f : mesh.boundary_facets("left"))
        CHECK(mesh.facet_normal(f).x() == doctest::Approx(-1.0));
    for (const Facet& f : mesh.boundary_facets("top"))
        CHECK(mesh.facet_normal(f).y() == doctest::Approx(1.0));
    const Mesh box = generate_structured(1.0, 1.0, 1.0, 1, 1, 1);
    for (const Facet& f : box.boundary_facets("front"))
        CHECK(box.facet_normal(f).z() == doctest::Approx(1.0));
}

TEST_CASE("element basis on the unit right triangle") {
    const Mesh mesh(2, {0, 0, 0, 1, 0, 0, 0, 1, 0}, {0, 1, 2});
    const ElementBasis basis = element_basis(mesh, 0);
    CHECK(basis.weight == doctest::Approx(0.5).epsilon(1e-14));
    for (int i = 0; i < 3; ++i) CHECK(basis.shape[i] == doctest::Approx(1.0 / 3.0));
    // gradient of the nodal x-coordinate is exactly (1, 0)
    double gx = 0, gy = 0;
    const double xs[3] = {0, 1, 0};
    for (int i = 0; i < 3; ++i) {
        gx += basis.grad(i, 0) * xs[i];
        gy += basis.grad(i, 1) * xs[i];
    }
    CHECK(gx == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gy == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("element basis rejects out-of-range ids") {
    const Mesh mesh = generate_structured(1.0, 1.0, 1, 1);
    CHECK_THROWS_AS(element_basis(mesh, -1), InvalidArgumentError);
    CHECK_THROWS_AS(element_basis(mesh, 2), InvalidArgumentError);
}

TEST_CASE("partition of unity and linear reproduction on random meshes") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unit(0.2, 3.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Mesh mesh = trial % 2 == 0
                              ? generate_structured(unit(rng), unit(rng), 3 + trial, 2 + trial)
                              : generate_structured(unit(rng), unit(rng), unit(rng), 2, 3, 2);
        // an affine field a + g . x must be reproduced exactly
        const Eigen::Vector3d g(0.3, -1.7, trial % 2 == 0 ? 0.0 : 0.9);
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const ElementBasis basis = element_basis(mesh, e);
            double sum = 0.0;
            Eigen::Vector3d grad = Eigen::Vector3d::Zero();
            for (int i = 0; i <= mesh.dim(); ++i) {
                sum += basis.shape[i];
                const double nodal = 2.5 + g.dot(mesh.node(mesh.element(e)[i]));
                grad += basis.grad.row(i).transpose() * nodal;
            }
            CHECK(std::abs(sum - 1.0) < 1e-12);
            CHECK((grad - g).head(mesh.dim()).norm() < 1e-10);
        }
    }
}

TEST_CASE("rigid translation produces zero strain") {
    const Mesh mesh = generate_structured(2.0, 1.0, 3, 2);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementBasis basis = element_basis(mesh, e);
        // u = (0.7, -0.3) at every node -> grad u = 0
        Eigen::Matrix2d grad_u = Eigen::Matrix2d::Zero();
        for (int i = 0; i < 3; ++i) {
            grad_u(0, 0) += 0.7 * basis.grad(i, 0);
            grad_u(0, 1) += 0.7 * basis.grad(i, 1);
            grad_u(1, 0) += -0.3 * basis.grad(i, 0);
            grad_u(1, 1) += -0.3 * basis.grad(i, 1);
        }
        CHECK(grad_u.cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("mesh import of a two-triangle square") {
    const std::string path = write_temp("square.msh",
                                        "dim 2\n"
                                        "nodes 4\n0 0\n1 0\n1 1\n0 1\n"
                                        "elements 2\n0 1 2\n0 2 3\n"
                                        "facets 4\nbottom 0 1\nright 1 2\ntop 2 3\nleft 3 0\n");
    const Mesh mesh = import_mesh(path);
    CHECK(mesh.num_nodes() == 4);
    CHECK(mesh.num_elements() == 2);
    CHECK(mesh.total_measure() == doctest::Approx(1.0));
    CHECK(mesh.boundary_facets("left").size() == 1);
}

TEST_CASE("mesh import rejects inverted elements") {
    const std::string path = write_temp("inverted.msh",
                                        "dim 2\n"
                                        "nodes 3\n0 0\n1 0\n0 1\n"
                                        "elements 1\n0 2 1\n");
    CHECK_THROWS_AS(import_mesh(path), InvalidGeometryError);
}

TEST_CASE("mesh import rejects dangling node indices") {
    const std::string path = write_temp("dangling.msh",
                                        "dim 2\n"
                                        "nodes 3\n0 0\n1 0\n0 1\n"
                                        "elements 1\n0 1 5\n");
    try {
        import_mesh(path);
        FAIL("expected MalformedFileError");
    } catch (const MalformedFileError& e) {
        CHECK(e.line() == 7);
    }
}

TEST_CASE("mesh save and import round trip") {
    const Mesh mesh = generate_structured(1.5, 1.0, 3, 2);
    save_mesh(mesh, "/tmp/roundtrip.msh");
    const Mesh copy = import_mesh("/tmp/roundtrip.msh");
    REQUIRE(copy.num_nodes() == mesh.num_nodes());
    REQUIRE(copy.num_elements() == mesh.num_elements());
    for (int i = 0; i < mesh.num_nodes(); ++i)
        CHECK((copy.node(i) - mesh.node(i)).norm() == 0.0);
    CHECK(copy.boundary().size() == mesh.boundary().size());
    for (const auto& [tag, facets] : mesh.boundary())
        CHECK(copy.boundary_facets(tag).size() == facets.size());
}

TEST_CASE("locate and interpolate") {
    const Mesh mesh = generate_structured(2.0, 2.0, 4, 4);
    Eigen::VectorXd field(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i) field[i] = 1.0 + 2.0 * mesh.node(i).x() - mesh.node(i).y();
    // linear fields interpolate exactly anywhere
    CHECK(mesh.interpolate(field, Vec(0.73, 1.21, 0.0)) ==
          doctest::Approx(1.0 + 2.0 * 0.73 - 1.21).epsilon(1e-13));
    // nodal point returns the nodal value
    CHECK(mesh.interpolate(field, mesh.node(7)) == doctest::Approx(field[7]));
    CHECK(mesh.locate(Vec(-0.5, 0.5, 0.0)) == -1);
    CHECK_THROWS_AS(mesh.interpolate(field, Vec(5.0, 5.0, 0.0)), InvalidArgumentError);
}
