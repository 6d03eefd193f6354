#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "cmm/curve.hpp"
#include "cmm/mesh.hpp"
#include "cmm/meshgen.hpp"
#include "property_checks.hpp"

using namespace cmm;

namespace {

Mesh single_triangle(Vec2 a, Vec2 b, Vec2 c,
                     BoundaryLabel l01 = BoundaryLabel::Free,
                     BoundaryLabel l12 = BoundaryLabel::Free,
                     BoundaryLabel l20 = BoundaryLabel::Free) {
    return Mesh({a, b, c}, {{0, 1, 2}}, {{0, 1, l01}, {1, 2, l12}, {2, 0, l20}});
}

} // namespace

TEST_CASE("annulus generation places nodes between the circles", "[mesh]") {
    const double h = 0.1;
    const Mesh m = generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                         Curve::circle({0, 0}, 0.5), h);
    REQUIRE_NOTHROW(validate_mesh(m));
    for (const Vec2& p : m.nodes()) {
        const double r = norm(p);
        REQUIRE(r >= 0.5 - h * h / 2.0);
        REQUIRE(r <= 1.0 + 1e-12);
    }
    // fixed edges approximate the inner boundary, free edges the outer
    for (const BoundaryEdge& e : m.boundary_edges()) {
        const double r = norm(m.node(e.a));
        if (e.label == BoundaryLabel::Fixed)
            REQUIRE(std::abs(r - 0.5) < 1e-12);
        else
            REQUIRE(std::abs(r - 1.0) < 1e-12);
    }
    const QualityReport q = mesh_quality(m);
    REQUIRE(q.min_signed_area > 0.0);
    REQUIRE(q.min_angle > 0.3);  // healthy elements, not slivers
    REQUIRE(q.max_free_edge < 1.5 * h);
}

TEST_CASE("ellipse-circle annulus meshes cleanly", "[mesh]") {
    const Mesh m = generate_annulus_mesh(Curve::ellipse(std::sqrt(2.0), 1.0),
                                         Curve::circle({0, 0}, 0.5), 0.1);
    REQUIRE_NOTHROW(validate_mesh(m));
    // outer nodes satisfy x^2/2 + y^2 = 1
    for (int i : m.boundary_nodes(BoundaryLabel::Free)) {
        const Vec2 p = m.node(i);
        REQUIRE(std::abs(0.5 * p.x * p.x + p.y * p.y - 1.0) < 1e-12);
    }
}

TEST_CASE("every boundary edge belongs to exactly one triangle", "[mesh][properties]") {
    const Mesh m = generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                         Curve::circle({0, 0}, 0.5), 0.15);
    for (int id = 0; id < m.boundary_edge_count(); ++id) {
        const int t = m.edge_triangle(id);
        REQUIRE(t >= 0);
        REQUIRE(t < m.triangle_count());
    }
}

TEST_CASE("generation rejects unmeshable and intersecting inputs", "[mesh]") {
    // h larger than the annulus gap
    REQUIRE_THROWS_AS(generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                            Curve::circle({0, 0}, 0.5), 0.6),
                      std::invalid_argument);
    // inner pokes through outer
    REQUIRE_THROWS_AS(generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                            Curve::ellipse(1.4, 0.4), 0.05),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                            Curve::circle({0, 0}, 0.5), -0.1),
                      std::invalid_argument);
}

TEST_CASE("move_mesh with zero velocity is the identity", "[mesh]") {
    const Mesh m = generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                         Curve::circle({0, 0}, 0.5), 0.2);
    const MoveResult r = move_mesh(m, VectorField(m.node_count()), 0.37);
    REQUIRE_FALSE(r.inverted);
    for (int i = 0; i < m.node_count(); ++i) REQUIRE(r.mesh.node(i) == m.node(i));
}

TEST_CASE("move_mesh translates non-fixed nodes by tau*w", "[mesh]") {
    const Mesh m = generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                         Curve::circle({0, 0}, 0.5), 0.2);
    VectorField w(m.node_count());
    for (int i = 0; i < m.node_count(); ++i)
        if (!m.node_on(i, BoundaryLabel::Fixed)) w[i] = {1.0, 0.0};
    const MoveResult r = move_mesh(m, w, 0.1);
    for (int i = 0; i < m.node_count(); ++i) {
        if (m.node_on(i, BoundaryLabel::Fixed)) {
            REQUIRE(r.mesh.node(i) == m.node(i));
        } else {
            REQUIRE(r.mesh.node(i).x == Catch::Approx(m.node(i).x + 0.1).margin(1e-15));
            REQUIRE(r.mesh.node(i).y == m.node(i).y);
        }
    }
}

TEST_CASE("move_mesh flags inverted elements instead of throwing", "[mesh]") {
    // thin triangle; pushing the apex through the base inverts it
    const Mesh m = single_triangle({0, 0}, {1, 0}, {0.5, 0.1}, BoundaryLabel::Fixed,
                                   BoundaryLabel::Free, BoundaryLabel::Free);
    VectorField w(3);
    w[2] = {0.0, -1.0};
    const MoveResult r = move_mesh(m, w, 0.5);
    REQUIRE(r.inverted);
    REQUIRE(r.first_inverted_triangle == 0);
    // small motion stays valid
    REQUIRE_FALSE(move_mesh(m, w, 0.05).inverted);
}

TEST_CASE("move_mesh rejects velocity on fixed nodes", "[mesh]") {
    const Mesh m = single_triangle({0, 0}, {1, 0}, {0.5, 1}, BoundaryLabel::Fixed);
    VectorField w(3);
    w[0] = {1e-9, 0};
    REQUIRE_THROWS_AS(move_mesh(m, w, 1.0), std::invalid_argument);
}

TEST_CASE("move_mesh affinity and composition", "[mesh][properties]") {
    const auto r = cmm_tests::check_move_mesh_affinity();
    INFO(r.detail);
    REQUIRE(r.ok);
}

TEST_CASE("mesh quality of canonical triangles", "[mesh]") {
    SECTION("equilateral") {
        const Mesh m = single_triangle({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0});
        REQUIRE(mesh_quality(m).min_angle ==
                Catch::Approx(std::numbers::pi / 3.0).epsilon(1e-12));
    }
    SECTION("right isoceles") {
        const Mesh m = single_triangle({0, 0}, {1, 0}, {0, 1});
        const QualityReport q = mesh_quality(m);
        REQUIRE(q.min_angle == Catch::Approx(std::numbers::pi / 4.0).epsilon(1e-12));
        REQUIRE(q.min_signed_area == Catch::Approx(0.5).epsilon(1e-15));
    }
    SECTION("collinear nodes give zero area") {
        const Mesh m = single_triangle({0, 0}, {1, 0}, {2, 0});
        REQUIRE(mesh_quality(m).min_signed_area == 0.0);
    }
}

TEST_CASE("validation rejects flipped boundary edge orientation", "[mesh][properties]") {
    REQUIRE_NOTHROW(validate_mesh(single_triangle({0, 0}, {1, 0}, {0.5, 1})));
    // flipping one edge breaks the domain-left rule
    Mesh bad({{0, 0}, {1, 0}, {0.5, 1}}, {{0, 1, 2}},
             {{1, 0, BoundaryLabel::Free},  // reversed
              {1, 2, BoundaryLabel::Free},
              {2, 0, BoundaryLabel::Free}});
    REQUIRE_THROWS_AS(validate_mesh(bad), std::runtime_error);
}

TEST_CASE("validation rejects inverted triangles", "[mesh]") {
    Mesh bad({{0, 0}, {1, 0}, {0.5, 1}}, {{0, 2, 1}},
             {{0, 2, BoundaryLabel::Free},
              {2, 1, BoundaryLabel::Free},
              {1, 0, BoundaryLabel::Free}});
    REQUIRE_THROWS_AS(validate_mesh(bad), std::runtime_error);
}

TEST_CASE("rounded polygon stays tangent to the sharp edges", "[mesh]") {
    const Curve c = Curve::lshape(0.25, 0.05);
    const auto poly = c.sample(0.02);
    REQUIRE(poly.size() > 20);
    // every sampled point is inside the sharp L's bounding box and outside
    // the trimmed corner vertex
    for (const Vec2& p : poly) {
        REQUIRE(p.x >= -0.25 - 1e-12);
        REQUIRE(p.y >= -0.25 - 1e-12);
        REQUIRE(p.x <= 0.25 + 1e-12);
        REQUIRE(p.y <= 0.25 + 1e-12);
    }
    // corners got rounded: the sharp vertex (-0.25,-0.25) is not reached
    double closest = 1e9;
    for (const Vec2& p : poly) closest = std::min(closest, norm(p - Vec2{-0.25, -0.25}));
    REQUIRE(closest > 0.01);
}
