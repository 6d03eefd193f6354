// Shared property checks: pure functions, no simulation, independent
// hand-computed oracles. Used by the unit suite and by the acceptance
// runner's standalone-properties criterion.
#ifndef CMM_TESTS_PROPERTY_CHECKS_HPP
#define CMM_TESTS_PROPERTY_CHECKS_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cmm/curve.hpp"
#include "cmm/fem.hpp"
#include "cmm/geometry.hpp"
#include "cmm/levelset.hpp"
#include "cmm/meshgen.hpp"

namespace cmm_tests {

struct CheckResult {
    bool ok = true;
    std::string detail;

    void fail(const std::string& msg) {
        ok = false;
        if (!detail.empty()) detail += "; ";
        detail += msg;
    }
};

/// Stiffness symmetry and constants-in-kernel on a generated annulus.
inline CheckResult check_stiffness_properties() {
    using namespace cmm;
    CheckResult r;
    const Mesh m = generate_annulus_mesh(Curve::ellipse(std::sqrt(2.0), 1.0),
                                         Curve::circle({0, 0}, 0.5), 0.15);
    const CsrMatrix K = assemble_stiffness(m, 1);
    if (K.asymmetry() > 1e-12) r.fail("stiffness not symmetric");
    double worst_row = 0.0;
    for (int i = 0; i < K.rows(); ++i) worst_row = std::max(worst_row, std::abs(K.row_sum(i)));
    if (worst_row > 1e-12) r.fail("stiffness row sums not zero");
    // K c = 0 for constant fields
    const std::vector<double> ones(static_cast<std::size_t>(K.rows()), 3.25);
    for (double v : K.multiply(ones))
        if (std::abs(v) > 1e-12) {
            r.fail("constants not in stiffness kernel");
            break;
        }
    return r;
}

/// Boundary mass exactness: local edge matrix and total-measure identity.
inline CheckResult check_boundary_mass_exactness() {
    using namespace cmm;
    CheckResult r;
    {
        // single triangle, free edge (0,0)->(1,0) of length 1
        Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
               {{0, 1, BoundaryLabel::Free},
                {1, 2, BoundaryLabel::Fixed},
                {2, 0, BoundaryLabel::Fixed}});
        const CsrMatrix M = assemble_boundary_mass(m, BoundaryLabel::Free, 1);
        if (std::abs(M.coeff(0, 0) - 1.0 / 3.0) > 1e-15 ||
            std::abs(M.coeff(0, 1) - 1.0 / 6.0) > 1e-15 ||
            std::abs(M.coeff(1, 1) - 1.0 / 3.0) > 1e-15)
            r.fail("unit edge local mass matrix wrong");
        if (std::abs(M.coeff(2, 2)) > 0.0) r.fail("mass leaked to non-free node");
    }
    {
        const Mesh m = generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                             Curve::circle({0, 0}, 0.5), 0.2);
        const CsrMatrix M = assemble_boundary_mass(m, BoundaryLabel::Free, 1);
        const std::vector<double> ones(static_cast<std::size_t>(m.node_count()), 1.0);
        double total = 0.0;
        for (double v : M.multiply(ones)) total += v;
        if (std::abs(total - boundary_length(m, BoundaryLabel::Free)) > 1e-12)
            r.fail("1^T M 1 != |Gamma_h|");
        // field vanishing on the free boundary is annihilated
        std::vector<double> v(static_cast<std::size_t>(m.node_count()), 0.0);
        for (int i = 0; i < m.node_count(); ++i)
            if (!m.node_on(i, BoundaryLabel::Free)) v[static_cast<std::size_t>(i)] = 2.0 + i;
        for (double y : M.multiply(v))
            if (std::abs(y) > 1e-13) {
                r.fail("mass did not annihilate field vanishing on Gamma");
                break;
            }
    }
    return r;
}

/// P0 boundary load formula (L/2 per endpoint) and additivity.
inline CheckResult check_p0_load_formula() {
    using namespace cmm;
    CheckResult r;
    {
        Mesh m({{0, 0}, {2, 0}, {0, 2}}, {{0, 1, 2}},
               {{0, 1, BoundaryLabel::Free},
                {1, 2, BoundaryLabel::Fixed},
                {2, 0, BoundaryLabel::Fixed}});
        EdgeField<Vec2> e(1, Vec2{3, 0});
        const std::vector<double> load = assemble_p0_boundary_load(m, e);
        if (std::abs(load[0] - 3.0) > 1e-14 || std::abs(load[2] - 3.0) > 1e-14 ||
            std::abs(load[1]) > 0.0 || std::abs(load[3]) > 0.0)
            r.fail("edge of length 2, value (3,0): endpoints must receive (3,0)");
    }
    {
        // two free edges sharing node 1: lengths 1 and sqrt(2)
        Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}},
               {{0, 1, BoundaryLabel::Free},
                {1, 2, BoundaryLabel::Free},
                {2, 0, BoundaryLabel::Fixed}});
        EdgeField<Vec2> e(2);
        e[0] = {1, 2};
        e[1] = {-3, 5};
        const std::vector<double> load = assemble_p0_boundary_load(m, e);
        const double L2 = std::sqrt(2.0);
        if (std::abs(load[2] - (1.0 * 1 + L2 * -3) / 2.0) > 1e-14 ||
            std::abs(load[3] - (1.0 * 2 + L2 * 5) / 2.0) > 1e-14)
            r.fail("shared node must receive (L1 v1 + L2 v2)/2");
        EdgeField<Vec2> zero(2, Vec2{0, 0});
        for (double v : assemble_p0_boundary_load(m, zero))
            if (v != 0.0) r.fail("zero data must give zero load");
    }
    return r;
}

/// Outward normal orientation on axis-aligned edges and circle polygons.
inline CheckResult check_normal_orientation() {
    using namespace cmm;
    CheckResult r;
    {
        Mesh m({{0, 0}, {1, 0}, {0.5, 1}}, {{0, 1, 2}},
               {{0, 1, BoundaryLabel::Free},
                {1, 2, BoundaryLabel::Fixed},
                {2, 0, BoundaryLabel::Fixed}});
        const EdgeField<Vec2> nu = edge_normals(m);
        if (norm(nu[0] - Vec2{0, -1}) > 1e-15)
            r.fail("horizontal edge with domain above: normal must be (0,-1)");
    }
    {
        const Mesh m = generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                             Curve::circle({0, 0}, 0.5), 0.1);
        const EdgeField<Vec2> nu = edge_normals(m);
        const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
        for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
            if (std::abs(norm(nu[k]) - 1.0) > 1e-14) {
                r.fail("normal not unit");
                break;
            }
            const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
            const Vec2 mid = (m.node(e.a) + m.node(e.b)) * 0.5;
            if (dot(nu[k], mid) < 0.9) {  // radial to O(h^2)
                r.fail("circle normal deviates from radial direction");
                break;
            }
        }
    }
    return r;
}

/// move_mesh is affine in tau and composition-consistent.
inline CheckResult check_move_mesh_affinity() {
    using namespace cmm;
    CheckResult r;
    const Mesh m = generate_annulus_mesh(Curve::circle({0, 0}, 1.0),
                                         Curve::circle({0, 0}, 0.5), 0.2);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorField w(m.node_count());
    for (int i = 0; i < m.node_count(); ++i)
        w[i] = m.node_on(i, BoundaryLabel::Fixed) ? Vec2{0, 0} : Vec2{u(rng), u(rng)};

    const double tau = 0.03, a = 2.5;
    const Mesh m1 = move_mesh(m, w, tau).mesh;
    const Mesh m2 = move_mesh(m, w, a * tau).mesh;
    for (int i = 0; i < m.node_count(); ++i) {
        const Vec2 lhs = m2.node(i) - m.node(i);
        const Vec2 rhs = (m1.node(i) - m.node(i)) * a;
        if (norm(lhs - rhs) > 1e-14) {
            r.fail("motion not affine in tau");
            break;
        }
    }
    const Mesh m3 = move_mesh(m1, VectorField(m.node_count()), 0.7).mesh;
    for (int i = 0; i < m.node_count(); ++i)
        if (!(m3.node(i) == m1.node(i))) {
            r.fail("moving by zero after w changed coordinates");
            break;
        }
    for (int i : m.boundary_nodes(BoundaryLabel::Fixed))
        if (!(m1.node(i) == m.node(i))) {
            r.fail("fixed node moved");
            break;
        }
    if (m1.triangle_count() != m.triangle_count() ||
        m1.boundary_edge_count() != m.boundary_edge_count())
        r.fail("connectivity changed");
    return r;
}

/// Analytic derivatives of every shipped level set against central
/// finite differences at random space-time samples.
inline CheckResult check_levelset_derivatives() {
    using namespace cmm;
    CheckResult r;
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> ux(-1.3, 1.3);
    const double fd = 1e-5;
    const LevelSet sets[] = {expanding_ellipse_levelset(), shrinking_circle_levelset(),
                             circle_levelset(0.8)};
    for (const LevelSet& ls : sets) {
        std::uniform_real_distribution<double> ut(ls.t_min, ls.t_max);
        for (int s = 0; s < 100; ++s) {
            const Vec2 x{ux(rng), ux(rng)};
            const double t = ut(rng);
            auto phi = [&](Vec2 y, double tt) { return ls.phi(y, tt); };
            const Vec2 g = ls.grad(x, t);
            const Vec2 g_fd{(phi({x.x + fd, x.y}, t) - phi({x.x - fd, x.y}, t)) / (2 * fd),
                            (phi({x.x, x.y + fd}, t) - phi({x.x, x.y - fd}, t)) / (2 * fd)};
            const double scale = std::max(1.0, norm(g));
            if (norm(g - g_fd) / scale > 1e-6) {
                r.fail("gradient mismatch vs finite differences");
                return r;
            }
            const double pt = ls.dphi_dt(x, t);
            const double pt_fd = (phi(x, t + fd) - phi(x, t - fd)) / (2 * fd);
            if (std::abs(pt - pt_fd) / std::max(1.0, std::abs(pt)) > 1e-6) {
                r.fail("time derivative mismatch");
                return r;
            }
            const Mat2 H = ls.hess(x, t);
            const Vec2 gpx = ls.grad({x.x + fd, x.y}, t), gmx = ls.grad({x.x - fd, x.y}, t);
            const Vec2 gpy = ls.grad({x.x, x.y + fd}, t), gmy = ls.grad({x.x, x.y - fd}, t);
            const double hxx = (gpx.x - gmx.x) / (2 * fd);
            const double hxy = (gpy.x - gmy.x) / (2 * fd);
            const double hyy = (gpy.y - gmy.y) / (2 * fd);
            if (std::abs(H.xx - hxx) > 1e-6 || std::abs(H.xy - hxy) > 1e-6 ||
                std::abs(H.yy - hyy) > 1e-6) {
                r.fail("hessian mismatch");
                return r;
            }
        }
    }
    return r;
}

inline std::vector<std::pair<std::string, CheckResult>> run_all_property_checks() {
    return {{"stiffness symmetry/kernel", check_stiffness_properties()},
            {"boundary-mass exactness", check_boundary_mass_exactness()},
            {"P0-load formula", check_p0_load_formula()},
            {"normal orientation", check_normal_orientation()},
            {"move_mesh affinity", check_move_mesh_affinity()},
            {"level-set derivative cross-checks", check_levelset_derivatives()}};
}

} // namespace cmm_tests

#endif
