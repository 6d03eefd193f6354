#ifndef CMM_FEM_HPP
#define CMM_FEM_HPP

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "cmm/fields.hpp"
#include "cmm/mesh.hpp"
#include "cmm/solver.hpp"
#include "cmm/sparse.hpp"

namespace cmm {

using AnalyticScalar = std::function<double(Vec2, double)>;
using AnalyticVector = std::function<Vec2(Vec2, double)>;

/// Constant gradients of the three P1 basis functions on a triangle.
inline std::array<Vec2, 3> p1_gradients(const Vec2& a, const Vec2& b, const Vec2& c,
                                        double* area_out = nullptr) {
    const double area2 = cross(b - a, c - a);
    if (area_out) *area_out = 0.5 * area2;
    return {rot_cw(b - c) / area2, rot_cw(c - a) / area2, rot_cw(a - b) / area2};
}

/// Gradient of a P1 scalar field on one triangle.
inline Vec2 p1_gradient_on(const Mesh& m, const ScalarField& u, int tri) {
    const Triangle& t = m.triangles()[static_cast<std::size_t>(tri)];
    const auto g = p1_gradients(m.node(t.a), m.node(t.b), m.node(t.c));
    return g[0] * u[t.a] + g[1] * u[t.b] + g[2] * u[t.c];
}

/// Laplace stiffness matrix; integrands are exact for P1 fields. With
/// components == 2 the result is the block-diagonal vector operator on
/// interleaved dofs (2i, 2i+1).
inline CsrMatrix assemble_stiffness(const Mesh& m, int components = 1) {
    if (components != 1 && components != 2)
        throw std::invalid_argument("assemble_stiffness: components must be 1 or 2");
    std::vector<CsrMatrix::Triplet> trips;
    trips.reserve(static_cast<std::size_t>(m.triangle_count()) * 9 *
                  static_cast<std::size_t>(components));
    for (const Triangle& t : m.triangles()) {
        double area = 0.0;
        const auto g = p1_gradients(m.node(t.a), m.node(t.b), m.node(t.c), &area);
        const int idx[3] = {t.a, t.b, t.c};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double v = area * dot(g[static_cast<std::size_t>(i)],
                                            g[static_cast<std::size_t>(j)]);
                for (int c = 0; c < components; ++c)
                    trips.push_back({components * idx[i] + c, components * idx[j] + c, v});
            }
    }
    return CsrMatrix::from_triplets(components * m.node_count(), trips);
}

/// Boundary mass matrix on edges with the given label. Exact for products of
/// P1 traces: per edge of length L the local block is (L/6)[[2,1],[1,2]].
inline CsrMatrix assemble_boundary_mass(const Mesh& m, BoundaryLabel label,
                                        int components = 1) {
    if (components != 1 && components != 2)
        throw std::invalid_argument("assemble_boundary_mass: components must be 1 or 2");
    std::vector<CsrMatrix::Triplet> trips;
    for (int id : m.edge_ids(label)) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
        const double L = m.edge_length(id);
        const int idx[2] = {e.a, e.b};
        const double local[2][2] = {{L / 3.0, L / 6.0}, {L / 6.0, L / 3.0}};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int c = 0; c < components; ++c)
                    trips.push_back({components * idx[i] + c, components * idx[j] + c,
                                     local[i][j]});
    }
    return CsrMatrix::from_triplets(components * m.node_count(), trips);
}

/// Load vector of P0 per-free-edge vector data against P1 vector test
/// functions: an edge of length L with value v sends (L/2) v to each endpoint.
/// Interleaved layout (2i, 2i+1).
inline std::vector<double> assemble_p0_boundary_load(const Mesh& m,
                                                     const EdgeField<Vec2>& data) {
    if (data.size() != m.free_edge_count())
        throw std::invalid_argument("assemble_p0_boundary_load: edge field size mismatch");
    std::vector<double> load(static_cast<std::size_t>(2 * m.node_count()), 0.0);
    const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
    for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
        const double half = 0.5 * m.edge_length(ids[static_cast<std::size_t>(k)]);
        const Vec2 v = data[k];
        load[static_cast<std::size_t>(2 * e.a)] += half * v.x;
        load[static_cast<std::size_t>(2 * e.a) + 1] += half * v.y;
        load[static_cast<std::size_t>(2 * e.b)] += half * v.x;
        load[static_cast<std::size_t>(2 * e.b) + 1] += half * v.y;
    }
    return load;
}

/// Volume load of a P1-interpolated source: exact integration of f_h phi_i.
inline std::vector<double> assemble_volume_load(const Mesh& m, const ScalarField& f) {
    if (f.size() != m.node_count())
        throw std::invalid_argument("assemble_volume_load: field size mismatch");
    std::vector<double> load(static_cast<std::size_t>(m.node_count()), 0.0);
    for (const Triangle& t : m.triangles()) {
        const double area =
            triangle_signed_area(m.node(t.a), m.node(t.b), m.node(t.c));
        const int idx[3] = {t.a, t.b, t.c};
        for (int i = 0; i < 3; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 3; ++j) acc += (i == j ? 2.0 : 1.0) * f[idx[j]];
            load[static_cast<std::size_t>(idx[i])] += area / 12.0 * acc;
        }
    }
    return load;
}

/// Boundary load of a P1-interpolated trace against P1 tests on labeled
/// edges (the edge mass matrix applied to nodal data).
inline std::vector<double> assemble_boundary_trace_load(const Mesh& m, BoundaryLabel label,
                                                        const ScalarField& g) {
    if (g.size() != m.node_count())
        throw std::invalid_argument("assemble_boundary_trace_load: field size mismatch");
    std::vector<double> load(static_cast<std::size_t>(m.node_count()), 0.0);
    for (int id : m.edge_ids(label)) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
        const double L = m.edge_length(id);
        load[static_cast<std::size_t>(e.a)] += L / 6.0 * (2.0 * g[e.a] + g[e.b]);
        load[static_cast<std::size_t>(e.b)] += L / 6.0 * (g[e.a] + 2.0 * g[e.b]);
    }
    return load;
}

inline ScalarField interpolate(const Mesh& m, const AnalyticScalar& f, double t) {
    ScalarField out(m.node_count());
    for (int i = 0; i < m.node_count(); ++i) out[i] = f(m.node(i), t);
    return out;
}

inline VectorField interpolate(const Mesh& m, const AnalyticVector& f, double t) {
    VectorField out(m.node_count());
    for (int i = 0; i < m.node_count(); ++i) out[i] = f(m.node(i), t);
    return out;
}

/// Scalar state solve: -Laplace u = f with u = 0 on the free boundary and,
/// on the fixed boundary, either the Neumann flux q_B imposed weakly
/// (alpha = 1) or the Dirichlet value q_B imposed strongly (alpha = 0).
/// f and q_B enter as P1 nodal interpolants.
inline ScalarField solve_state(const Mesh& m, const ScalarField& f, const ScalarField& q_B,
                               int alpha) {
    if (alpha != 0 && alpha != 1)
        throw std::invalid_argument("solve_state: alpha must be 0 or 1");
    LinearSystem sys;
    sys.matrix = assemble_stiffness(m, 1);
    sys.rhs = assemble_volume_load(m, f);
    if (alpha == 1) {
        const std::vector<double> qload =
            assemble_boundary_trace_load(m, BoundaryLabel::Fixed, q_B);
        for (std::size_t i = 0; i < sys.rhs.size(); ++i) sys.rhs[i] += qload[i];
    } else {
        for (int i : m.boundary_nodes(BoundaryLabel::Fixed))
            sys.constrained_dofs.push_back({i, q_B[i]});
    }
    for (int i : m.boundary_nodes(BoundaryLabel::Free))
        sys.constrained_dofs.push_back({i, 0.0});
    const std::vector<double> x = solve_linear(sys);
    ScalarField u(m.node_count());
    u.values = x;
    return u;
}

inline ScalarField solve_state(const Mesh& m, const AnalyticScalar& f,
                               const AnalyticScalar& q_B, int alpha, double t) {
    return solve_state(m, interpolate(m, f, t), interpolate(m, q_B, t), alpha);
}

} // namespace cmm

#endif
