#ifndef CMM_FLOW_HPP
#define CMM_FLOW_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cmm/fem.hpp"
#include "cmm/fields.hpp"
#include "cmm/geometry.hpp"
#include "cmm/mesh.hpp"
#include "cmm/solver.hpp"

namespace cmm {

enum class FlowKind { HeleShaw, Bernoulli, Mcf, McfForced };

/// Data of one moving boundary problem. Hele-Shaw and Bernoulli runs drive
/// the boundary with the state gradient; the curvature-flow kinds skip the
/// state solve entirely and use the weak curvature load instead.
struct FlowSpec {
    FlowKind kind = FlowKind::HeleShaw;
    AnalyticScalar f;         // volume source
    AnalyticScalar q_B;       // fixed-boundary data (flux or Dirichlet value)
    AnalyticVector gamma;     // background advection, sampled at edge midpoints
    AnalyticScalar g;         // curvature-flow forcing (McfForced)
    double lambda = 0.0;
    int alpha = 1;

    bool needs_state() const {
        return kind == FlowKind::HeleShaw || kind == FlowKind::Bernoulli;
    }
};

struct StepDiagnostics {
    int k = 0;
    double t = 0.0;
    double area = 0.0;
    double boundary_length = 0.0;
    double min_angle = 0.0;
    double min_area = 0.0;
    double stationarity_residual = 0.0;  // NaN for curvature-flow runs
};

struct SimulationState {
    int k = 0;
    double time = 0.0;
    Mesh mesh;
    ScalarField u;   // last state solve (empty for curvature flow)
    VectorField w;   // last extension
};

class InvertedElementError : public std::runtime_error {
public:
    InvertedElementError(int step_index, const QualityReport& quality)
        : std::runtime_error("inverted element at step " + std::to_string(step_index) +
                             " (min angle " + std::to_string(quality.min_angle) +
                             ", min area " + std::to_string(quality.min_signed_area) + ")"),
          step_index(step_index),
          quality(quality) {}
    int step_index;
    QualityReport quality;
};

/// Normal derivative of a P1 field on each free edge, from the adjacent
/// triangle's constant gradient.
inline EdgeField<double> edge_flux(const Mesh& m, const ScalarField& u) {
    const EdgeField<Vec2> normals = edge_normals(m);
    EdgeField<double> out(m.free_edge_count());
    const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
    for (int k = 0; k < static_cast<int>(ids.size()); ++k)
        out[k] = dot(p1_gradient_on(m, u, m.edge_triangle(ids[static_cast<std::size_t>(k)])),
                     normals[k]);
    return out;
}

/// P0 normal velocity V = (-grad u + gamma) . nu + lambda per free edge;
/// gamma is sampled at edge midpoints at time t.
inline EdgeField<double> normal_velocity(const Mesh& m, const ScalarField& u,
                                         const AnalyticVector& gamma, double lambda,
                                         double t) {
    const EdgeField<Vec2> normals = edge_normals(m);
    EdgeField<double> out(m.free_edge_count());
    const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
    for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
        const int id = ids[static_cast<std::size_t>(k)];
        const Vec2 grad_u = p1_gradient_on(m, u, m.edge_triangle(id));
        Vec2 drive = -grad_u;
        if (gamma) {
            const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
            const Vec2 mid = (m.node(e.a) + m.node(e.b)) * 0.5;
            drive += gamma(mid, t);
        }
        out[k] = dot(drive, normals[k]) + lambda;
    }
    return out;
}

/// K + (1/eps) M_Gamma on scalar nodal dofs, assembled in one pass.
inline CsrMatrix assemble_robin_matrix(const Mesh& m, double eps) {
    std::vector<CsrMatrix::Triplet> trips;
    trips.reserve(static_cast<std::size_t>(m.triangle_count()) * 9 +
                  static_cast<std::size_t>(m.free_edge_count()) * 4);
    for (const Triangle& t : m.triangles()) {
        double area = 0.0;
        const auto g = p1_gradients(m.node(t.a), m.node(t.b), m.node(t.c), &area);
        const int idx[3] = {t.a, t.b, t.c};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.push_back({idx[i], idx[j],
                                 area * dot(g[static_cast<std::size_t>(i)],
                                            g[static_cast<std::size_t>(j)])});
    }
    for (int id : m.edge_ids(BoundaryLabel::Free)) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
        const double L = m.edge_length(id);
        trips.push_back({e.a, e.a, L / (3.0 * eps)});
        trips.push_back({e.b, e.b, L / (3.0 * eps)});
        trips.push_back({e.a, e.b, L / (6.0 * eps)});
        trips.push_back({e.b, e.a, L / (6.0 * eps)});
    }
    return CsrMatrix::from_triplets(m.node_count(), trips);
}

/// Robin-regularized harmonic extension of a boundary functional: solves
/// (grad w, grad phi) + (1/eps)(w, phi)_Gamma = rhs(phi) with w = 0 strongly
/// on the fixed boundary. The vector operator decouples per component, so
/// both components are solved against the same scalar matrix. rhs is
/// interleaved (2i, 2i+1).
inline VectorField extend_from_load(const Mesh& m, double eps,
                                    const std::vector<double>& rhs_interleaved) {
    if (!(eps > 0.0)) throw std::invalid_argument("extension: eps must be positive");
    const CsrMatrix A = assemble_robin_matrix(m, eps);
    VectorField w(m.node_count());
    std::vector<double> rhs(static_cast<std::size_t>(m.node_count()));
    for (int comp = 0; comp < 2; ++comp) {
        for (int i = 0; i < m.node_count(); ++i)
            rhs[static_cast<std::size_t>(i)] =
                rhs_interleaved[static_cast<std::size_t>(2 * i + comp)];
        LinearSystem sys;
        sys.matrix = A;
        sys.rhs = rhs;
        for (int i : m.boundary_nodes(BoundaryLabel::Fixed))
            sys.constrained_dofs.push_back({i, 0.0});
        const std::vector<double> x = solve_linear(sys);
        for (int i = 0; i < m.node_count(); ++i) {
            if (comp == 0)
                w[i].x = x[static_cast<std::size_t>(i)];
            else
                w[i].y = x[static_cast<std::size_t>(i)];
        }
    }
    return w;
}

/// Smooth velocity extension of P0 boundary data V_n nu via the Robin
/// approximation eps grad w . nu + w = V_n nu on the free boundary.
inline VectorField extend_velocity(const Mesh& m, const EdgeField<double>& vn, double eps) {
    if (vn.size() != m.free_edge_count())
        throw std::invalid_argument("extend_velocity: edge field size mismatch");
    const EdgeField<Vec2> normals = edge_normals(m);
    EdgeField<Vec2> data(m.free_edge_count());
    for (int k = 0; k < vn.size(); ++k) data[k] = normals[k] * vn[k];
    std::vector<double> rhs = assemble_p0_boundary_load(m, data);
    for (double& v : rhs) v /= eps;
    return extend_from_load(m, eps, rhs);
}

/// Curvature-flow extension: the Robin right-hand side is the weak curvature
/// load -(1/eps) Int div_G phi ds, plus the P0 load of g nu when a forcing g
/// is present. No curvature value is ever computed.
inline VectorField extend_velocity_mcf(const Mesh& m, double eps, const AnalyticScalar& g,
                                       double t) {
    std::vector<double> rhs = tangential_divergence_load(m);
    for (double& v : rhs) v = -v / eps;
    if (g) {
        const EdgeField<Vec2> normals = edge_normals(m);
        EdgeField<Vec2> data(m.free_edge_count());
        const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
        for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
            const BoundaryEdge& e =
                m.boundary_edges()[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
            const Vec2 mid = (m.node(e.a) + m.node(e.b)) * 0.5;
            data[k] = normals[k] * g(mid, t);
        }
        const std::vector<double> gload = assemble_p0_boundary_load(m, data);
        for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += gload[i] / eps;
    }
    return extend_from_load(m, eps, rhs);
}

/// P0 L2(Gamma) norm of grad u . nu - lambda over the free boundary.
inline double stationarity_residual(const Mesh& m, const ScalarField& u, double lambda) {
    const EdgeField<double> flux = edge_flux(m, u);
    double acc = 0.0;
    const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
    for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
        const double d = flux[k] - lambda;
        acc += m.edge_length(ids[static_cast<std::size_t>(k)]) * d * d;
    }
    return std::sqrt(acc);
}

inline StepDiagnostics collect_diagnostics(const SimulationState& s, const FlowSpec& spec) {
    StepDiagnostics d;
    d.k = s.k;
    d.t = s.time;
    d.area = enclosed_area(s.mesh, BoundaryLabel::Free);
    d.boundary_length = boundary_length(s.mesh, BoundaryLabel::Free);
    const QualityReport q = mesh_quality(s.mesh);
    d.min_angle = q.min_angle;
    d.min_area = q.min_signed_area;
    d.stationarity_residual =
        spec.needs_state() && s.u.size() == s.mesh.node_count()
            ? stationarity_residual(s.mesh, s.u, spec.lambda)
            : std::numeric_limits<double>::quiet_NaN();
    return d;
}

/// One explicit step of the comoving mesh method: state solve (when the flow
/// has one), P0 normal velocity, Robin extension, node relocation. Throws
/// InvertedElementError when the moved mesh degenerates or the free boundary
/// crosses into the fixed region.
inline SimulationState step(const SimulationState& s, const FlowSpec& spec, double eps,
                            double tau) {
    SimulationState next;
    next.k = s.k + 1;
    next.time = s.time + tau;

    ScalarField u;
    VectorField w;
    if (spec.needs_state()) {
        if (!spec.f || !spec.q_B)
            throw std::invalid_argument("flow spec is missing state data (f, q_B)");
        u = solve_state(s.mesh, spec.f, spec.q_B, spec.alpha, s.time);
        const EdgeField<double> vn =
            normal_velocity(s.mesh, u, spec.gamma, spec.lambda, s.time);
        w = extend_velocity(s.mesh, vn, eps);
    } else {
        if (spec.kind == FlowKind::McfForced && !spec.g)
            throw std::invalid_argument("forced curvature flow needs a forcing g");
        w = extend_velocity_mcf(s.mesh, eps,
                                spec.kind == FlowKind::McfForced ? spec.g : AnalyticScalar{},
                                s.time);
    }

    MoveResult moved = move_mesh(s.mesh, w, tau);
    if (moved.inverted) throw InvertedElementError(next.k, mesh_quality(moved.mesh));

    // Topology guard: the free boundary must not cross into the fixed region.
    const auto fixed_segs = boundary_segments(moved.mesh, BoundaryLabel::Fixed);
    if (!fixed_segs.empty()) {
        for (int i : moved.mesh.boundary_nodes(BoundaryLabel::Free)) {
            if (point_inside(moved.mesh.node(i), fixed_segs))
                throw InvertedElementError(next.k, mesh_quality(moved.mesh));
        }
    }

    next.mesh = std::move(moved.mesh);
    next.u = std::move(u);
    next.w = std::move(w);
    return next;
}

/// Boundary mismatch of the Robin approximation against Dirichlet data g on
/// the free boundary: solves the pure Dirichlet vector problem to obtain the
/// discrete Neumann trace Lambda g (P0 per edge), solves the Robin problem
/// with the same data, and returns (|v_eps - g|_L2(Gamma), |Lambda g|_L2(Gamma)).
inline std::pair<double, double> robin_approximation_error(
    const Mesh& m, const std::function<Vec2(Vec2)>& g, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("robin_approximation_error: eps > 0");

    // Dirichlet solve, componentwise.
    const CsrMatrix K = assemble_stiffness(m, 1);
    VectorField v_dir(m.node_count());
    for (int comp = 0; comp < 2; ++comp) {
        LinearSystem sys;
        sys.matrix = K;
        sys.rhs.assign(static_cast<std::size_t>(m.node_count()), 0.0);
        for (int i : m.boundary_nodes(BoundaryLabel::Fixed))
            sys.constrained_dofs.push_back({i, 0.0});
        for (int i : m.boundary_nodes(BoundaryLabel::Free)) {
            const Vec2 gi = g(m.node(i));
            sys.constrained_dofs.push_back({i, comp == 0 ? gi.x : gi.y});
        }
        const std::vector<double> x = solve_linear(sys);
        for (int i = 0; i < m.node_count(); ++i)
            (comp == 0 ? v_dir[i].x : v_dir[i].y) = x[static_cast<std::size_t>(i)];
    }

    // Discrete Neumann trace per free edge from the adjacent triangle.
    const EdgeField<Vec2> normals = edge_normals(m);
    const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
    double neumann_sq = 0.0;
    for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
        const int id = ids[static_cast<std::size_t>(k)];
        const Triangle& tr = m.triangles()[static_cast<std::size_t>(m.edge_triangle(id))];
        const auto gr = p1_gradients(m.node(tr.a), m.node(tr.b), m.node(tr.c));
        Vec2 dvx{0, 0}, dvy{0, 0};
        const int idx[3] = {tr.a, tr.b, tr.c};
        for (int i = 0; i < 3; ++i) {
            dvx += gr[static_cast<std::size_t>(i)] * v_dir[idx[i]].x;
            dvy += gr[static_cast<std::size_t>(i)] * v_dir[idx[i]].y;
        }
        const Vec2 lam{dot(dvx, normals[k]), dot(dvy, normals[k])};
        neumann_sq += m.edge_length(id) * norm2(lam);
    }

    // Robin solve with the P1 trace of g as data: rhs = (1/eps) M_Gamma g.
    std::vector<double> rhs(static_cast<std::size_t>(2 * m.node_count()), 0.0);
    {
        ScalarField gx(m.node_count()), gy(m.node_count());
        for (int i : m.boundary_nodes(BoundaryLabel::Free)) {
            const Vec2 gi = g(m.node(i));
            gx[i] = gi.x;
            gy[i] = gi.y;
        }
        const std::vector<double> lx = assemble_boundary_trace_load(m, BoundaryLabel::Free, gx);
        const std::vector<double> ly = assemble_boundary_trace_load(m, BoundaryLabel::Free, gy);
        for (int i = 0; i < m.node_count(); ++i) {
            rhs[static_cast<std::size_t>(2 * i)] = lx[static_cast<std::size_t>(i)] / eps;
            rhs[static_cast<std::size_t>(2 * i) + 1] = ly[static_cast<std::size_t>(i)] / eps;
        }
    }
    const VectorField v_eps = extend_from_load(m, eps, rhs);

    // Exact L2(Gamma) norm of the P1 difference trace.
    double mismatch_sq = 0.0;
    for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
        const int id = ids[static_cast<std::size_t>(k)];
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
        const double L = m.edge_length(id);
        const Vec2 da = v_eps[e.a] - g(m.node(e.a));
        const Vec2 db = v_eps[e.b] - g(m.node(e.b));
        mismatch_sq += L / 6.0 * (2.0 * norm2(da) + 2.0 * norm2(db) + 2.0 * dot(da, db));
    }
    return {std::sqrt(mismatch_sq), std::sqrt(neumann_sq)};
}

} // namespace cmm

#endif
