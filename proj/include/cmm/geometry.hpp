#ifndef CMM_GEOMETRY_HPP
#define CMM_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmm/fem.hpp"
#include "cmm/fields.hpp"
#include "cmm/levelset.hpp"
#include "cmm/mesh.hpp"

namespace cmm {

/// Unit outward normals of the free boundary, one per free edge. With the
/// domain to the left of an edge a->b the outward normal is the clockwise
/// quarter-turn of the edge direction.
inline EdgeField<Vec2> edge_normals(const Mesh& m) {
    EdgeField<Vec2> out(m.free_edge_count());
    const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
    for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
        out[k] = normalized(rot_cw(m.node(e.b) - m.node(e.a)));
    }
    return out;
}

/// Per-free-edge normals and lengths plus boundary aggregates.
struct BoundaryGeometry {
    EdgeField<Vec2> normals;
    EdgeField<double> lengths;
    double total_length = 0.0;
    double enclosed_area = 0.0;
};

/// Signed shoelace area of the labeled boundary loop(s), returned as a
/// magnitude (the free loop is CCW, the fixed loop clockwise by convention).
inline double enclosed_area(const Mesh& m, BoundaryLabel label) {
    double twice = 0.0;
    for (int id : m.edge_ids(label)) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
        twice += cross(m.node(e.a), m.node(e.b));
    }
    return std::abs(0.5 * twice);
}

inline double boundary_length(const Mesh& m, BoundaryLabel label) {
    double L = 0.0;
    for (int id : m.edge_ids(label)) L += m.edge_length(id);
    return L;
}

inline BoundaryGeometry boundary_geometry(const Mesh& m) {
    BoundaryGeometry g;
    g.normals = edge_normals(m);
    g.lengths = EdgeField<double>(m.free_edge_count());
    const std::vector<int>& ids = m.edge_ids(BoundaryLabel::Free);
    for (int k = 0; k < static_cast<int>(ids.size()); ++k) {
        g.lengths[k] = m.edge_length(ids[static_cast<std::size_t>(k)]);
        g.total_length += g.lengths[k];
    }
    g.enclosed_area = enclosed_area(m, BoundaryLabel::Free);
    return g;
}

/// Integral over the free boundary of the tangential divergence of every P1
/// vector basis function, assembled edgewise from the adjacent triangle's
/// constant gradients: on a straight edge with unit tangent tau,
/// div_G phi = tau . (d phi / d tau). This is the weak curvature load of the
/// Gauss-Green identity; no curvature value is ever formed. Interleaved
/// (2i, 2i+1) layout.
inline std::vector<double> tangential_divergence_load(const Mesh& m) {
    std::vector<double> load(static_cast<std::size_t>(2 * m.node_count()), 0.0);
    for (int id : m.edge_ids(BoundaryLabel::Free)) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
        const Vec2 tau = normalized(m.node(e.b) - m.node(e.a));
        const double L = m.edge_length(id);
        const Triangle& tr = m.triangles()[static_cast<std::size_t>(m.edge_triangle(id))];
        const auto g = p1_gradients(m.node(tr.a), m.node(tr.b), m.node(tr.c));
        const int idx[3] = {tr.a, tr.b, tr.c};
        for (int i = 0; i < 3; ++i) {
            const double dN_dtau = dot(g[static_cast<std::size_t>(i)], tau);
            load[static_cast<std::size_t>(2 * idx[i])] += L * tau.x * dN_dtau;
            load[static_cast<std::size_t>(2 * idx[i]) + 1] += L * tau.y * dN_dtau;
        }
    }
    return load;
}

/// Distance queries against the zero set of a level set at a fixed time.
/// The zero set is located by root-finding along rays from the level set's
/// anchor (star-shaped zero sets), densely polygonized once, and each query
/// is refined locally to ~1e-8 relative accuracy.
class ZeroSetDistance {
public:
    ZeroSetDistance(const LevelSet& ls, double t, int samples = 4096)
        : ls_(&ls), t_(t), points_(static_cast<std::size_t>(samples)) {
        for (int i = 0; i < samples; ++i) {
            const double a = 2.0 * std::numbers::pi * i / samples;
            points_[static_cast<std::size_t>(i)] = root_along(a);
        }
    }

    double operator()(Vec2 x) const {
        const std::size_t n = points_.size();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = norm2(points_[i] - x);
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        // refine over the angular window spanning the two neighboring samples
        const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
        double lo = static_cast<double>(best_i) * step - step;
        double hi = static_cast<double>(best_i) * step + step;
        auto dist_at = [this, x](double a) { return norm(root_along(a) - x); };
        // golden-section minimization
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = hi - invphi * (hi - lo);
        double d = lo + invphi * (hi - lo);
        double fc = dist_at(c), fd = dist_at(d);
        for (int it = 0; it < 60; ++it) {
            if (fc < fd) {
                hi = d;
                d = c;
                fd = fc;
                c = hi - invphi * (hi - lo);
                fc = dist_at(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + invphi * (hi - lo);
                fd = dist_at(d);
            }
        }
        return std::min(fc, fd);
    }

private:
    Vec2 root_along(double angle) const {
        const Vec2 dir{std::cos(angle), std::sin(angle)};
        const Vec2 o = ls_->anchor;
        if (!(ls_->phi(o, t_) < 0.0))
            throw std::runtime_error("ZeroSetDistance: anchor is not inside the zero set");
        double lo = 0.0, hi = 1.0;
        while (ls_->phi(o + dir * hi, t_) < 0.0) {
            hi *= 2.0;
            if (hi > 1e8) throw std::runtime_error("ZeroSetDistance: zero set not found");
        }
        for (int k = 0; k < 100; ++k) {
            const double mid = 0.5 * (lo + hi);
            (ls_->phi(o + dir * mid, t_) < 0.0 ? lo : hi) = mid;
        }
        return o + dir * (0.5 * (lo + hi));
    }

    const LevelSet* ls_;
    double t_;
    std::vector<Vec2> points_;
};

/// One-shot distance from a point to the zero set {phi(.,t)=0}.
inline double distance_to_levelset(Vec2 x, const LevelSet& ls, double t) {
    return ZeroSetDistance(ls, t)(x);
}

// -- polyline utilities ------------------------------------------------------

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 e = b - a;
    const double len2 = norm2(e);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, e) / len2, 0.0, 1.0);
    return norm(p - (a + e * t));
}

/// Directed segments of the labeled boundary as coordinate pairs.
inline std::vector<std::pair<Vec2, Vec2>> boundary_segments(const Mesh& m,
                                                            BoundaryLabel label) {
    std::vector<std::pair<Vec2, Vec2>> segs;
    for (int id : m.edge_ids(label)) {
        const BoundaryEdge& e = m.boundary_edges()[static_cast<std::size_t>(id)];
        segs.emplace_back(m.node(e.a), m.node(e.b));
    }
    return segs;
}

inline double distance_to_segments(Vec2 p, const std::vector<std::pair<Vec2, Vec2>>& segs) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : segs) best = std::min(best, point_segment_distance(p, a, b));
    return best;
}

/// Symmetric Hausdorff distance between two polygonal boundaries, measured
/// over vertices and edge midpoints against the full opposite polyline.
inline double hausdorff_distance(const std::vector<std::pair<Vec2, Vec2>>& A,
                                 const std::vector<std::pair<Vec2, Vec2>>& B) {
    auto one_sided = [](const std::vector<std::pair<Vec2, Vec2>>& from,
                        const std::vector<std::pair<Vec2, Vec2>>& to) {
        double worst = 0.0;
        for (const auto& [a, b] : from) {
            worst = std::max(worst, distance_to_segments(a, to));
            worst = std::max(worst, distance_to_segments((a + b) * 0.5, to));
        }
        return worst;
    };
    return std::max(one_sided(A, B), one_sided(B, A));
}

/// Ray-cast point-in-polygon test against a set of directed segments
/// (concave loops are fine).
inline bool point_inside(Vec2 p, const std::vector<std::pair<Vec2, Vec2>>& segs) {
    bool inside = false;
    for (const auto& [a, b] : segs) {
        const bool crosses = (a.y > p.y) != (b.y > p.y);
        if (!crosses) continue;
        const double x_hit = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (x_hit > p.x) inside = !inside;
    }
    return inside;
}

} // namespace cmm

#endif
