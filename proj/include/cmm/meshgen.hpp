#ifndef CMM_MESHGEN_HPP
#define CMM_MESHGEN_HPP

#include <algorithm>
#include <map>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmm/curve.hpp"
#include "cmm/mesh.hpp"

namespace cmm {

namespace meshgen_detail {

inline double polygon_signed_area(const std::vector<Vec2>& poly) {
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        twice += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * twice;
}

inline Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
    double area2 = 0.0;
    Vec2 c{0.0, 0.0};
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % n];
        const double w = cross(a, b);
        area2 += w;
        c += (a + b) * w;
    }
    if (area2 == 0.0) throw std::invalid_argument("degenerate boundary polygon");
    return c / (3.0 * area2);
}

inline bool inside_polygon(Vec2 p, const std::vector<Vec2>& poly) {
    bool inside = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
        const bool crosses = (a.y > p.y) != (b.y > p.y);
        if (!crosses) continue;
        const double x_hit = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
        if (x_hit > p.x) inside = !inside;
    }
    return inside;
}

inline double polyline_length(const std::vector<Vec2>& poly) {
    double L = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        L += norm(poly[(i + 1) % poly.size()] - poly[i]);
    return L;
}

/// Resample a closed polyline at n arc-length-uniform stations.
inline std::vector<Vec2> resample_closed(const std::vector<Vec2>& poly, int n) {
    const std::size_t m = poly.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        cum[i + 1] = cum[i] + norm(poly[(i + 1) % m] - poly[i]);
    const double total = cum[m];
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n));
    std::size_t seg = 0;
    for (int k = 0; k < n; ++k) {
        const double s = total * k / n;
        while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
        const double ds = cum[seg + 1] - cum[seg];
        const double f = ds > 0.0 ? (s - cum[seg]) / ds : 0.0;
        const Vec2 a = poly[seg], b = poly[(seg + 1) % m];
        out.push_back(a + (b - a) * f);
    }
    return out;
}

/// Radial profile of a star-shaped closed polyline around an anchor,
/// tabulated on a uniform angle grid and queried by linear interpolation.
class RadialTable {
public:
    RadialTable(const std::vector<Vec2>& poly, Vec2 anchor, int resolution = 2048)
        : anchor_(anchor), rho_(static_cast<std::size_t>(resolution)) {
        const double two_pi = 2.0 * std::numbers::pi;
        for (int i = 0; i < resolution; ++i)
            rho_[static_cast<std::size_t>(i)] = ray_hit(poly, anchor, two_pi * i / resolution);
    }

    double operator()(double theta) const {
        const double two_pi = 2.0 * std::numbers::pi;
        double u = std::fmod(theta, two_pi);
        if (u < 0.0) u += two_pi;
        const double s = u / two_pi * static_cast<double>(rho_.size());
        const std::size_t i = std::min(static_cast<std::size_t>(s), rho_.size() - 1);
        const std::size_t j = (i + 1) % rho_.size();
        const double f = s - static_cast<double>(i);
        return (1.0 - f) * rho_[i] + f * rho_[j];
    }

private:
    static double ray_hit(const std::vector<Vec2>& poly, Vec2 anchor, double theta) {
        const Vec2 d{std::cos(theta), std::sin(theta)};
        double best = std::numeric_limits<double>::infinity();
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = poly[i] - anchor;
            const Vec2 b = poly[(i + 1) % n] - anchor;
            const Vec2 e = b - a;
            const double denom = cross(d, e);
            if (denom == 0.0) continue;
            const double s = cross(a, e) / denom;  // along the ray
            const double t = cross(a, d) / denom;  // along the segment
            // tolerant bounds: a ray through a shared vertex must not fall
            // between the two adjacent segments
            if (s > 0.0 && t >= -1e-9 && t <= 1.0 + 1e-9) best = std::min(best, s);
        }
        if (!std::isfinite(best))
            throw std::runtime_error("annulus generator: boundary is not star-shaped "
                                     "around the anchor");
        return best;
    }

    Vec2 anchor_;
    std::vector<double> rho_;
};

/// Point at arc length s along a closed polyline with cumulative lengths cum.
inline Vec2 polyline_point_at(const std::vector<Vec2>& poly, const std::vector<double>& cum,
                              double s) {
    const std::size_t m = poly.size();
    const double total = cum[m];
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
    std::size_t lo = 0, hi = m;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (cum[mid] <= s ? lo : hi) = mid;
    }
    const double ds = cum[lo + 1] - cum[lo];
    const double f = ds > 0.0 ? (s - cum[lo]) / ds : 0.0;
    return poly[lo] + (poly[(lo + 1) % m] - poly[lo]) * f;
}

/// Outer stations matched to inner stations by closest point, monotonized
/// along the loop and smoothed, so ring offsets start out perpendicular to
/// the inner boundary and corners are fanned gradually.
inline std::vector<Vec2> closest_point_correspondence(const std::vector<Vec2>& fine_in,
                                                      const std::vector<Vec2>& fine_out) {
    const std::size_t M = fine_in.size();
    std::vector<double> cum(M + 1, 0.0);
    for (std::size_t i = 0; i < M; ++i)
        cum[i + 1] = cum[i] + norm(fine_out[(i + 1) % M] - fine_out[i]);
    const double total = cum[M];

    std::vector<double> param(M, 0.0);
    for (std::size_t k = 0; k < M; ++k) {
        const Vec2 p = fine_in[k];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < M; ++i) {
            const Vec2 a = fine_out[i], b = fine_out[(i + 1) % M];
            const Vec2 e = b - a;
            const double len2 = norm2(e);
            const double t = len2 > 0.0 ? std::clamp(dot(p - a, e) / len2, 0.0, 1.0) : 0.0;
            const double d = norm2(p - (a + e * t));
            if (d < best) {
                best = d;
                param[k] = cum[i] + t * (cum[i + 1] - cum[i]);
            }
        }
    }

    // forward steps along the outer loop; small backtracks are flattened
    std::vector<double> steps(M, 0.0);
    double run = 0.0;
    for (std::size_t k = 1; k < M; ++k) {
        double d = param[k] - param[k - 1];
        d -= total * std::floor(d / total + 0.5);  // signed, in (-total/2, total/2]
        steps[k] = std::max(0.0, d);
        run += steps[k];
    }
    {
        double d = param[0] + total - (param[0] + run);  // closing step
        if (!(std::abs(run - total) < 0.5 * total))
            throw std::runtime_error("closest-point correspondence winds incorrectly");
        (void)d;
    }
    // circular smoothing of the step profile, then rescale to one full loop
    const int width = static_cast<int>(M) / 64;
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> sm(M, 0.0);
        for (std::size_t k = 0; k < M; ++k) {
            double acc = 0.0;
            for (int o = -width; o <= width; ++o)
                acc += steps[(k + static_cast<std::size_t>(o + static_cast<int>(M))) % M];
            sm[k] = acc / (2 * width + 1);
        }
        steps = std::move(sm);
    }
    double sum = 0.0;
    for (double s : steps) sum += s;
    if (!(sum > 0.0)) throw std::runtime_error("closest-point correspondence degenerated");
    const double scale = total / sum;

    std::vector<Vec2> matched(M);
    double s = param[0];
    for (std::size_t k = 0; k < M; ++k) {
        if (k > 0) s += steps[k] * scale;
        matched[k] = polyline_point_at(fine_out, cum, s);
    }
    return matched;
}

/// Cyclic shift of `outer` that best aligns it with `inner` pointwise, so
/// the transfinite blend does not twist between the contours.
inline int best_alignment(const std::vector<Vec2>& inner, const std::vector<Vec2>& outer) {
    const std::size_t m = inner.size();
    int best_shift = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < m; ++d) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) acc += norm2(outer[(k + d) % m] - inner[k]);
        if (acc < best) {
            best = acc;
            best_shift = static_cast<int>(d);
        }
    }
    return best_shift;
}

inline double min_corner_angle(const Vec2& p, const Vec2& q, const Vec2& r) {
    const Vec2 v[3] = {p, q, r};
    double worst = 4.0;
    for (int k = 0; k < 3; ++k) {
        const Vec2 e1 = v[(k + 1) % 3] - v[k];
        const Vec2 e2 = v[(k + 2) % 3] - v[k];
        const double denom = norm(e1) * norm(e2);
        if (denom == 0.0) return 0.0;
        worst = std::min(worst, std::acos(std::clamp(dot(e1, e2) / denom, -1.0, 1.0)));
    }
    return worst;
}

/// Guarded Laplacian smoothing of interior nodes: a node moves to the
/// average of its neighbors only when its local minimum corner angle does
/// not get worse and no incident triangle flips.
inline void smooth_interior(std::vector<Vec2>& nodes, const std::vector<Triangle>& tris,
                            const std::vector<bool>& boundary, int sweeps) {
    const std::size_t np = nodes.size();
    std::vector<std::vector<int>> node_tris(np);
    for (std::size_t t = 0; t < tris.size(); ++t) {
        node_tris[static_cast<std::size_t>(tris[t].a)].push_back(static_cast<int>(t));
        node_tris[static_cast<std::size_t>(tris[t].b)].push_back(static_cast<int>(t));
        node_tris[static_cast<std::size_t>(tris[t].c)].push_back(static_cast<int>(t));
    }
    std::vector<std::vector<int>> neighbors(np);
    for (const Triangle& t : tris) {
        const int v[3] = {t.a, t.b, t.c};
        for (int k = 0; k < 3; ++k) {
            neighbors[static_cast<std::size_t>(v[k])].push_back(v[(k + 1) % 3]);
            neighbors[static_cast<std::size_t>(v[k])].push_back(v[(k + 2) % 3]);
        }
    }
    auto local_quality = [&](std::size_t i) {
        double q = 4.0, amin = std::numeric_limits<double>::infinity();
        for (int t : node_tris[i]) {
            const Triangle& tr = tris[static_cast<std::size_t>(t)];
            q = std::min(q, min_corner_angle(nodes[static_cast<std::size_t>(tr.a)],
                                             nodes[static_cast<std::size_t>(tr.b)],
                                             nodes[static_cast<std::size_t>(tr.c)]));
            amin = std::min(amin, triangle_signed_area(nodes[static_cast<std::size_t>(tr.a)],
                                                       nodes[static_cast<std::size_t>(tr.b)],
                                                       nodes[static_cast<std::size_t>(tr.c)]));
        }
        return std::make_pair(q, amin);
    };
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t i = 0; i < np; ++i) {
            if (boundary[i] || neighbors[i].empty()) continue;
            Vec2 avg{0.0, 0.0};
            for (int nb : neighbors[i]) avg += nodes[static_cast<std::size_t>(nb)];
            avg = avg / static_cast<double>(neighbors[i].size());
            const Vec2 old = nodes[i];
            const auto [q_old, a_old] = local_quality(i);
            nodes[i] = avg;
            const auto [q_new, a_new] = local_quality(i);
            if (!(a_new > 0.0) || q_new < q_old) nodes[i] = old;
        }
    }
}

/// One sweep of greedy edge flips: an interior diagonal is flipped when the
/// flipped pair strictly improves the local minimum angle (Delaunay-style),
/// or when it untangles an inverted pair. Returns whether anything changed.
inline bool flip_pass(const std::vector<Vec2>& nodes, std::vector<Triangle>& tris) {
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const int v[3] = {tris[t].a, tris[t].b, tris[t].c};
        for (int k = 0; k < 3; ++k) {
            const int p = std::min(v[k], v[(k + 1) % 3]);
            const int q = std::max(v[k], v[(k + 1) % 3]);
            edge_tris[{p, q}].push_back(static_cast<int>(t));
        }
    }
    auto angle_of = [&nodes](const Triangle& t) {
        return min_corner_angle(nodes[static_cast<std::size_t>(t.a)],
                                nodes[static_cast<std::size_t>(t.b)],
                                nodes[static_cast<std::size_t>(t.c)]);
    };
    auto area_of = [&nodes](const Triangle& t) {
        return triangle_signed_area(nodes[static_cast<std::size_t>(t.a)],
                                    nodes[static_cast<std::size_t>(t.b)],
                                    nodes[static_cast<std::size_t>(t.c)]);
    };
    std::vector<char> dirty(tris.size(), 0);
    bool any = false;
    for (const auto& [edge, owners] : edge_tris) {
        if (owners.size() != 2) continue;
        const int t1 = owners[0], t2 = owners[1];
        if (dirty[static_cast<std::size_t>(t1)] || dirty[static_cast<std::size_t>(t2)])
            continue;
        // orient t1 as (a,b,c) with shared edge (a,b); t2 then holds (b,a,d)
        const Triangle& T1 = tris[static_cast<std::size_t>(t1)];
        const int v1[3] = {T1.a, T1.b, T1.c};
        int a = -1, b = -1, c = -1;
        for (int k = 0; k < 3; ++k) {
            const int p = v1[k], q = v1[(k + 1) % 3];
            if (std::min(p, q) == edge.first && std::max(p, q) == edge.second) {
                a = p;
                b = q;
                c = v1[(k + 2) % 3];
            }
        }
        const Triangle& T2 = tris[static_cast<std::size_t>(t2)];
        const int v2[3] = {T2.a, T2.b, T2.c};
        int d = -1;
        for (int k = 0; k < 3; ++k)
            if (v2[k] != a && v2[k] != b) d = v2[k];
        if (a < 0 || d < 0) continue;

        const Triangle n1{a, d, c}, n2{d, b, c};
        if (!(area_of(n1) > 0.0) || !(area_of(n2) > 0.0)) continue;
        const double old_q = std::min(angle_of(T1), angle_of(T2));
        const double old_amin = std::min(area_of(T1), area_of(T2));
        const bool untangle = !(old_amin > 0.0);
        const bool improves = std::min(angle_of(n1), angle_of(n2)) > old_q + 1e-12;
        if (!untangle && !improves) continue;
        tris[static_cast<std::size_t>(t1)] = n1;
        tris[static_cast<std::size_t>(t2)] = n2;
        dirty[static_cast<std::size_t>(t1)] = 1;
        dirty[static_cast<std::size_t>(t2)] = 1;
        any = true;
    }
    return any;
}

/// Triangulate the band between two CCW rings (inner first) by greedy
/// shortest-diagonal advancing; produces inner.size()+outer.size() CCW
/// triangles when the rings do not cross.
inline void stitch_rings(const std::vector<Vec2>& nodes, const std::vector<int>& inner,
                         const std::vector<int>& outer, std::vector<Triangle>& out) {
    const int m = static_cast<int>(inner.size());
    const int n = static_cast<int>(outer.size());
    auto P = [&nodes](int id) { return nodes[static_cast<std::size_t>(id)]; };

    int j0 = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const double d = norm2(P(outer[static_cast<std::size_t>(j)]) - P(inner[0]));
        if (d < best) {
            best = d;
            j0 = j;
        }
    }
    int ci = 0, cj = 0;  // consumed edges on each ring
    int i = 0, j = j0;
    while (ci < m || cj < n) {
        const int inext = (i + 1) % m;
        const int jnext = (j + 1) % n;
        bool advance_inner;
        if (ci == m) advance_inner = false;
        else if (cj == n) advance_inner = true;
        else {
            const double da = norm2(P(inner[static_cast<std::size_t>(inext)]) -
                                    P(outer[static_cast<std::size_t>(j)]));
            const double db = norm2(P(inner[static_cast<std::size_t>(i)]) -
                                    P(outer[static_cast<std::size_t>(jnext)]));
            advance_inner = da <= db;
        }
        if (advance_inner) {
            out.push_back({inner[static_cast<std::size_t>(i)],
                           outer[static_cast<std::size_t>(j)],
                           inner[static_cast<std::size_t>(inext)]});
            i = inext;
            ++ci;
        } else {
            out.push_back({inner[static_cast<std::size_t>(i)],
                           outer[static_cast<std::size_t>(j)],
                           outer[static_cast<std::size_t>(jnext)]});
            j = jnext;
            ++cj;
        }
    }
}

/// Intermediate ring polylines by pointwise blending of matched inner/outer
/// stations; the correspondence is supplied by the caller.
inline std::vector<std::vector<Vec2>> blend_rings(const std::vector<Vec2>& match_in,
                                                  const std::vector<Vec2>& match_out,
                                                  int layers, double h) {
    std::vector<std::vector<Vec2>> rings;
    const std::size_t M = match_in.size();
    for (int l = 1; l < layers; ++l) {
        const double s = static_cast<double>(l) / layers;
        std::vector<Vec2> ring(M);
        for (std::size_t k = 0; k < M; ++k)
            ring[k] = match_in[k] * (1.0 - s) + match_out[k] * s;
        const int count =
            std::max(8, static_cast<int>(std::llround(polyline_length(ring) / h)));
        rings.push_back(resample_closed(ring, count));
    }
    return rings;
}

/// Assemble a mesh from boundary polygons plus intermediate ring polylines;
/// throws if the result is not a valid triangulation.
inline Mesh assemble_annulus(const std::vector<Vec2>& inner_poly,
                             const std::vector<Vec2>& outer_poly,
                             const std::vector<std::vector<Vec2>>& mid_rings) {
    std::vector<Vec2> nodes;
    std::vector<std::vector<int>> ring_ids(mid_rings.size() + 2);
    auto push_ring = [&nodes, &ring_ids](std::size_t level, const std::vector<Vec2>& pts) {
        ring_ids[level].reserve(pts.size());
        for (const Vec2& p : pts) {
            ring_ids[level].push_back(static_cast<int>(nodes.size()));
            nodes.push_back(p);
        }
    };
    push_ring(0, inner_poly);
    for (std::size_t l = 0; l < mid_rings.size(); ++l) push_ring(l + 1, mid_rings[l]);
    push_ring(mid_rings.size() + 1, outer_poly);

    std::vector<Triangle> triangles;
    triangles.reserve(nodes.size() * 2);
    for (std::size_t l = 0; l + 1 < ring_ids.size(); ++l)
        stitch_rings(nodes, ring_ids[l], ring_ids[l + 1], triangles);

    std::vector<bool> on_boundary(nodes.size(), false);
    for (int id : ring_ids.front()) on_boundary[static_cast<std::size_t>(id)] = true;
    for (int id : ring_ids.back()) on_boundary[static_cast<std::size_t>(id)] = true;
    for (int round = 0; round < 4; ++round) {
        for (int p = 0; p < 20; ++p)
            if (!flip_pass(nodes, triangles)) break;
        smooth_interior(nodes, triangles, on_boundary, 4);
    }

    std::vector<BoundaryEdge> bedges;
    const std::vector<int>& in_ring = ring_ids.front();
    const std::vector<int>& out_ring = ring_ids.back();
    // Inner loop traversed clockwise so the annulus lies to the left.
    for (std::size_t k = 0; k < in_ring.size(); ++k)
        bedges.push_back({in_ring[(k + 1) % in_ring.size()], in_ring[k], BoundaryLabel::Fixed});
    for (std::size_t k = 0; k < out_ring.size(); ++k)
        bedges.push_back({out_ring[k], out_ring[(k + 1) % out_ring.size()], BoundaryLabel::Free});

    Mesh m(std::move(nodes), std::move(triangles), std::move(bedges));
    validate_mesh(m);
    return m;
}

} // namespace meshgen_detail

/// Layered advancing-front mesh of the annulus between two closed CCW
/// curves. Boundary nodes sit on the analytic curves, placed by
/// arc-length-uniform sampling at spacing ~ h (curve corners kept exactly).
/// Interior rings blend matched stations of the two contours; two matching
/// strategies are tried (arc-length transfinite morph and radial rays from
/// the inner centroid) and the valid mesh with the better minimum angle
/// wins. Deterministic for fixed inputs.
inline Mesh generate_annulus_mesh(const Curve& outer, const Curve& inner, double h) {
    using namespace meshgen_detail;
    if (!(h > 0.0)) throw std::invalid_argument("generate_annulus_mesh: h must be positive");

    const std::vector<Vec2> inner_poly = inner.sample(h);
    const std::vector<Vec2> outer_poly = outer.sample(h);
    if (!(polygon_signed_area(inner_poly) > 0.0) || !(polygon_signed_area(outer_poly) > 0.0))
        throw std::invalid_argument("generate_annulus_mesh: curves must be counterclockwise");

    const int M = 1024;
    const std::vector<Vec2> fine_in = resample_closed(inner.dense_polyline(), M);
    const std::vector<Vec2> fine_out_raw = resample_closed(outer.dense_polyline(), M);

    for (const Vec2& p : fine_in)
        if (!inside_polygon(p, fine_out_raw))
            throw std::invalid_argument("generate_annulus_mesh: boundaries intersect");
    for (const Vec2& p : fine_out_raw)
        if (inside_polygon(p, fine_in))
            throw std::invalid_argument("generate_annulus_mesh: boundaries intersect");

    // Arc-length correspondence, twist removed by cyclic alignment.
    std::vector<Vec2> fine_out = fine_out_raw;
    std::rotate(fine_out.begin(), fine_out.begin() + best_alignment(fine_in, fine_out),
                fine_out.end());

    // Radial correspondence around the inner centroid, when the boundaries
    // are star-shaped from there.
    std::vector<Vec2> radial_in, radial_out;
    try {
        const Vec2 anchor = polygon_centroid(inner_poly);
        const RadialTable rho_in(fine_in, anchor);
        const RadialTable rho_out(fine_out_raw, anchor);
        radial_in.resize(static_cast<std::size_t>(M));
        radial_out.resize(static_cast<std::size_t>(M));
        for (int k = 0; k < M; ++k) {
            const double theta = 2.0 * std::numbers::pi * k / M;
            const Vec2 d{std::cos(theta), std::sin(theta)};
            radial_in[static_cast<std::size_t>(k)] = anchor + d * rho_in(theta);
            radial_out[static_cast<std::size_t>(k)] = anchor + d * rho_out(theta);
        }
    } catch (const std::exception&) {
        radial_in.clear();
        radial_out.clear();
    }

    auto gap_stats = [M](const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
        double mn = std::numeric_limits<double>::infinity(), mean = 0.0;
        for (int k = 0; k < M; ++k) {
            const double gap =
                norm(b[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)]);
            mn = std::min(mn, gap);
            mean += gap / M;
        }
        return std::make_pair(mn, mean);
    };
    const auto [arc_min, arc_mean] = gap_stats(fine_in, fine_out);
    double radial_mean = 0.0;
    if (!radial_in.empty()) radial_mean = gap_stats(radial_in, radial_out).second;
    if (!(arc_min > 0.0))
        throw std::invalid_argument("generate_annulus_mesh: boundaries touch");
    if (h > std::max(arc_mean, radial_mean))
        throw std::invalid_argument("generate_annulus_mesh: h exceeds the annulus gap");

    Mesh best;
    double best_angle = -1.0;
    std::string last_error = "no candidate succeeded";
    auto consider = [&](const std::vector<Vec2>& match_in, const std::vector<Vec2>& match_out,
                        double mean_gap) {
        if (match_in.empty() || !(h <= mean_gap)) return;
        try {
            const int layers = std::max(1, static_cast<int>(std::llround(mean_gap / h)));
            Mesh cand = assemble_annulus(inner_poly, outer_poly,
                                         blend_rings(match_in, match_out, layers, h));
            const double angle = mesh_quality(cand).min_angle;
            if (angle > best_angle) {
                best_angle = angle;
                best = std::move(cand);
            }
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    };
    consider(fine_in, fine_out, arc_mean);
    consider(radial_in, radial_out, radial_mean);
    try {
        const std::vector<Vec2> nearest_out = closest_point_correspondence(fine_in, fine_out_raw);
        consider(fine_in, nearest_out, gap_stats(fine_in, nearest_out).second);
    } catch (const std::exception& e) {
        last_error = e.what();
    }

    if (best_angle < 0.0)
        throw std::runtime_error(std::string("generate_annulus_mesh: ") + last_error);
    return best;
}

} // namespace cmm

#endif
