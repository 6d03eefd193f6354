#ifndef CMM_MESH_HPP
#define CMM_MESH_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cmm/vec2.hpp"

namespace cmm {

enum class BoundaryLabel : std::uint8_t { Fixed, Free };

/// Directed boundary edge a->b, oriented so the domain lies to its left.
struct BoundaryEdge {
    int a = -1;
    int b = -1;
    BoundaryLabel label = BoundaryLabel::Free;
};

struct Triangle {
    int a = -1;
    int b = -1;
    int c = -1;
};

struct QualityReport {
    double min_angle = 0.0;        // radians, over all triangle corners
    double min_signed_area = 0.0;  // over all triangles
    double min_free_edge = 0.0;    // shortest edge on the free boundary
    double max_free_edge = 0.0;    // longest edge on the free boundary

    double free_edge_ratio() const {
        return min_free_edge > 0.0 ? max_free_edge / min_free_edge : 0.0;
    }
};

inline double triangle_signed_area(const Vec2& p, const Vec2& q, const Vec2& r) {
    return 0.5 * cross(q - p, r - p);
}

/// Triangulated planar domain with labeled boundary. Node coordinates,
/// connectivity and edge labels are immutable after construction; motion
/// produces a new mesh with the same connectivity (see move_mesh).
class Mesh {
public:
    Mesh() = default;

    Mesh(std::vector<Vec2> nodes, std::vector<Triangle> triangles,
         std::vector<BoundaryEdge> boundary_edges)
        : nodes_(std::move(nodes)),
          triangles_(std::move(triangles)),
          boundary_edges_(std::move(boundary_edges)) {
        build_derived();
    }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int triangle_count() const { return static_cast<int>(triangles_.size()); }
    int boundary_edge_count() const { return static_cast<int>(boundary_edges_.size()); }

    const std::vector<Vec2>& nodes() const { return nodes_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

    const Vec2& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }

    /// Indices into boundary_edges() carrying the given label, in storage order.
    const std::vector<int>& edge_ids(BoundaryLabel label) const {
        return label == BoundaryLabel::Free ? free_edge_ids_ : fixed_edge_ids_;
    }
    int free_edge_count() const { return static_cast<int>(free_edge_ids_.size()); }

    bool node_on(int node, BoundaryLabel label) const {
        return label == BoundaryLabel::Fixed ? fixed_node_[static_cast<std::size_t>(node)]
                                             : free_node_[static_cast<std::size_t>(node)];
    }
    /// Node ids lying on edges of the given label, ascending.
    const std::vector<int>& boundary_nodes(BoundaryLabel label) const {
        return label == BoundaryLabel::Fixed ? fixed_nodes_ : free_nodes_;
    }

    /// The unique triangle adjacent to a boundary edge.
    int edge_triangle(int boundary_edge_id) const {
        return edge_triangle_[static_cast<std::size_t>(boundary_edge_id)];
    }

    double edge_length(int boundary_edge_id) const {
        const BoundaryEdge& e = boundary_edges_[static_cast<std::size_t>(boundary_edge_id)];
        return norm(node(e.b) - node(e.a));
    }

    /// Same connectivity, new coordinates.
    Mesh with_nodes(std::vector<Vec2> nodes) const {
        if (nodes.size() != nodes_.size())
            throw std::invalid_argument("with_nodes: node count mismatch");
        Mesh m;
        m.nodes_ = std::move(nodes);
        m.triangles_ = triangles_;
        m.boundary_edges_ = boundary_edges_;
        m.free_edge_ids_ = free_edge_ids_;
        m.fixed_edge_ids_ = fixed_edge_ids_;
        m.fixed_node_ = fixed_node_;
        m.free_node_ = free_node_;
        m.fixed_nodes_ = fixed_nodes_;
        m.free_nodes_ = free_nodes_;
        m.edge_triangle_ = edge_triangle_;
        return m;
    }

private:
    void build_derived() {
        const std::size_t np = nodes_.size();
        fixed_node_.assign(np, false);
        free_node_.assign(np, false);
        free_edge_ids_.clear();
        fixed_edge_ids_.clear();
        for (std::size_t i = 0; i < boundary_edges_.size(); ++i) {
            const BoundaryEdge& e = boundary_edges_[i];
            if (e.a < 0 || e.b < 0 || e.a >= static_cast<int>(np) || e.b >= static_cast<int>(np))
                throw std::invalid_argument("boundary edge references unknown node");
            if (e.label == BoundaryLabel::Free) {
                free_edge_ids_.push_back(static_cast<int>(i));
                free_node_[static_cast<std::size_t>(e.a)] = true;
                free_node_[static_cast<std::size_t>(e.b)] = true;
            } else {
                fixed_edge_ids_.push_back(static_cast<int>(i));
                fixed_node_[static_cast<std::size_t>(e.a)] = true;
                fixed_node_[static_cast<std::size_t>(e.b)] = true;
            }
        }
        fixed_nodes_.clear();
        free_nodes_.clear();
        for (std::size_t i = 0; i < np; ++i) {
            if (fixed_node_[i]) fixed_nodes_.push_back(static_cast<int>(i));
            if (free_node_[i]) free_nodes_.push_back(static_cast<int>(i));
        }

        // Boundary edge -> adjacent triangle.
        std::map<std::pair<int, int>, int> tri_of_edge;
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const Triangle& tr = triangles_[t];
            const int v[3] = {tr.a, tr.b, tr.c};
            for (int k = 0; k < 3; ++k) {
                const int p = std::min(v[k], v[(k + 1) % 3]);
                const int q = std::max(v[k], v[(k + 1) % 3]);
                tri_of_edge.emplace(std::make_pair(p, q), static_cast<int>(t));
            }
        }
        edge_triangle_.assign(boundary_edges_.size(), -1);
        for (std::size_t i = 0; i < boundary_edges_.size(); ++i) {
            const BoundaryEdge& e = boundary_edges_[i];
            auto it = tri_of_edge.find({std::min(e.a, e.b), std::max(e.a, e.b)});
            if (it == tri_of_edge.end())
                throw std::invalid_argument("boundary edge not part of any triangle");
            edge_triangle_[i] = it->second;
        }
    }

    std::vector<Vec2> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<BoundaryEdge> boundary_edges_;

    std::vector<int> free_edge_ids_;
    std::vector<int> fixed_edge_ids_;
    std::vector<bool> fixed_node_;
    std::vector<bool> free_node_;
    std::vector<int> fixed_nodes_;
    std::vector<int> free_nodes_;
    std::vector<int> edge_triangle_;
};

/// Structural validation: positive triangle areas, CCW orientation, boundary
/// edges tiling the topological boundary with the domain on their left.
/// Throws std::runtime_error with a description on the first violation.
inline void validate_mesh(const Mesh& m) {
    for (int t = 0; t < m.triangle_count(); ++t) {
        const Triangle& tr = m.triangles()[static_cast<std::size_t>(t)];
        const double area = triangle_signed_area(m.node(tr.a), m.node(tr.b), m.node(tr.c));
        if (!(area > 0.0))
            throw std::runtime_error("triangle " + std::to_string(t) +
                                     " has non-positive signed area");
    }

    // Count directed half-edges; an interior edge appears in two triangles
    // with opposite direction, a boundary edge in exactly one.
    std::map<std::pair<int, int>, int> count;
    for (const Triangle& tr : m.triangles()) {
        const int v[3] = {tr.a, tr.b, tr.c};
        for (int k = 0; k < 3; ++k)
            count[{v[k], v[(k + 1) % 3]}]++;
    }
    for (const auto& [edge, c] : count) {
        if (c > 1) throw std::runtime_error("duplicate directed edge in triangulation");
        const bool rev = count.count({edge.second, edge.first}) > 0;
        if (!rev) continue;  // boundary check below
    }
    std::map<std::pair<int, int>, int> boundary_seen;
    for (const auto& [edge, c] : count) {
        if (count.count({edge.second, edge.first}) == 0)
            boundary_seen.emplace(edge, 0);
    }
    if (boundary_seen.size() != static_cast<std::size_t>(m.boundary_edge_count()))
        throw std::runtime_error("boundary edge list does not tile the topological boundary");
    for (const BoundaryEdge& e : m.boundary_edges()) {
        auto it = boundary_seen.find({e.a, e.b});
        if (it == boundary_seen.end())
            throw std::runtime_error(
                "boundary edge (" + std::to_string(e.a) + "," + std::to_string(e.b) +
                ") is not a positively oriented boundary half-edge (domain must lie left)");
        if (++it->second > 1)
            throw std::runtime_error("boundary edge listed twice");
    }
}

struct MoveResult {
    Mesh mesh;
    bool inverted = false;            // true if any triangle area became <= 0
    int first_inverted_triangle = -1;
};

struct VectorField;  // fields.hpp

/// Explicit relocation of every node along the velocity field: x + tau*w(x).
/// Fixed-boundary nodes must carry zero velocity and are left bitwise intact.
/// An inverted element is reported through the flag, not an exception; the
/// caller decides whether that aborts the simulation.
MoveResult move_mesh(const Mesh& m, const VectorField& w, double tau);

inline QualityReport mesh_quality(const Mesh& m) {
    QualityReport r;
    r.min_angle = 4.0;  // > pi
    r.min_signed_area = std::numeric_limits<double>::infinity();
    for (const Triangle& tr : m.triangles()) {
        const Vec2 p = m.node(tr.a), q = m.node(tr.b), s = m.node(tr.c);
        r.min_signed_area = std::min(r.min_signed_area, triangle_signed_area(p, q, s));
        const Vec2 v[3] = {p, q, s};
        for (int k = 0; k < 3; ++k) {
            const Vec2 e1 = v[(k + 1) % 3] - v[k];
            const Vec2 e2 = v[(k + 2) % 3] - v[k];
            const double denom = norm(e1) * norm(e2);
            if (denom == 0.0) {
                r.min_angle = 0.0;
                continue;
            }
            const double c = std::clamp(dot(e1, e2) / denom, -1.0, 1.0);
            r.min_angle = std::min(r.min_angle, std::acos(c));
        }
    }
    if (m.triangle_count() == 0) {
        r.min_angle = 0.0;
        r.min_signed_area = 0.0;
    }
    double lmin = std::numeric_limits<double>::infinity(), lmax = 0.0;
    for (int id : m.edge_ids(BoundaryLabel::Free)) {
        const double L = m.edge_length(id);
        lmin = std::min(lmin, L);
        lmax = std::max(lmax, L);
    }
    r.min_free_edge = m.free_edge_count() > 0 ? lmin : 0.0;
    r.max_free_edge = lmax;
    return r;
}

} // namespace cmm

#include "cmm/fields.hpp"

namespace cmm {

inline MoveResult move_mesh(const Mesh& m, const VectorField& w, double tau) {
    if (w.size() != m.node_count())
        throw std::invalid_argument("move_mesh: velocity field size mismatch");
    for (int i : m.boundary_nodes(BoundaryLabel::Fixed))
        if (!(w[i] == Vec2{0.0, 0.0}))
            throw std::invalid_argument("move_mesh: nonzero velocity on fixed boundary node " +
                                        std::to_string(i));
    std::vector<Vec2> moved(m.nodes());
    for (int i = 0; i < m.node_count(); ++i) {
        if (m.node_on(i, BoundaryLabel::Fixed)) continue;  // bitwise unchanged
        moved[static_cast<std::size_t>(i)] += w[i] * tau;
    }
    MoveResult res{m.with_nodes(std::move(moved)), false, -1};
    for (int t = 0; t < res.mesh.triangle_count(); ++t) {
        const Triangle& tr = res.mesh.triangles()[static_cast<std::size_t>(t)];
        if (!(triangle_signed_area(res.mesh.node(tr.a), res.mesh.node(tr.b),
                                   res.mesh.node(tr.c)) > 0.0)) {
            res.inverted = true;
            res.first_inverted_triangle = t;
            break;
        }
    }
    return res;
}

} // namespace cmm

#endif
