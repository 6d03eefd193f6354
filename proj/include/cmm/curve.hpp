#ifndef CMM_CURVE_HPP
#define CMM_CURVE_HPP

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cmm/vec2.hpp"

namespace cmm {

/// Closed counterclockwise curve made of smooth parametric pieces. Piece
/// endpoints are honored as polygon vertices when sampling, so corners
/// (e.g. of an L-shaped boundary) are never cut.
class Curve {
public:
    struct Piece {
        std::function<Vec2(double)> eval;  // t in [0,1]
        std::vector<Vec2> cache;           // fine polyline for lengths/against rays
        std::vector<double> cumlen;        // cumulative length along cache
        double length = 0.0;
    };

    static constexpr int kCacheSamples = 768;

    void add_piece(std::function<Vec2(double)> eval) {
        Piece p;
        p.eval = std::move(eval);
        p.cache.resize(kCacheSamples + 1);
        p.cumlen.resize(kCacheSamples + 1);
        for (int i = 0; i <= kCacheSamples; ++i)
            p.cache[static_cast<std::size_t>(i)] =
                p.eval(static_cast<double>(i) / kCacheSamples);
        p.cumlen[0] = 0.0;
        for (int i = 1; i <= kCacheSamples; ++i)
            p.cumlen[static_cast<std::size_t>(i)] =
                p.cumlen[static_cast<std::size_t>(i - 1)] +
                norm(p.cache[static_cast<std::size_t>(i)] - p.cache[static_cast<std::size_t>(i - 1)]);
        p.length = p.cumlen.back();
        pieces_.push_back(std::move(p));
    }

    const std::vector<Piece>& pieces() const { return pieces_; }

    double length() const {
        double L = 0.0;
        for (const Piece& p : pieces_) L += p.length;
        return L;
    }

    /// Point at arc length s within a piece (s in [0, piece.length]).
    static Vec2 point_at_arclength(const Piece& p, double s) {
        if (s <= 0.0) return p.eval(0.0);
        if (s >= p.length) return p.eval(1.0);
        // binary search on the cumulative table, then evaluate the exact curve
        std::size_t lo = 0, hi = p.cumlen.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (p.cumlen[mid] <= s ? lo : hi) = mid;
        }
        const double seg = p.cumlen[hi] - p.cumlen[lo];
        const double f = seg > 0.0 ? (s - p.cumlen[lo]) / seg : 0.0;
        const double t = (static_cast<double>(lo) + f) / kCacheSamples;
        return p.eval(t);
    }

    /// Closed CCW polygon with vertex spacing ~ h, vertices on the curve,
    /// piece endpoints always included.
    std::vector<Vec2> sample(double h) const {
        if (!(h > 0.0)) throw std::invalid_argument("sample: h must be positive");
        std::vector<int> counts(pieces_.size());
        long total = 0;
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            counts[i] = std::max(1, static_cast<int>(std::llround(pieces_[i].length / h)));
            total += counts[i];
        }
        while (total < 8) {  // guard against degenerate polygons at huge h
            std::size_t widest = 0;
            double w = -1.0;
            for (std::size_t i = 0; i < pieces_.size(); ++i) {
                const double per = pieces_[i].length / counts[i];
                if (per > w) { w = per; widest = i; }
            }
            ++counts[widest];
            ++total;
        }
        std::vector<Vec2> poly;
        poly.reserve(static_cast<std::size_t>(total));
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const Piece& p = pieces_[i];
            const double ds = p.length / counts[i];
            for (int k = 0; k < counts[i]; ++k)
                poly.push_back(point_at_arclength(p, k * ds));
        }
        return poly;
    }

    /// Uniform-parameter polyline over all pieces (open duplicate-free loop).
    std::vector<Vec2> dense_polyline(int per_piece = 512) const {
        std::vector<Vec2> poly;
        poly.reserve(pieces_.size() * static_cast<std::size_t>(per_piece));
        for (const Piece& p : pieces_)
            for (int k = 0; k < per_piece; ++k)
                poly.push_back(p.eval(static_cast<double>(k) / per_piece));
        return poly;
    }

    // -- factories -----------------------------------------------------------

    static Curve circle(Vec2 center, double r) {
        Curve c;
        c.add_piece([center, r](double t) {
            const double a = 2.0 * std::numbers::pi * t;
            return Vec2{center.x + r * std::cos(a), center.y + r * std::sin(a)};
        });
        return c;
    }

    /// Axis-aligned ellipse x^2/a^2 + y^2/b^2 = 1 (semi-axes a, b).
    static Curve ellipse(double a, double b, Vec2 center = {}) {
        Curve c;
        c.add_piece([center, a, b](double t) {
            const double ang = 2.0 * std::numbers::pi * t;
            return Vec2{center.x + a * std::cos(ang), center.y + b * std::sin(ang)};
        });
        return c;
    }

    /// Star-shaped curve r(theta) around a center.
    static Curve polar(std::function<double(double)> radius, Vec2 center = {}) {
        Curve c;
        c.add_piece([center, radius = std::move(radius)](double t) {
            const double a = 2.0 * std::numbers::pi * t;
            const double r = radius(a);
            return Vec2{center.x + r * std::cos(a), center.y + r * std::sin(a)};
        });
        return c;
    }

    /// Axis-aligned rectangle of full size width x height with corners
    /// rounded at radius r, centered at `center`.
    static Curve rounded_rect(double width, double height, double r, Vec2 center = {}) {
        const double hx = width / 2.0, hy = height / 2.0;
        if (!(r >= 0.0) || r > std::min(hx, hy))
            throw std::invalid_argument("rounded_rect: invalid corner radius");
        Curve c;
        auto line = [&c](Vec2 a, Vec2 b) {
            if (norm(b - a) == 0.0) return;
            c.add_piece([a, b](double t) { return a + (b - a) * t; });
        };
        auto arc = [&c, r](Vec2 ctr, double a0, double a1) {
            if (r == 0.0) return;
            c.add_piece([ctr, r, a0, a1](double t) {
                const double a = a0 + (a1 - a0) * t;
                return Vec2{ctr.x + r * std::cos(a), ctr.y + r * std::sin(a)};
            });
        };
        const double pi = std::numbers::pi;
        line(center + Vec2{-hx + r, -hy}, center + Vec2{hx - r, -hy});
        arc(center + Vec2{hx - r, -hy + r}, -pi / 2, 0.0);
        line(center + Vec2{hx, -hy + r}, center + Vec2{hx, hy - r});
        arc(center + Vec2{hx - r, hy - r}, 0.0, pi / 2);
        line(center + Vec2{hx - r, hy}, center + Vec2{-hx + r, hy});
        arc(center + Vec2{-hx + r, hy - r}, pi / 2, pi);
        line(center + Vec2{-hx, hy - r}, center + Vec2{-hx, -hy + r});
        arc(center + Vec2{-hx + r, -hy + r}, pi, 3 * pi / 2);
        return c;
    }

    /// Closed CCW polygon through the given vertices.
    static Curve polygon(const std::vector<Vec2>& vertices) {
        if (vertices.size() < 3) throw std::invalid_argument("polygon: need >= 3 vertices");
        Curve c;
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const Vec2 a = vertices[i];
            const Vec2 b = vertices[(i + 1) % vertices.size()];
            c.add_piece([a, b](double t) { return a + (b - a) * t; });
        }
        return c;
    }

    /// Closed CCW polygon with every corner replaced by a circular arc of
    /// radius rho (tangent to both edges). rho = 0 falls back to the sharp
    /// polygon.
    static Curve rounded_polygon(const std::vector<Vec2>& vertices, double rho) {
        if (rho == 0.0) return polygon(vertices);
        if (!(rho > 0.0)) throw std::invalid_argument("rounded_polygon: negative radius");
        const std::size_t n = vertices.size();
        if (n < 3) throw std::invalid_argument("rounded_polygon: need >= 3 vertices");
        struct Corner {
            Vec2 start, end;    // arc endpoints on the two edges
            Vec2 center;
            double a0, a1;      // arc angles (signed sweep)
        };
        std::vector<Corner> corners(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 prev = vertices[(i + n - 1) % n];
            const Vec2 v = vertices[i];
            const Vec2 next = vertices[(i + 1) % n];
            const Vec2 t1 = normalized(v - prev);
            const Vec2 t2 = normalized(next - v);
            const double sweep = std::atan2(cross(t1, t2), dot(t1, t2));
            const double trim = rho * std::abs(std::tan(sweep / 2.0));
            if (trim > 0.5 * std::min(norm(v - prev), norm(next - v)))
                throw std::invalid_argument("rounded_polygon: radius too large for an edge");
            Corner& c = corners[i];
            c.start = v - t1 * trim;
            c.end = v + t2 * trim;
            const Vec2 n1 = sweep > 0 ? rot_ccw(t1) : rot_cw(t1);
            c.center = c.start + n1 * rho;
            const Vec2 r0 = c.start - c.center;
            const Vec2 r1 = c.end - c.center;
            c.a0 = std::atan2(r0.y, r0.x);
            c.a1 = c.a0 + std::atan2(cross(r0, r1), dot(r0, r1));
        }
        Curve c;
        for (std::size_t i = 0; i < n; ++i) {
            const Corner& ci = corners[i];
            const Corner& cj = corners[(i + 1) % n];
            c.add_piece([ctr = ci.center, rho, a0 = ci.a0, a1 = ci.a1](double t) {
                const double a = a0 + (a1 - a0) * t;
                return Vec2{ctr.x + rho * std::cos(a), ctr.y + rho * std::sin(a)};
            });
            const Vec2 a = ci.end, b = cj.start;
            if (norm(b - a) > 0.0)
                c.add_piece([a, b](double t) { return a + (b - a) * t; });
        }
        return c;
    }

    /// L-shaped block (-q,q)^2 \ [0,q]^2: a square with one quadrant removed.
    /// Corners are rounded at radius rho when rho > 0.
    static Curve lshape(double q = 0.25, double rho = 0.0) {
        const std::vector<Vec2> verts{{-q, -q}, {q, -q}, {q, 0.0},
                                      {0.0, 0.0}, {0.0, q}, {-q, q}};
        return rho > 0.0 ? rounded_polygon(verts, rho) : polygon(verts);
    }

private:
    std::vector<Piece> pieces_;
};

} // namespace cmm

#endif
