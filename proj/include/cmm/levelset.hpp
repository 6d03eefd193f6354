#ifndef CMM_LEVELSET_HPP
#define CMM_LEVELSET_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include "cmm/vec2.hpp"

namespace cmm {

/// Analytic level-set function phi(x,t) with exact derivatives. The moving
/// domain it encodes is {phi < 0}; the free boundary is the zero set. The
/// anchor must stay strictly inside the zero set over the validity window
/// (it seeds ray casts when locating the zero set).
struct LevelSet {
    std::function<double(Vec2, double)> phi;
    std::function<Vec2(Vec2, double)> grad;
    std::function<Mat2(Vec2, double)> hess;
    std::function<double(Vec2, double)> dphi_dt;
    double t_min = 0.0;
    double t_max = 1.0;
    Vec2 anchor{0.0, 0.0};
};

/// Expanding ellipse x1^2/(2(t+1)) + x2^2/(t+1) - 1, valid on [0,1].
inline LevelSet expanding_ellipse_levelset() {
    LevelSet ls;
    ls.phi = [](Vec2 x, double t) {
        return x.x * x.x / (2.0 * (t + 1.0)) + x.y * x.y / (t + 1.0) - 1.0;
    };
    ls.grad = [](Vec2 x, double t) {
        return Vec2{x.x / (t + 1.0), 2.0 * x.y / (t + 1.0)};
    };
    ls.hess = [](Vec2, double t) {
        Mat2 h;
        h.xx = 1.0 / (t + 1.0);
        h.xy = 0.0;
        h.yy = 2.0 / (t + 1.0);
        return h;
    };
    ls.dphi_dt = [](Vec2 x, double t) {
        const double d = (t + 1.0) * (t + 1.0);
        return -x.x * x.x / (2.0 * d) - x.y * x.y / d;
    };
    ls.t_min = 0.0;
    ls.t_max = 1.0;
    return ls;
}

/// Circle of radius R(t) = sqrt(1 - t): phi = |x|^2 - (1 - t), valid on
/// [0, 1/2] so the radius stays clear of the inner obstacle used with it.
inline LevelSet shrinking_circle_levelset() {
    LevelSet ls;
    ls.phi = [](Vec2 x, double t) { return norm2(x) - (1.0 - t); };
    ls.grad = [](Vec2 x, double) { return x * 2.0; };
    ls.hess = [](Vec2, double) {
        Mat2 h;
        h.xx = 2.0;
        h.xy = 0.0;
        h.yy = 2.0;
        return h;
    };
    ls.dphi_dt = [](Vec2, double) { return 1.0; };
    ls.t_min = 0.0;
    ls.t_max = 0.5;
    return ls;
}

/// Static circle of radius R.
inline LevelSet circle_levelset(double R) {
    LevelSet ls;
    ls.phi = [R](Vec2 x, double) { return norm2(x) - R * R; };
    ls.grad = [](Vec2 x, double) { return x * 2.0; };
    ls.hess = [](Vec2, double) {
        Mat2 h;
        h.xx = 2.0;
        h.xy = 0.0;
        h.yy = 2.0;
        return h;
    };
    ls.dphi_dt = [](Vec2, double) { return 0.0; };
    ls.t_min = 0.0;
    ls.t_max = 1.0;
    return ls;
}

/// Sampling check of the level-set invariants: the gradient does not vanish
/// on the zero set and the given points (typically fixed-boundary nodes) lie
/// strictly inside {phi < 0}. Throws on violation.
inline void check_levelset(const LevelSet& ls, const std::vector<Vec2>& inside_points,
                           int time_samples = 8, int angle_samples = 64) {
    for (int it = 0; it <= time_samples; ++it) {
        const double t = ls.t_min + (ls.t_max - ls.t_min) * it / time_samples;
        for (const Vec2& p : inside_points)
            if (!(ls.phi(p, t) < 0.0))
                throw std::runtime_error("level set is not negative on the fixed region");
        // probe the zero set along rays from the anchor
        for (int ia = 0; ia < angle_samples; ++ia) {
            const double a = 6.283185307179586 * ia / angle_samples;
            const Vec2 d{std::cos(a), std::sin(a)};
            double lo = 0.0, hi = 1.0;
            while (ls.phi(ls.anchor + d * hi, t) < 0.0 && hi < 1e6) hi *= 2.0;
            if (hi >= 1e6) throw std::runtime_error("level-set zero set not found along ray");
            for (int k = 0; k < 80; ++k) {
                const double mid = 0.5 * (lo + hi);
                (ls.phi(ls.anchor + d * mid, t) < 0.0 ? lo : hi) = mid;
            }
            const Vec2 z = ls.anchor + d * (0.5 * (lo + hi));
            if (!(norm(ls.grad(z, t)) > 0.0))
                throw std::runtime_error("level-set gradient vanishes on the zero set");
        }
    }
}

} // namespace cmm

#endif
