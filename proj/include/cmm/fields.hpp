#ifndef CMM_FIELDS_HPP
#define CMM_FIELDS_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cmm/vec2.hpp"

namespace cmm {

/// P1 nodal scalar coefficients; one value per mesh node.
struct ScalarField {
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(int n, double fill = 0.0)
        : values(static_cast<std::size_t>(n), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

/// P1 nodal 2D vector coefficients; one vector per mesh node.
struct VectorField {
    std::vector<Vec2> values;

    VectorField() = default;
    explicit VectorField(int n, Vec2 fill = {})
        : values(static_cast<std::size_t>(n), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    Vec2& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    const Vec2& operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    /// Interleaved (x0,y0,x1,y1,...) copy, matching vector-valued dof layout.
    std::vector<double> interleaved() const {
        std::vector<double> out(values.size() * 2);
        for (std::size_t i = 0; i < values.size(); ++i) {
            out[2 * i] = values[i].x;
            out[2 * i + 1] = values[i].y;
        }
        return out;
    }
    static VectorField from_interleaved(const std::vector<double>& v) {
        if (v.size() % 2 != 0) throw std::invalid_argument("odd interleaved length");
        VectorField f(static_cast<int>(v.size() / 2));
        for (std::size_t i = 0; i < f.values.size(); ++i)
            f.values[i] = {v[2 * i], v[2 * i + 1]};
        return f;
    }
};

/// P0 data on the free boundary; one value per free edge, ordered as
/// Mesh::edge_ids(BoundaryLabel::Free).
template <class T>
struct EdgeField {
    std::vector<T> values;

    EdgeField() = default;
    explicit EdgeField(int n, T fill = T{}) : values(static_cast<std::size_t>(n), fill) {}

    int size() const { return static_cast<int>(values.size()); }
    T& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
    const T& operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
};

} // namespace cmm

#endif
