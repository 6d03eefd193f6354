#ifndef CMM_IO_HPP
#define CMM_IO_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmm/fields.hpp"
#include "cmm/flow.hpp"
#include "cmm/manufactured.hpp"
#include "cmm/mesh.hpp"

namespace cmm {

namespace io_detail {

/// Shortest round-trip decimal form; keeps re-runs byte-identical.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline games
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

} // namespace io_detail

/// VTK legacy ASCII 3.0 unstructured grid: triangle cells (type 5) followed
/// by boundary-edge line cells (type 3), with an integer CELL_DATA label
/// (0 interior, 1 fixed, 2 free). Optional nodal fields are emitted as
/// POINT_DATA.
inline void write_vtk(const Mesh& m, const std::string& path,
                      const ScalarField* u = nullptr, const VectorField* w = nullptr) {
    using io_detail::fmt;
    std::ofstream out = io_detail::open_out(path);
    out << "# vtk DataFile Version 3.0\n";
    out << "annulus mesh snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << m.node_count() << " double\n";
    for (const Vec2& p : m.nodes())
        out << fmt(p.x) << " " << fmt(p.y) << " 0\n";

    const int ncells = m.triangle_count() + m.boundary_edge_count();
    const int ints = m.triangle_count() * 4 + m.boundary_edge_count() * 3;
    out << "CELLS " << ncells << " " << ints << "\n";
    for (const Triangle& t : m.triangles())
        out << "3 " << t.a << " " << t.b << " " << t.c << "\n";
    for (const BoundaryEdge& e : m.boundary_edges())
        out << "2 " << e.a << " " << e.b << "\n";
    out << "CELL_TYPES " << ncells << "\n";
    for (int i = 0; i < m.triangle_count(); ++i) out << "5\n";
    for (int i = 0; i < m.boundary_edge_count(); ++i) out << "3\n";

    out << "CELL_DATA " << ncells << "\n";
    out << "SCALARS boundary_label int 1\n";
    out << "LOOKUP_TABLE default\n";
    for (int i = 0; i < m.triangle_count(); ++i) out << "0\n";
    for (const BoundaryEdge& e : m.boundary_edges())
        out << (e.label == BoundaryLabel::Fixed ? "1\n" : "2\n");

    if (u || w) {
        out << "POINT_DATA " << m.node_count() << "\n";
        if (u) {
            if (u->size() != m.node_count())
                throw std::invalid_argument("write_vtk: scalar field size mismatch");
            out << "SCALARS u double 1\n";
            out << "LOOKUP_TABLE default\n";
            for (int i = 0; i < m.node_count(); ++i) out << fmt((*u)[i]) << "\n";
        }
        if (w) {
            if (w->size() != m.node_count())
                throw std::invalid_argument("write_vtk: vector field size mismatch");
            out << "VECTORS w double\n";
            for (int i = 0; i < m.node_count(); ++i)
                out << fmt((*w)[i].x) << " " << fmt((*w)[i].y) << " 0\n";
        }
    }
}

/// Plain-text mesh: header `N_p N_e N_b`, node coordinates, triangle node
/// triples, then labeled boundary edges (`a b label`, label fixed|free).
inline void write_mesh_text(const Mesh& m, const std::string& path) {
    using io_detail::fmt;
    std::ofstream out = io_detail::open_out(path);
    out << m.node_count() << " " << m.triangle_count() << " " << m.boundary_edge_count()
        << "\n";
    for (const Vec2& p : m.nodes()) out << fmt(p.x) << " " << fmt(p.y) << "\n";
    for (const Triangle& t : m.triangles()) out << t.a << " " << t.b << " " << t.c << "\n";
    for (const BoundaryEdge& e : m.boundary_edges())
        out << e.a << " " << e.b << " "
            << (e.label == BoundaryLabel::Fixed ? "fixed" : "free") << "\n";
}

/// Per-step diagnostics stream with the fixed column set used by every
/// scenario runner.
class DiagnosticsCsv {
public:
    explicit DiagnosticsCsv(const std::string& path) : out_(io_detail::open_out(path)) {
        out_ << "k,t,area,boundary_length,min_angle,min_area,stationarity_residual\n";
    }

    void append(const StepDiagnostics& d) {
        using io_detail::fmt;
        out_ << d.k << "," << fmt(d.t) << "," << fmt(d.area) << ","
             << fmt(d.boundary_length) << "," << fmt(d.min_angle) << ","
             << fmt(d.min_area) << "," << fmt(d.stationarity_residual) << "\n";
    }

private:
    std::ofstream out_;
};

/// Free-boundary node positions per step: `k,node_id,x,y`.
class TrajectoryCsv {
public:
    explicit TrajectoryCsv(const std::string& path) : out_(io_detail::open_out(path)) {
        out_ << "k,node_id,x,y\n";
    }

    void append(int k, const Mesh& m) {
        using io_detail::fmt;
        for (int i : m.boundary_nodes(BoundaryLabel::Free))
            out_ << k << "," << i << "," << fmt(m.node(i).x) << "," << fmt(m.node(i).y)
                 << "\n";
    }

private:
    std::ofstream out_;
};

inline void write_eoc_csv(const EocReport& rep, const std::string& path) {
    using io_detail::fmt;
    std::ofstream out = io_detail::open_out(path);
    out << "tau,h,eps,err_gamma,err_l2,err_h1,status\n";
    for (const EocRow& r : rep.rows)
        out << fmt(r.tau) << "," << fmt(r.h) << "," << fmt(r.eps) << ","
            << fmt(r.err_gamma) << "," << fmt(r.err_l2) << "," << fmt(r.err_h1) << ","
            << (r.aborted ? "aborted" : "ok") << "\n";
}

/// One line per error with the fitted log-log slopes.
inline std::string eoc_summary(const EocReport& rep) {
    using io_detail::fmt;
    std::string s;
    s += "err_gamma: slope vs tau = " + fmt(rep.slope_gamma_vs_tau) +
         ", slope vs eps (pre-saturation) = " + fmt(rep.slope_gamma_vs_eps) + "\n";
    s += "err_l2: slope vs tau = " + fmt(rep.slope_l2_vs_tau) + "\n";
    s += "err_h1: slope vs tau = " + fmt(rep.slope_h1_vs_tau) + "\n";
    return s;
}

} // namespace cmm

#endif
