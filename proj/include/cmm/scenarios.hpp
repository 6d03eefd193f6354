#ifndef CMM_SCENARIOS_HPP
#define CMM_SCENARIOS_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmm/config.hpp"
#include "cmm/curve.hpp"
#include "cmm/flow.hpp"
#include "cmm/io.hpp"
#include "cmm/manufactured.hpp"
#include "cmm/meshgen.hpp"

namespace cmm {

/// Everything a scenario run needs, with per-scenario defaults and
/// `key = value` overrides.
struct SimulationConfig {
    std::string scenario;
    double eps = 0.1;
    double tau = 0.1;
    double T = 1.0;
    double h = 0.1;
    int alpha = 1;
    double lambda = 0.0;

    std::string inner_kind = "circle";  // circle | lshape
    double inner_radius = 0.5;
    double lshape_half = 0.25;

    std::string outer_kind = "ellipse";  // circle | ellipse | rounded_rect | star
    double outer_radius = 1.0;
    double outer_a = std::sqrt(2.0);
    double outer_b = 1.0;
    double outer_width = 1.2;
    double outer_height = 1.2;
    double outer_corner_radius = 0.2;

    std::string bernoulli_shape = "all";  // all | circle | rounded_square | rounded_rect

    std::string out_dir = "out";
    int stride = 0;  // 0: one snapshot every N_T/20 steps

    int n_steps() const { return static_cast<int>(std::llround(T / tau)); }

    void validate() const {
        if (!(eps > 0.0)) throw std::runtime_error("config: eps must be > 0");
        if (!(tau > 0.0)) throw std::runtime_error("config: tau must be > 0");
        if (!(T >= tau)) throw std::runtime_error("config: T must be >= tau");
        if (!(h > 0.0)) throw std::runtime_error("config: h must be > 0");
        if (alpha != 0 && alpha != 1) throw std::runtime_error("config: alpha must be 0 or 1");
        if (stride < 0) throw std::runtime_error("config: stride must be >= 0");
    }

    void apply(const KeyValueConfig& kv) {
        eps = kv.get_double("eps", eps);
        tau = kv.get_double("tau", tau);
        T = kv.get_double("T", T);
        h = kv.get_double("h", h);
        alpha = kv.get_int("alpha", alpha);
        lambda = kv.get_double("lambda", lambda);
        inner_kind = kv.get_string("inner.kind", inner_kind);
        inner_radius = kv.get_double("inner.radius", inner_radius);
        lshape_half = kv.get_double("inner.lshape_half", lshape_half);
        outer_kind = kv.get_string("outer.kind", outer_kind);
        outer_radius = kv.get_double("outer.radius", outer_radius);
        outer_a = kv.get_double("outer.a", outer_a);
        outer_b = kv.get_double("outer.b", outer_b);
        outer_width = kv.get_double("outer.width", outer_width);
        outer_height = kv.get_double("outer.height", outer_height);
        outer_corner_radius = kv.get_double("outer.corner_radius", outer_corner_radius);
        bernoulli_shape = kv.get_string("bernoulli.shape", bernoulli_shape);
        out_dir = kv.get_string("out_dir", out_dir);
        stride = kv.get_int("stride", stride);
    }
};

inline SimulationConfig default_config(const std::string& scenario) {
    SimulationConfig c;
    c.scenario = scenario;
    if (scenario == "heleshaw-classic") {
        c.eps = 0.1;
        c.tau = 0.1;
        c.T = 2.0;
        c.h = 0.1;
        c.alpha = 1;
        c.lambda = 0.0;
        c.inner_kind = "circle";
        c.inner_radius = 0.5;
        c.outer_kind = "ellipse";
        c.outer_a = std::sqrt(2.0);
        c.outer_b = 1.0;
    } else if (scenario == "bernoulli") {
        c.eps = 0.1;
        c.tau = 0.001;
        c.T = 1.0;
        c.h = 0.025;
        c.alpha = 0;
        c.lambda = -10.0;
        c.inner_kind = "lshape";
        c.bernoulli_shape = "all";
    } else if (scenario == "mcf") {
        c.eps = 0.1;
        c.tau = 5e-4;
        c.T = 1.0;
        c.h = 0.2;
        c.inner_kind = "circle";
        c.inner_radius = 0.5;
        c.outer_kind = "star";
    } else {
        throw std::runtime_error("unknown scenario: " + scenario);
    }
    return c;
}

inline Curve build_inner_curve(const SimulationConfig& c) {
    if (c.inner_kind == "circle") return Curve::circle({0.0, 0.0}, c.inner_radius);
    if (c.inner_kind == "lshape") return Curve::lshape(c.lshape_half);
    throw std::runtime_error("unknown inner boundary kind: " + c.inner_kind);
}

inline Curve build_outer_curve(const SimulationConfig& c, const std::string& shape = "") {
    const std::string kind = shape.empty() ? c.outer_kind : shape;
    if (kind == "circle") return Curve::circle({0.0, 0.0}, c.outer_radius);
    if (kind == "ellipse") return Curve::ellipse(c.outer_a, c.outer_b);
    if (kind == "rounded_square")
        return Curve::rounded_rect(c.outer_width, c.outer_width, c.outer_corner_radius);
    if (kind == "rounded_rect")
        return Curve::rounded_rect(c.outer_width, c.outer_height, c.outer_corner_radius);
    if (kind == "star")
        return Curve::polar([](double th) { return 2.0 / (2.0 - std::cos(5.0 * th)); });
    throw std::runtime_error("unknown outer boundary kind: " + kind);
}

inline FlowSpec build_flow_spec(const SimulationConfig& c) {
    FlowSpec spec;
    if (c.scenario == "heleshaw-classic") {
        spec.kind = FlowKind::HeleShaw;
        spec.f = [](Vec2, double) { return 0.0; };
        spec.q_B = [](Vec2, double) { return 1.0; };
        spec.alpha = c.alpha;
        spec.lambda = c.lambda;
    } else if (c.scenario == "bernoulli") {
        spec.kind = FlowKind::Bernoulli;
        spec.f = [](Vec2, double) { return 0.0; };
        spec.q_B = [](Vec2, double) { return 1.0; };
        spec.alpha = c.alpha;  // Dirichlet u = 1 on the fixed boundary
        spec.lambda = c.lambda;
    } else if (c.scenario == "mcf") {
        spec.kind = FlowKind::Mcf;
    } else {
        throw std::runtime_error("unknown scenario: " + c.scenario);
    }
    return spec;
}

namespace scenarios_detail {

inline std::string snapshot_name(int k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "mesh_%06d.vtk", k);
    return buf;
}

} // namespace scenarios_detail

/// One full simulation into out_dir: VTK snapshots every `stride` steps,
/// a diagnostics row and a trajectory block per step. Returns 0, or 2 after
/// an inverted-element abort (partial outputs are kept, the abort is
/// reported on stderr).
inline int run_single_scenario(const SimulationConfig& cfg, const Curve& inner,
                               const Curve& outer, const FlowSpec& spec,
                               const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const int n_steps = cfg.n_steps();
    const int stride = cfg.stride > 0 ? cfg.stride : std::max(1, n_steps / 20);

    SimulationState s;
    s.mesh = generate_annulus_mesh(outer, inner, cfg.h);

    DiagnosticsCsv diag(out_dir + "/diagnostics.csv");
    TrajectoryCsv traj(out_dir + "/trajectory.csv");
    try {
        for (int k = 0; k < n_steps; ++k) {
            SimulationState next = step(s, spec, cfg.eps, cfg.tau);
            // next.u / next.w live on the pre-move mesh s.mesh
            SimulationState at_k{k, s.time, s.mesh, next.u, next.w};
            diag.append(collect_diagnostics(at_k, spec));
            traj.append(k, s.mesh);
            if (k % stride == 0)
                write_vtk(s.mesh, out_dir + "/" + scenarios_detail::snapshot_name(k),
                          spec.needs_state() ? &next.u : nullptr, &next.w);
            s = std::move(next);
        }
        if (spec.needs_state())
            s.u = solve_state(s.mesh, spec.f, spec.q_B, spec.alpha, s.time);
        diag.append(collect_diagnostics(s, spec));
        traj.append(n_steps, s.mesh);
        write_vtk(s.mesh, out_dir + "/" + scenarios_detail::snapshot_name(n_steps),
                  spec.needs_state() ? &s.u : nullptr, nullptr);
    } catch (const InvertedElementError& err) {
        std::cerr << "aborted: " << err.what() << "\n";
        return 2;
    }
    return 0;
}

/// Scenario dispatch. The bernoulli scenario runs its three initial shapes
/// (or just the one selected) into per-shape subdirectories.
inline int run_scenario(const SimulationConfig& cfg) {
    cfg.validate();
    const Curve inner = build_inner_curve(cfg);
    const FlowSpec spec = build_flow_spec(cfg);
    if (cfg.scenario == "bernoulli") {
        std::vector<std::string> shapes;
        if (cfg.bernoulli_shape == "all")
            shapes = {"circle", "rounded_square", "rounded_rect"};
        else
            shapes = {cfg.bernoulli_shape};
        int status = 0;
        for (const std::string& shape : shapes) {
            SimulationConfig shaped = cfg;
            if (shape == "circle") shaped.outer_radius = 0.6;
            if (shape == "rounded_square") {
                shaped.outer_width = 1.2;
                shaped.outer_corner_radius = 0.2;
            }
            if (shape == "rounded_rect") {
                shaped.outer_width = 1.6;
                shaped.outer_height = 1.0;
                shaped.outer_corner_radius = 0.2;
            }
            const Curve outer = build_outer_curve(shaped, shape);
            const int rc = run_single_scenario(shaped, inner, outer, spec,
                                               cfg.out_dir + "/" + shape);
            status = std::max(status, rc);
        }
        return status;
    }
    const Curve outer = build_outer_curve(cfg);
    return run_single_scenario(cfg, inner, outer, spec, cfg.out_dir);
}

// -- EOC command --------------------------------------------------------------

struct EocOptions {
    std::string scenario;          // heleshaw | mcf
    int hfactor = 0;               // 0: scenario default (1 or 200)
    std::vector<double> eps_list;  // empty: scenario default
    std::string out_dir = "out";
};

inline std::vector<double> default_eoc_taus(const std::string& scenario, int hfactor) {
    std::vector<double> taus;
    if (scenario == "heleshaw") {
        taus = {0.1, 0.05, 0.025, 0.0125};
    } else {  // mcf: tau = 1/(hfactor * 2^m)
        const int m_max = hfactor == 100 ? 5 : 4;
        for (int m = 0; m <= m_max; ++m)
            taus.push_back(1.0 / (hfactor * std::pow(2.0, m)));
    }
    return taus;
}

inline int run_eoc_command(const EocOptions& opt) {
    std::string name = opt.scenario;
    if (name == "heleshaw-eoc") name = "heleshaw";
    if (name == "mcf-eoc") name = "mcf";
    if (name != "heleshaw" && name != "mcf")
        throw std::runtime_error("unknown eoc scenario: " + opt.scenario);

    const EocScenario sc = name == "heleshaw" ? heleshaw_eoc_scenario() : mcf_eoc_scenario();
    const int hfactor = opt.hfactor > 0 ? opt.hfactor : (name == "heleshaw" ? 1 : 200);
    std::vector<double> eps_list = opt.eps_list;
    if (eps_list.empty())
        eps_list = name == "heleshaw" ? std::vector<double>{1e-2, 1e-4}
                                      : std::vector<double>{1e-2};

    std::vector<EocPoint> grid;
    for (double tau : default_eoc_taus(name, hfactor))
        for (double eps : eps_list)
            grid.push_back({tau, hfactor * tau, eps});

    const EocReport rep = run_eoc(sc, grid);

    namespace fs = std::filesystem;
    fs::create_directories(opt.out_dir);
    write_eoc_csv(rep, opt.out_dir + "/eoc.csv");
    const std::string summary = eoc_summary(rep);
    {
        std::ofstream out(opt.out_dir + "/eoc_summary.txt", std::ios::binary);
        out << summary;
    }
    std::cout << summary;
    return 0;
}

} // namespace cmm

#endif
