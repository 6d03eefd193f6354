#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmm/scenarios.hpp"

int main(int argc, char** argv) {
    CLI::App app{"comoving-mesh finite element simulator for 2D moving boundary problems"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand(
        "run", "run a scenario (heleshaw-classic, bernoulli, mcf)");
    std::string scenario;
    run->add_option("scenario", scenario, "scenario name")->required();
    std::string config_path;
    run->add_option("--config", config_path, "key = value config file");
    std::string out_dir;
    auto* opt_out = run->add_option("--out", out_dir, "output directory");
    double eps = 0, tau = 0, T = 0, h = 0;
    auto* opt_eps = run->add_option("--eps", eps, "Robin regularization parameter");
    auto* opt_tau = run->add_option("--tau", tau, "time step");
    auto* opt_T = run->add_option("--T", T, "final time");
    auto* opt_h = run->add_option("--h", h, "target mesh width");

    auto* eoc = app.add_subcommand(
        "eoc", "manufactured-solution convergence study (heleshaw, mcf)");
    std::string eoc_scenario;
    eoc->add_option("scenario", eoc_scenario, "study name")->required();
    int hfactor = 0;
    eoc->add_option("--hfactor", hfactor, "mesh width as a multiple of tau");
    std::vector<double> eps_list;
    eoc->add_option("--eps", eps_list, "epsilon values")->delimiter(',');
    std::string eoc_out = "out";
    eoc->add_option("--out", eoc_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (scenario.find("-eoc") != std::string::npos)
                throw std::runtime_error("scenario " + scenario +
                                         " is a convergence study; use the eoc subcommand");
            cmm::SimulationConfig cfg = cmm::default_config(scenario);
            if (!config_path.empty())
                cfg.apply(cmm::KeyValueConfig::parse_file(config_path));
            if (opt_out->count()) cfg.out_dir = out_dir;
            if (opt_eps->count()) cfg.eps = eps;
            if (opt_tau->count()) cfg.tau = tau;
            if (opt_T->count()) cfg.T = T;
            if (opt_h->count()) cfg.h = h;
            cfg.validate();
            return cmm::run_scenario(cfg);
        }
        cmm::EocOptions opt;
        opt.scenario = eoc_scenario;
        opt.hfactor = hfactor;
        opt.eps_list = eps_list;
        opt.out_dir = eoc_out;
        return cmm::run_eoc_command(opt);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
