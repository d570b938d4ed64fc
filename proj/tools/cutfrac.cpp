#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cutfrac/driver.hpp"
#include "cutfrac/errors.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string nx_spec;
    double tau1 = 0.0, tau2 = 0.0;
    std::string out_dir;
    bool vtk = false, csv = false, check_identities = false, deterministic = false;
};

std::vector<int> parse_nx_list(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw cutfrac::ParamError("empty nx list '" + spec + "'");
    return out;
}

void attach_common(CLI::App* cmd, CommonFlags& f, std::string& domain) {
    cmd->add_option("domain", domain, "preset name (example1..example5) or domain JSON path")
        ->required();
    cmd->add_option("--config", f.config_path, "RunConfig JSON file (flags override it)");
    cmd->add_option("--nx", f.nx_spec, "cells per side, single value or comma list");
    cmd->add_option("--tau1", f.tau1, "GLS parameter (> 0)");
    cmd->add_option("--tau2", f.tau2, "gradient stabilization parameter (>= 0)");
    cmd->add_option("--out", f.out_dir, "output directory (default $CUTFRAC_OUT or .)");
    cmd->add_flag("--vtk", f.vtk, "write VTK output");
    cmd->add_flag("--csv", f.csv, "write CSV output");
    cmd->add_flag("--check-identities", f.check_identities,
                  "verify the coercivity identity after solving");
    cmd->add_flag("--deterministic", f.deterministic,
                  "single-threaded fixed-order assembly (bitwise reproducible)");
}

cutfrac::RunConfig merge_config(const CLI::App* cmd, const CommonFlags& f,
                                const std::string& domain) {
    cutfrac::RunConfig cfg;
    if (!f.config_path.empty()) cfg = cutfrac::parse_config_file(f.config_path);
    if (!domain.empty()) cfg.domain_source = domain;
    if (cmd->count("--nx")) cfg.nx = parse_nx_list(f.nx_spec);
    if (cmd->count("--tau1")) cfg.tau1 = f.tau1;
    if (cmd->count("--tau2")) cfg.tau2 = f.tau2;
    if (cmd->count("--out")) cfg.out_dir = f.out_dir;
    if (cmd->count("--vtk")) cfg.emit_vtk = f.vtk;
    if (cmd->count("--csv")) cfg.emit_csv = f.csv;
    if (cmd->count("--check-identities")) cfg.check_identities = f.check_identities;
    if (cmd->count("--deterministic")) cfg.deterministic = f.deterministic;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cutfrac: cut finite element solver for convection on fractured domains"};
    app.require_subcommand(1);

    std::string run_domain, conv_domain, check_domain;
    CommonFlags run_flags, conv_flags, check_flags;
    bool enforce = false;

    CLI::App* run = app.add_subcommand("run", "solve one preset or domain file");
    attach_common(run, run_flags, run_domain);

    CLI::App* conv = app.add_subcommand("converge", "mesh refinement study");
    attach_common(conv, conv_flags, conv_domain);
    conv->add_flag("--enforce", enforce, "exit nonzero when the energy slope is below 1.4");

    CLI::App* check = app.add_subcommand("check", "identity and diagnostic suite");
    attach_common(check, check_flags, check_domain);

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            return cutfrac::run_solve(merge_config(run, run_flags, run_domain), std::cout);
        }
        if (conv->parsed()) {
            cutfrac::RunConfig cfg = merge_config(conv, conv_flags, conv_domain);
            if (conv->count("--enforce")) cfg.enforce = enforce;
            return cutfrac::run_convergence(cfg, std::cout);
        }
        if (check->parsed()) {
            return cutfrac::run_check(merge_config(check, check_flags, check_domain),
                                      std::cout);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const cutfrac::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
