#ifndef CUTFRAC_DRIVER_HPP
#define CUTFRAC_DRIVER_HPP

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "cutfrac/post.hpp"

namespace cutfrac {

/// Names of the shipped example presets.
const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);
/// Resolves a preset to its JSON file under the preset directory
/// (CUTFRAC_PRESET_DIR environment variable overrides the built-in path).
std::string preset_path(const std::string& name);
/// Loads a preset by name or an arbitrary domain JSON by path.
FracturedDomain load_domain_source(const std::string& source);

struct RunConfig {
    std::string domain_source;
    std::vector<int> nx = {10};
    double tau1 = 1e-2;
    double tau2 = 1e-3;
    std::string out_dir;
    bool emit_vtk = false;
    bool emit_csv = false;
    bool check_identities = false;
    bool deterministic = false;
    bool enforce = false;

    void validate() const; // tau1 > 0, tau2 >= 0, nx >= 2, >= 1 level
};

/// Strict JSON config: unknown keys are rejected; missing keys keep defaults.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_json(const std::string& text);

/// One assembled-and-solved case; owns domain and discretization so the
/// solution field's references stay valid across moves.
struct SolveCase {
    std::unique_ptr<FracturedDomain> dom;
    std::unique_ptr<Discretization> disc;
    AssembledSystem sys;
    std::unique_ptr<SolutionField> u;
    double solve_residual = 0.0; // ||A x - b||_inf
};

SolveCase solve_case(FracturedDomain dom, int nx, const AssemblyParams& params);

int run_solve(const RunConfig& cfg, std::ostream& log);
int run_convergence(const RunConfig& cfg, std::ostream& log);
int run_check(const RunConfig& cfg, std::ostream& log);

} // namespace cutfrac

#endif
