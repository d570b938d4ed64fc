#ifndef CUTFRAC_POST_HPP
#define CUTFRAC_POST_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cutfrac/solution.hpp"

namespace cutfrac {

/// Builds the per-component analytic solution from the domain's `exact` fields.
/// Empty optional when any component lacks one. The returned field references
/// `dom`, which must outlive it.
std::optional<AnalyticField> exact_solution(const FracturedDomain& dom);

/// sqrt(integral of (u_h - u)^2) over one component by cut quadrature;
/// absolute difference for d=0 components.
double l2_error(const SolutionField& u_h, const AnalyticField& u, ComponentId comp,
                int degree = 5);

/// max |u_h - u| over the component's cut quadrature points and cut-entity
/// vertices (for d=0, the point itself).
double linf_error(const SolutionField& u_h, const AnalyticField& u, ComponentId comp);

/// Energy-norm breakdown of e = u_h - u: per-component squared contributions.
struct ErrorReport {
    struct Row {
        ComponentId comp;
        double l2_sq = 0.0;        // ||e||^2 on the component
        double residual_sq = 0.0;  // h ||L e||^2
        double stab_sq = 0.0;      // s_h(e, e)
        double jump_interface_sq = 0.0; // inflow-weighted jumps on interior boundaries
        double jump_boundary_sq = 0.0;  // inflow-weighted trace on the outer boundary
    };
    std::vector<Row> rows;
    double h = 0.0;
    std::size_t dof_count = 0;

    double l2_total_sq() const;
    double energy_total_sq() const;
    double l2() const;
    double energy() const;
};

ErrorReport energy_error(const SolutionField& u_h, const AnalyticField& u,
                         const AssemblyParams& params);

/// Least-squares slope of log(error) against log(h) plus pairwise rates.
struct ConvergenceRates {
    double slope = 0.0;
    std::vector<double> pairwise; // size levels-1; NaN where undefined
};
ConvergenceRates convergence_rates(const std::vector<std::pair<double, double>>& h_err);

/// Flux balance at a bifurcation point, evaluated from one-sided crack endpoint
/// traces of the discrete solution. `discrete` uses the scheme's numerical flux
/// (endpoint trace plus the inflow jump penalty), which the assembled point row
/// conserves exactly; `strong` is the plain strong-form residual
/// |sum nu.beta u_1,i - alpha0 u0 + f0|, which the two coincide with whenever the
/// inflow traces are continuous. `scale` is the largest incident magnitude.
struct PointBalance {
    double discrete = 0.0;
    double strong = 0.0;
    double scale = 0.0;
};
PointBalance point_balance(const SolutionField& u_h, int point_index);

/// Discrete coercivity identity: v^T A v against the independently quadratured
/// right-hand side ((alpha + Div beta / 2) v, v) + |nu.beta|-weighted half-jumps
/// + tau1 h ||L v||^2 + s_h(v, v).
struct CoercivityIdentity {
    double lhs = 0.0;
    double rhs = 0.0;
    double scale = 0.0;
    double residual() const;
};
CoercivityIdentity coercivity_identity(const AssembledSystem& sys, const SolutionField& v,
                                       const AssemblyParams& params);

/// Legacy ASCII VTK export, one file per component next to `base_path`
/// (suffix _d<dim>_<index>.vtk). Returns the written file names.
std::vector<std::string> export_vtk(const SolutionField& u, const std::string& base_path);

/// CSV with 17-significant-digit, locale-independent numbers.
void export_csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows, std::ostream& os);
void export_csv_file(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, const std::string& path);

std::string format_double(double v);

} // namespace cutfrac

#endif
