#ifndef CUTFRAC_SOLUTION_HPP
#define CUTFRAC_SOLUTION_HPP

#include <span>
#include <vector>

#include "cutfrac/fem.hpp"

namespace cutfrac {

/// Coefficient vector over the direct-sum space with per-component evaluation.
/// Evaluation on component (d, i) uses only that component's dofs; one-sided
/// traces resolve hosts through the active-mesh side offset.
class SolutionField {
public:
    SolutionField(const Discretization& disc, std::vector<double> coeffs);

    const std::vector<double>& coeffs() const { return u_; }
    const Discretization& disc() const { return *disc_; }

    /// General evaluation; locates the host triangle (optionally offset by the hint).
    double eval(ComponentId comp, Vec2 p, std::optional<SideHint> hint = std::nullopt) const;

    /// Fast path when the host triangle is known.
    double eval_on_tri(ComponentId comp, int tri, Vec2 p) const;
    Vec2 grad_on_tri(ComponentId comp, int tri) const;

    double point_value(int point_index) const;

private:
    const Discretization* disc_;
    std::vector<double> u_;
};

/// Interpolates per-component analytic data onto the discrete space (nodal values
/// at active vertices, exact value at point components).
SolutionField interpolate(const Discretization& disc, const AnalyticField& f);

/// Strong residual operator L_d v = D_beta v + gamma v at a point of a component,
/// for discrete fields. Traces of neighbor components resolve one-sidedly.
double residual_L(const SolutionField& u, ComponentId comp, Vec2 p);

/// Same, evaluated from analytic data.
double residual_L(const FracturedDomain& dom, const AnalyticField& v, ComponentId comp,
                  Vec2 p);

/// Discrete L at a prepared crack quadrature point (host triangles known).
double residual_L_at(const SolutionField& u, const InterfacePoint& ip);

/// Discrete L of a point component (uses the resolved endpoint hosts).
double residual_L_point(const SolutionField& u, int point_index);

} // namespace cutfrac

#endif
