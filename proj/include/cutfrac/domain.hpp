#ifndef CUTFRAC_DOMAIN_HPP
#define CUTFRAC_DOMAIN_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cutfrac/fields.hpp"
#include "cutfrac/geometry.hpp"

namespace cutfrac {

/// (dimension, index) pair identifying one component of the fractured domain.
struct ComponentId {
    int dim = 2;
    int index = 0;
    friend bool operator==(ComponentId a, ComponentId b) {
        return a.dim == b.dim && a.index == b.index;
    }
};

enum class Side { left, right };

/// Tag for one edge of a bulk polygon: either on the outer boundary or coinciding
/// with a crack component.
struct EdgeTag {
    bool outer = true;
    int crack = -1;
};

struct BulkComponent {
    std::string name;
    Polygon polygon;            // CCW vertex loop
    std::vector<EdgeTag> edges; // edges[k]: polygon[k] -> polygon[k+1]
    VectorField beta;
    ScalarField alpha, f, g;
    std::optional<ScalarField> exact;

    std::vector<Polygon> convex_pieces; // filled at load time (triangulation)
    double area() const { return polygon_area(polygon); }
};

struct CrackEnd {
    bool outer = true;
    int point = -1; // index of the d=0 component when not on the outer boundary
};

struct CrackComponent {
    std::string name;
    std::vector<Vec2> polyline; // straight segments, orientation defines the tangent
    ScalarField speed;          // beta_1 = speed * t
    ScalarField alpha, f, g;
    std::optional<ScalarField> exact;
    int left_bulk = -1;  // side of +90 deg rotation of the tangent; -1 only on the boundary
    int right_bulk = -1;
    CrackEnd start, end;

    int segment_count() const { return static_cast<int>(polyline.size()) - 1; }
    Segment segment(int s) const { return {polyline[s], polyline[s + 1]}; }
    Vec2 tangent(int s) const { return segment(s).tangent(); }
    double length() const;
    /// Closest segment to a point on the polyline.
    int segment_at(Vec2 p, double tol) const;
    Vec2 beta(int seg, Vec2 p) const { return speed.value(p) * tangent(seg); }
    /// Tangential divergence of beta_1 = t . grad(speed) on straight segments.
    double div_beta_tangential(int seg, Vec2 p) const {
        return dot(tangent(seg), speed.gradient(p));
    }
    Vec2 endpoint(int which) const {
        return which == 0 ? polyline.front() : polyline.back();
    }
    /// Exterior normal of the crack at an endpoint: the unit tangent pointing out.
    Vec2 end_normal(int which) const {
        return which == 0 ? -tangent(0) : tangent(segment_count() - 1);
    }
    /// nu . beta_1 at an endpoint: -speed at the start, +speed at the end.
    double end_flux(int which) const {
        const double s = speed.value(endpoint(which));
        return which == 0 ? -s : s;
    }
};

struct IncidentCrack {
    int crack;
    int end; // 0 = polyline start, 1 = polyline end
};

struct PointComponent {
    std::string name;
    Vec2 x;
    double alpha = 0.0, f = 0.0;
    std::optional<double> exact;
    std::vector<IncidentCrack> cracks;
};

/// Fractured domain: bulk regions (d=2), cracks (d=1) and bifurcation points (d=0)
/// inside the bounding box, with explicit adjacency. Immutable after construction.
class FracturedDomain {
public:
    Vec2 box_lo{0, 0}, box_hi{1, 1};
    std::vector<BulkComponent> bulks;
    std::vector<CrackComponent> cracks;
    std::vector<PointComponent> points;

    double diameter() const { return dist(box_lo, box_hi); }
    /// Coincidence tolerance: 1e-10 * diameter of the bounding box.
    double eps_geom() const { return 1e-10 * diameter(); }

    /// Checks all structural invariants; throws on violation.
    void validate() const;

    int component_count(int dim) const;
    std::vector<ComponentId> all_components() const;

    /// Exterior normal of the bulk on the given side of a crack, at a point on it.
    Vec2 crack_side_normal(int crack, Side side, Vec2 p) const;
    /// Same, pre-resolved per segment (no point lookup).
    Vec2 crack_side_normal_seg(int crack, int seg, Side side) const;
    int crack_side_bulk(int crack, Side side) const;

    /// nu . beta of the bulk on one side of a crack at a point (0 if no neighbor).
    double side_flux(int crack, int seg, Side side, Vec2 p) const;

    /// (Div beta)_d at a point of a component, Eq. coupling adjacent dimensions.
    double div_beta(ComponentId comp, Vec2 p) const;

    /// gamma = alpha + Div beta.
    double gamma(ComponentId comp, Vec2 p) const;

    double alpha_at(ComponentId comp, Vec2 p) const;
    double f_at(ComponentId comp, Vec2 p) const;

    bool on_outer_boundary(Vec2 p, double tol) const;
};

/// Per-component analytic function with an R^2-gradient of its smooth extension.
struct AnalyticField {
    std::function<double(ComponentId, Vec2)> value;
    std::function<Vec2(ComponentId, Vec2)> grad;

    static AnalyticField zero();
    static AnalyticField global(std::function<double(Vec2)> v, std::function<Vec2(Vec2)> g);
};

/// Sum of one-sided traces from incident (d+1)-components.
struct TraceSample {
    double nu_beta;
    double value;
};
double codim_jump(const std::vector<TraceSample>& traces);
double codim_flux_jump(const std::vector<TraceSample>& traces); // sum nu_beta * value

/// Trace-minus-lower-value jump; zero for d=0 by definition.
double interface_jump(int dim, double trace_value, double lower_value);

/// (D_beta v)_d at a point of a component, evaluated from analytic data.
double d_beta_analytic(const FracturedDomain& dom, const AnalyticField& v, ComponentId comp,
                       Vec2 p);

/// Div(beta v) at a point, following the componentwise divergence definition.
double div_beta_v_analytic(const FracturedDomain& dom, const AnalyticField& v,
                           ComponentId comp, Vec2 p);

/// Numerically evaluates both sides of the partial-integration identity for D_beta
/// over the exact component geometry (no mesh) and returns the absolute residual.
double verify_partial_integration(const FracturedDomain& dom, const AnalyticField& v,
                                  const AnalyticField& w, int quad_order);

/// min over sampled points of all components of (2 alpha + Div beta).
/// Diagnostic only; the solver never gates on its sign.
double coercivity_indicator(const FracturedDomain& dom, int sample_density);

} // namespace cutfrac

#endif
