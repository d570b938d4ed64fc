#include "cutfrac/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cutfrac/errors.hpp"
#include "cutfrac/quadrature.hpp"

namespace cutfrac {

double CrackComponent::length() const {
    double len = 0.0;
    for (int s = 0; s < segment_count(); ++s) len += segment(s).length();
    return len;
}

int CrackComponent::segment_at(Vec2 p, double tol) const {
    int best = -1;
    double best_d = tol;
    for (int s = 0; s < segment_count(); ++s) {
        const Segment sg = segment(s);
        const double d = distance_point_segment(p, sg.a, sg.b);
        if (d <= best_d) {
            best_d = d;
            best = s;
        }
    }
    if (best < 0) throw GeometryError("point (" + std::to_string(p.x) + "," +
                                      std::to_string(p.y) + ") not on crack polyline");
    return best;
}

int FracturedDomain::component_count(int dim) const {
    switch (dim) {
    case 0:
        return static_cast<int>(points.size());
    case 1:
        return static_cast<int>(cracks.size());
    case 2:
        return static_cast<int>(bulks.size());
    default:
        return 0;
    }
}

std::vector<ComponentId> FracturedDomain::all_components() const {
    std::vector<ComponentId> out;
    for (int d = 0; d <= 2; ++d)
        for (int i = 0; i < component_count(d); ++i) out.push_back({d, i});
    return out;
}

int FracturedDomain::crack_side_bulk(int crack, Side side) const {
    const CrackComponent& c = cracks[crack];
    return side == Side::left ? c.left_bulk : c.right_bulk;
}

Vec2 FracturedDomain::crack_side_normal_seg(int crack, int seg, Side side) const {
    const Vec2 t = cracks[crack].tangent(seg);
    // The left bulk lies on the +90 deg side; its exterior normal points across
    // the crack toward the right side, and vice versa.
    return side == Side::left ? Vec2{t.y, -t.x} : Vec2{-t.y, t.x};
}

Vec2 FracturedDomain::crack_side_normal(int crack, Side side, Vec2 p) const {
    if (crack_side_bulk(crack, side) < 0)
        throw AdjacencyError("crack '" + cracks[crack].name + "' has no bulk neighbor on " +
                             (side == Side::left ? std::string("left") : std::string("right")) +
                             " side");
    const int seg = cracks[crack].segment_at(p, eps_geom());
    return crack_side_normal_seg(crack, seg, side);
}

double FracturedDomain::side_flux(int crack, int seg, Side side, Vec2 p) const {
    const int b = crack_side_bulk(crack, side);
    if (b < 0) return 0.0;
    return dot(crack_side_normal_seg(crack, seg, side), bulks[b].beta.value(p));
}

double FracturedDomain::div_beta(ComponentId comp, Vec2 p) const {
    switch (comp.dim) {
    case 2:
        return bulks[comp.index].beta.divergence(p);
    case 1: {
        const CrackComponent& c = cracks[comp.index];
        const int seg = c.segment_at(p, eps_geom());
        double s = c.div_beta_tangential(seg, p);
        s -= side_flux(comp.index, seg, Side::left, p);
        s -= side_flux(comp.index, seg, Side::right, p);
        return s;
    }
    case 0: {
        double s = 0.0;
        for (const IncidentCrack& ic : points[comp.index].cracks)
            s -= cracks[ic.crack].end_flux(ic.end);
        return s;
    }
    default:
        throw ParamError("div_beta: invalid dimension");
    }
}

double FracturedDomain::gamma(ComponentId comp, Vec2 p) const {
    return alpha_at(comp, p) + div_beta(comp, p);
}

double FracturedDomain::alpha_at(ComponentId comp, Vec2 p) const {
    switch (comp.dim) {
    case 2:
        return bulks[comp.index].alpha.value(p);
    case 1:
        return cracks[comp.index].alpha.value(p);
    default:
        return points[comp.index].alpha;
    }
}

double FracturedDomain::f_at(ComponentId comp, Vec2 p) const {
    switch (comp.dim) {
    case 2:
        return bulks[comp.index].f.value(p);
    case 1:
        return cracks[comp.index].f.value(p);
    default:
        return points[comp.index].f;
    }
}

bool FracturedDomain::on_outer_boundary(Vec2 p, double tol) const {
    return std::abs(p.x - box_lo.x) <= tol || std::abs(p.x - box_hi.x) <= tol ||
           std::abs(p.y - box_lo.y) <= tol || std::abs(p.y - box_hi.y) <= tol;
}

void FracturedDomain::validate() const {
    const double eps = eps_geom();
    for (std::size_t bi = 0; bi < bulks.size(); ++bi) {
        const BulkComponent& b = bulks[bi];
        if (b.polygon.size() < 3)
            throw GeometryError("bulk '" + b.name + "': polygon needs >= 3 vertices");
        if (polygon_area(b.polygon) <= 0.0)
            throw GeometryError("bulk '" + b.name + "': polygon must be positively oriented");
        if (b.edges.size() != b.polygon.size())
            throw GeometryError("bulk '" + b.name + "': one tag per polygon edge required");
        for (const Vec2& v : b.polygon)
            if (v.x < box_lo.x - eps || v.x > box_hi.x + eps || v.y < box_lo.y - eps ||
                v.y > box_hi.y + eps)
                throw GeometryError("bulk '" + b.name + "': vertex outside bounding box");
        for (std::size_t e = 0; e < b.edges.size(); ++e) {
            const Vec2 pa = b.polygon[e];
            const Vec2 pb = b.polygon[(e + 1) % b.polygon.size()];
            if (b.edges[e].outer) {
                if (!on_outer_boundary(pa, eps) || !on_outer_boundary(pb, eps))
                    throw GeometryError("bulk '" + b.name + "': edge " + std::to_string(e) +
                                        " tagged outer but not on the bounding box");
                continue;
            }
            const int ci = b.edges[e].crack;
            if (ci < 0 || ci >= static_cast<int>(cracks.size()))
                throw AdjacencyError("bulk '" + b.name + "': edge references unknown crack");
            const CrackComponent& c = cracks[ci];
            bool matched = false;
            for (int s = 0; s < c.segment_count() && !matched; ++s) {
                const Segment sg = c.segment(s);
                matched = (dist(sg.a, pa) <= eps && dist(sg.b, pb) <= eps) ||
                          (dist(sg.a, pb) <= eps && dist(sg.b, pa) <= eps);
            }
            if (!matched)
                throw GeometryError("bulk '" + b.name + "': edge " + std::to_string(e) +
                                    " does not coincide with any segment of crack '" +
                                    c.name + "'");
            if (c.left_bulk != static_cast<int>(bi) && c.right_bulk != static_cast<int>(bi))
                throw AdjacencyError("bulk '" + b.name + "' touches crack '" + c.name +
                                     "' but the crack does not list it as a neighbor");
        }
    }
    for (const CrackComponent& c : cracks) {
        if (c.polyline.size() < 2)
            throw GeometryError("crack '" + c.name + "': polyline needs >= 2 vertices");
        for (int s = 0; s < c.segment_count(); ++s)
            if (c.segment(s).length() <= eps)
                throw GeometryError("crack '" + c.name + "': degenerate segment");
        for (int side = 0; side < 2; ++side) {
            const int b = side == 0 ? c.left_bulk : c.right_bulk;
            if (b >= static_cast<int>(bulks.size()))
                throw AdjacencyError("crack '" + c.name + "': bulk index out of range");
            if (b < 0) {
                // A missing neighbor is legal only when the crack lies on the box edge.
                for (const Vec2& v : c.polyline)
                    if (!on_outer_boundary(v, eps))
                        throw AdjacencyError("crack '" + c.name +
                                             "': missing neighbor away from the boundary");
            }
        }
        for (int which = 0; which < 2; ++which) {
            const CrackEnd& end = which == 0 ? c.start : c.end;
            const Vec2 x = c.endpoint(which);
            if (end.outer) {
                if (!on_outer_boundary(x, eps))
                    throw GeometryError("crack '" + c.name +
                                        "': endpoint tagged outer lies inside the domain");
            } else {
                if (end.point < 0 || end.point >= static_cast<int>(points.size()))
                    throw AdjacencyError("crack '" + c.name + "': unknown endpoint component");
                if (dist(points[end.point].x, x) > eps)
                    throw GeometryError("crack '" + c.name +
                                        "': endpoint does not coincide with point '" +
                                        points[end.point].name + "'");
            }
        }
    }
    for (const PointComponent& p : points) {
        if (p.cracks.size() < 2)
            throw AdjacencyError("point '" + p.name +
                                 "': a bifurcation needs at least 2 incident cracks");
        for (const IncidentCrack& ic : p.cracks) {
            if (ic.crack < 0 || ic.crack >= static_cast<int>(cracks.size()))
                throw AdjacencyError("point '" + p.name + "': unknown incident crack");
            if (dist(cracks[ic.crack].endpoint(ic.end), p.x) > eps)
                throw GeometryError("point '" + p.name + "': incident crack endpoint apart");
        }
    }
}

AnalyticField AnalyticField::zero() {
    return global([](Vec2) { return 0.0; }, [](Vec2) { return Vec2{0, 0}; });
}

AnalyticField AnalyticField::global(std::function<double(Vec2)> v,
                                    std::function<Vec2(Vec2)> g) {
    AnalyticField f;
    f.value = [v = std::move(v)](ComponentId, Vec2 p) { return v(p); };
    f.grad = [g = std::move(g)](ComponentId, Vec2 p) { return g(p); };
    return f;
}

double codim_jump(const std::vector<TraceSample>& traces) {
    double s = 0.0;
    for (const TraceSample& t : traces) s += t.value;
    return s;
}

double codim_flux_jump(const std::vector<TraceSample>& traces) {
    double s = 0.0;
    for (const TraceSample& t : traces) s += t.nu_beta * t.value;
    return s;
}

double interface_jump(int dim, double trace_value, double lower_value) {
    if (dim == 0) return 0.0;
    return trace_value - lower_value;
}

double d_beta_analytic(const FracturedDomain& dom, const AnalyticField& v, ComponentId comp,
                       Vec2 p) {
    if (!v.value) throw FieldError("analytic field has no value callback");
    switch (comp.dim) {
    case 2: {
        const BulkComponent& b = dom.bulks[comp.index];
        return dot(b.beta.value(p), v.grad(comp, p));
    }
    case 1: {
        const CrackComponent& c = dom.cracks[comp.index];
        const int seg = c.segment_at(p, dom.eps_geom());
        const Vec2 t = c.tangent(seg);
        // Tangential gradient term plus coupling to both bulk neighbors.
        double s = c.speed.value(p) * dot(t, v.grad(comp, p));
        const double v1 = v.value(comp, p);
        for (Side side : {Side::left, Side::right}) {
            const int bi = dom.crack_side_bulk(comp.index, side);
            if (bi < 0) continue;
            const double nb = dom.side_flux(comp.index, seg, side, p);
            s += nb * (v1 - v.value({2, bi}, p));
        }
        return s;
    }
    case 0: {
        const PointComponent& pt = dom.points[comp.index];
        const double v0 = v.value(comp, pt.x);
        double s = 0.0;
        for (const IncidentCrack& ic : pt.cracks) {
            const double nb = dom.cracks[ic.crack].end_flux(ic.end);
            s += nb * (v0 - v.value({1, ic.crack}, pt.x));
        }
        return s;
    }
    default:
        throw ParamError("d_beta_analytic: invalid dimension");
    }
}

double div_beta_v_analytic(const FracturedDomain& dom, const AnalyticField& v,
                           ComponentId comp, Vec2 p) {
    switch (comp.dim) {
    case 2: {
        const BulkComponent& b = dom.bulks[comp.index];
        return dot(b.beta.value(p), v.grad(comp, p)) +
               b.beta.divergence(p) * v.value(comp, p);
    }
    case 1: {
        const CrackComponent& c = dom.cracks[comp.index];
        const int seg = c.segment_at(p, dom.eps_geom());
        const Vec2 t = c.tangent(seg);
        double s = c.speed.value(p) * dot(t, v.grad(comp, p)) +
                   c.div_beta_tangential(seg, p) * v.value(comp, p);
        for (Side side : {Side::left, Side::right}) {
            const int bi = dom.crack_side_bulk(comp.index, side);
            if (bi < 0) continue;
            s -= dom.side_flux(comp.index, seg, side, p) * v.value({2, bi}, p);
        }
        return s;
    }
    case 0: {
        const PointComponent& pt = dom.points[comp.index];
        double s = 0.0;
        for (const IncidentCrack& ic : pt.cracks)
            s -= dom.cracks[ic.crack].end_flux(ic.end) * v.value({1, ic.crack}, pt.x);
        return s;
    }
    default:
        throw ParamError("div_beta_v_analytic: invalid dimension");
    }
}

double verify_partial_integration(const FracturedDomain& dom, const AnalyticField& v,
                                  const AnalyticField& w, int quad_order) {
    // Residual of
    //   (D_b v, w) + (v, D_b w) + ((Div b) v, w)
    //     - (nu.b [v], [w])_interior - (nu.b v, w)_boundary
    // over exact geometry. Composite Gauss of the requested order.
    const int seg_pts = std::clamp(quad_order, 1, 5);
    const int tri_deg = quad_order >= 3 ? 5 : 2;
    double acc = 0.0;

    // Volume terms, all components.
    for (int d = 0; d <= 2; ++d) {
        for (int i = 0; i < dom.component_count(d); ++i) {
            const ComponentId comp{d, i};
            QuadRule q;
            if (d == 2)
                q = simple_polygon_rule(dom.bulks[i].polygon, tri_deg);
            else if (d == 1) {
                for (int s = 0; s < dom.cracks[i].segment_count(); ++s) {
                    const QuadRule qs = segment_rule(dom.cracks[i].segment(s), seg_pts);
                    q.points.insert(q.points.end(), qs.points.begin(), qs.points.end());
                    q.weights.insert(q.weights.end(), qs.weights.begin(), qs.weights.end());
                }
            } else {
                q.points.push_back(dom.points[i].x);
                q.weights.push_back(1.0);
            }
            for (std::size_t k = 0; k < q.size(); ++k) {
                const Vec2 p = q.points[k];
                const double vv = v.value(comp, p), ww = w.value(comp, p);
                acc += q.weights[k] * (d_beta_analytic(dom, v, comp, p) * ww +
                                       vv * d_beta_analytic(dom, w, comp, p) +
                                       dom.div_beta(comp, p) * vv * ww);
            }
        }
    }

    // Interior interface terms: bulk boundaries along cracks, with [v] = trace - crack value.
    for (int ci = 0; ci < static_cast<int>(dom.cracks.size()); ++ci) {
        const CrackComponent& c = dom.cracks[ci];
        const ComponentId crack_id{1, ci};
        for (int s = 0; s < c.segment_count(); ++s) {
            const QuadRule q = segment_rule(c.segment(s), seg_pts);
            for (Side side : {Side::left, Side::right}) {
                const int bi = dom.crack_side_bulk(ci, side);
                if (bi < 0) continue;
                const ComponentId bulk_id{2, bi};
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const Vec2 p = q.points[k];
                    const double nb = dom.side_flux(ci, s, side, p);
                    const double jv = v.value(bulk_id, p) - v.value(crack_id, p);
                    const double jw = w.value(bulk_id, p) - w.value(crack_id, p);
                    acc -= q.weights[k] * nb * jv * jw;
                }
            }
        }
        // Crack endpoints: interior ones jump against the point component,
        // outer ones carry the boundary term.
        for (int which = 0; which < 2; ++which) {
            const CrackEnd& end = which == 0 ? c.start : c.end;
            const Vec2 x = c.endpoint(which);
            const double nb = c.end_flux(which);
            if (end.outer) {
                acc -= nb * v.value(crack_id, x) * w.value(crack_id, x);
            } else {
                const ComponentId pid{0, end.point};
                const double jv = v.value(crack_id, x) - v.value(pid, x);
                const double jw = w.value(crack_id, x) - w.value(pid, x);
                acc -= nb * jv * jw;
            }
        }
    }

    // Outer boundary terms of the bulks.
    for (int bi = 0; bi < static_cast<int>(dom.bulks.size()); ++bi) {
        const BulkComponent& b = dom.bulks[bi];
        const ComponentId bulk_id{2, bi};
        for (std::size_t e = 0; e < b.edges.size(); ++e) {
            if (!b.edges[e].outer) continue;
            const Vec2 pa = b.polygon[e];
            const Vec2 pb = b.polygon[(e + 1) % b.polygon.size()];
            const Vec2 nu = normalized(Vec2{(pb - pa).y, -(pb - pa).x}); // outward for CCW
            const QuadRule q = segment_rule({pa, pb}, seg_pts);
            for (std::size_t k = 0; k < q.size(); ++k) {
                const Vec2 p = q.points[k];
                acc -= q.weights[k] * dot(nu, b.beta.value(p)) * v.value(bulk_id, p) *
                       w.value(bulk_id, p);
            }
        }
    }

    return std::abs(acc);
}

double coercivity_indicator(const FracturedDomain& dom, int sample_density) {
    const int n = std::max(2, sample_density);
    double m = std::numeric_limits<double>::infinity();
    for (int bi = 0; bi < static_cast<int>(dom.bulks.size()); ++bi) {
        const BulkComponent& b = dom.bulks[bi];
        Vec2 lo = b.polygon[0], hi = b.polygon[0];
        for (const Vec2& v : b.polygon) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
        }
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                const Vec2 p{lo.x + (hi.x - lo.x) * i / n, lo.y + (hi.y - lo.y) * j / n};
                if (!point_in_polygon(b.polygon, p, dom.eps_geom())) continue;
                m = std::min(m, 2.0 * b.alpha.value(p) + dom.div_beta({2, bi}, p));
            }
        }
    }
    for (int ci = 0; ci < static_cast<int>(dom.cracks.size()); ++ci) {
        const CrackComponent& c = dom.cracks[ci];
        for (int s = 0; s < c.segment_count(); ++s) {
            for (int k = 0; k <= n; ++k) {
                // Stay off the endpoints, where the segment lookup may be ambiguous.
                const double t = (k + 0.5) / (n + 1.0);
                const Vec2 p = c.segment(s).at(t);
                m = std::min(m, 2.0 * c.alpha.value(p) + dom.div_beta({1, ci}, p));
            }
        }
    }
    for (int pi = 0; pi < static_cast<int>(dom.points.size()); ++pi) {
        const PointComponent& p = dom.points[pi];
        m = std::min(m, 2.0 * p.alpha + dom.div_beta({0, pi}, p.x));
    }
    return std::isfinite(m) ? m : 0.0;
}

} // namespace cutfrac
