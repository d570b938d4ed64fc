#include "cutfrac/post.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "cutfrac/errors.hpp"
#include "cutfrac/quadrature.hpp"

namespace cutfrac {

std::optional<AnalyticField> exact_solution(const FracturedDomain& dom) {
    for (const BulkComponent& b : dom.bulks)
        if (!b.exact) return std::nullopt;
    for (const CrackComponent& c : dom.cracks)
        if (!c.exact) return std::nullopt;
    for (const PointComponent& p : dom.points)
        if (!p.exact) return std::nullopt;
    AnalyticField f;
    const FracturedDomain* d = &dom;
    f.value = [d](ComponentId c, Vec2 p) {
        switch (c.dim) {
        case 2:
            return d->bulks[static_cast<std::size_t>(c.index)].exact->value(p);
        case 1:
            return d->cracks[static_cast<std::size_t>(c.index)].exact->value(p);
        default:
            return *d->points[static_cast<std::size_t>(c.index)].exact;
        }
    };
    f.grad = [d](ComponentId c, Vec2 p) {
        switch (c.dim) {
        case 2:
            return d->bulks[static_cast<std::size_t>(c.index)].exact->gradient(p);
        case 1:
            return d->cracks[static_cast<std::size_t>(c.index)].exact->gradient(p);
        default:
            return Vec2{0, 0};
        }
    };
    return f;
}

namespace {

int segment_points_for(int degree) { return std::clamp((degree + 2) / 2, 1, 5); }

} // namespace

double l2_error(const SolutionField& u_h, const AnalyticField& u, ComponentId comp,
                int degree) {
    const Discretization& d = u_h.disc();
    double acc = 0.0;
    if (comp.dim == 2) {
        for (const CutCell& cell : d.active(comp).cells) {
            for (const Polygon& piece : cell.pieces) {
                const QuadRule q = polygon_rule(piece, degree);
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const double e =
                        u_h.eval_on_tri(comp, cell.tri, q.points[k]) - u.value(comp, q.points[k]);
                    acc += q.weights[k] * e * e;
                }
            }
        }
    } else if (comp.dim == 1) {
        for (const CutSeg& cs : d.active(comp).segs) {
            const QuadRule q = segment_rule(cs.seg, segment_points_for(degree));
            for (std::size_t k = 0; k < q.size(); ++k) {
                const double e =
                    u_h.eval_on_tri(comp, cs.tri, q.points[k]) - u.value(comp, q.points[k]);
                acc += q.weights[k] * e * e;
            }
        }
    } else {
        const Vec2 x = d.domain().points[static_cast<std::size_t>(comp.index)].x;
        return std::abs(u_h.point_value(comp.index) - u.value(comp, x));
    }
    return std::sqrt(acc);
}

double linf_error(const SolutionField& u_h, const AnalyticField& u, ComponentId comp) {
    const Discretization& d = u_h.disc();
    double m = 0.0;
    auto probe = [&](int tri, Vec2 p) {
        m = std::max(m, std::abs(u_h.eval_on_tri(comp, tri, p) - u.value(comp, p)));
    };
    if (comp.dim == 2) {
        for (const CutCell& cell : d.active(comp).cells) {
            for (const Polygon& piece : cell.pieces) {
                for (const Vec2& v : piece) probe(cell.tri, v);
                const QuadRule q = polygon_rule(piece, 2);
                for (const Vec2& p : q.points) probe(cell.tri, p);
            }
        }
    } else if (comp.dim == 1) {
        for (const CutSeg& cs : d.active(comp).segs) {
            probe(cs.tri, cs.seg.a);
            probe(cs.tri, cs.seg.b);
            const QuadRule q = segment_rule(cs.seg, 3);
            for (const Vec2& p : q.points) probe(cs.tri, p);
        }
    } else {
        const Vec2 x = d.domain().points[static_cast<std::size_t>(comp.index)].x;
        m = std::abs(u_h.point_value(comp.index) - u.value(comp, x));
    }
    return m;
}

double ErrorReport::l2_total_sq() const {
    double s = 0.0;
    for (const Row& r : rows) s += r.l2_sq;
    return s;
}

double ErrorReport::energy_total_sq() const {
    double s = 0.0;
    for (const Row& r : rows)
        s += r.l2_sq + r.residual_sq + r.stab_sq + r.jump_interface_sq + r.jump_boundary_sq;
    return s;
}

double ErrorReport::l2() const { return std::sqrt(l2_total_sq()); }
double ErrorReport::energy() const { return std::sqrt(energy_total_sq()); }

ErrorReport energy_error(const SolutionField& u_h, const AnalyticField& u,
                         const AssemblyParams& params) {
    const Discretization& d = u_h.disc();
    const FracturedDomain& dom = d.domain();
    const double h = d.h();
    ErrorReport rep;
    rep.h = h;
    rep.dof_count = d.dofs.total();
    for (const ComponentId c : dom.all_components()) rep.rows.push_back({c});
    auto row = [&](ComponentId c) -> ErrorReport::Row& {
        for (ErrorReport::Row& r : rep.rows)
            if (r.comp == c) return r;
        throw ParamError("energy_error: unknown component");
    };

    // Volume terms: ||e||^2 and h ||L e||^2.
    for (int bi = 0; bi < dom.component_count(2); ++bi) {
        const ComponentId cid{2, bi};
        ErrorReport::Row& r = row(cid);
        const BulkComponent& bulk = dom.bulks[static_cast<std::size_t>(bi)];
        for (const CutCell& cell : d.active(cid).cells) {
            for (const Polygon& piece : cell.pieces) {
                const QuadRule q = polygon_rule(piece, 5);
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const Vec2 x = q.points[k];
                    const double w = q.weights[k];
                    const double e = u_h.eval_on_tri(cid, cell.tri, x) - u.value(cid, x);
                    const double gam = bulk.beta.divergence(x) + bulk.alpha.value(x);
                    const double Lh = dot(bulk.beta.value(x), u_h.grad_on_tri(cid, cell.tri)) +
                                      gam * u_h.eval_on_tri(cid, cell.tri, x);
                    const double Lu = dot(bulk.beta.value(x), u.grad(cid, x)) +
                                      gam * u.value(cid, x);
                    r.l2_sq += w * e * e;
                    r.residual_sq += h * w * (Lh - Lu) * (Lh - Lu);
                }
            }
        }
    }
    for (const InterfacePoint& ip : d.iq.crack_points) {
        const ComponentId cid{1, ip.crack};
        ErrorReport::Row& r = row(cid);
        const double e = u_h.eval_on_tri(cid, ip.tri_crack, ip.x) - u.value(cid, ip.x);
        const double Lh = residual_L_at(u_h, ip);
        const double Lu = residual_L(dom, u, cid, ip.x);
        r.l2_sq += ip.w * e * e;
        r.residual_sq += h * ip.w * (Lh - Lu) * (Lh - Lu);
    }
    for (int pi = 0; pi < dom.component_count(0); ++pi) {
        const ComponentId cid{0, pi};
        ErrorReport::Row& r = row(cid);
        const Vec2 x = dom.points[static_cast<std::size_t>(pi)].x;
        const double e = u_h.point_value(pi) - u.value(cid, x);
        const double Lh = residual_L_point(u_h, pi);
        const double Lu = residual_L(dom, u, cid, x);
        r.l2_sq += e * e;
        r.residual_sq += h * (Lh - Lu) * (Lh - Lu);
    }

    // Full-gradient stabilization over whole active triangles; the exact
    // solution enters through its closed-form extension.
    for (const ComponentId cid : dom.all_components()) {
        if (cid.dim == 0 || params.tau2 <= 0.0) continue;
        const double s2 = params.tau2 * (cid.dim == 2 ? h * h * h : h * h);
        ErrorReport::Row& r = row(cid);
        for (int tri : d.active(cid).tris) {
            const QuadRule q = triangle_rule(d.bg.triangle(tri), 5);
            const Vec2 gh = u_h.grad_on_tri(cid, tri);
            for (std::size_t k = 0; k < q.size(); ++k) {
                const Vec2 ge = gh - u.grad(cid, q.points[k]);
                r.stab_sq += s2 * q.weights[k] * dot(ge, ge);
            }
        }
    }

    // Inflow-weighted jump terms on interior interfaces and the outer boundary.
    for (const InterfacePoint& ip : d.iq.crack_points) {
        const CrackComponent& c = dom.cracks[static_cast<std::size_t>(ip.crack)];
        const ComponentId cid{1, ip.crack};
        const double ec = u_h.eval_on_tri(cid, ip.tri_crack, ip.x) - u.value(cid, ip.x);
        const int sides[2] = {c.left_bulk, c.right_bulk};
        const int tris[2] = {ip.tri_left, ip.tri_right};
        for (int s = 0; s < 2; ++s) {
            if (sides[s] < 0) continue;
            const ComponentId bid{2, sides[s]};
            const Vec2 nu = s == 0 ? ip.nu_left : -ip.nu_left;
            const double flux =
                dot(nu, dom.bulks[static_cast<std::size_t>(sides[s])].beta.value(ip.x));
            if (flux >= 0.0) continue;
            const double eb = u_h.eval_on_tri(bid, tris[s], ip.x) - u.value(bid, ip.x);
            row(bid).jump_interface_sq += ip.w * std::abs(flux) * (eb - ec) * (eb - ec);
        }
    }
    for (const CrackEndPoint& ep : d.iq.crack_ends) {
        if (ep.nu_beta >= 0.0) continue;
        const ComponentId cid{1, ep.crack};
        const double ec = u_h.eval_on_tri(cid, ep.tri_crack, ep.x) - u.value(cid, ep.x);
        if (ep.outer) {
            row(cid).jump_boundary_sq += std::abs(ep.nu_beta) * ec * ec;
        } else {
            const double e0 =
                u_h.point_value(ep.point) - u.value({0, ep.point}, ep.x);
            row(cid).jump_interface_sq += std::abs(ep.nu_beta) * (ec - e0) * (ec - e0);
        }
    }
    for (const BulkBoundaryPoint& bp : d.iq.boundary_points) {
        const BulkComponent& bulk = dom.bulks[static_cast<std::size_t>(bp.bulk)];
        const double flux = dot(bp.nu, bulk.beta.value(bp.x));
        if (flux >= 0.0) continue;
        const ComponentId bid{2, bp.bulk};
        const double e = u_h.eval_on_tri(bid, bp.tri, bp.x) - u.value(bid, bp.x);
        row(bid).jump_boundary_sq += bp.w * std::abs(flux) * e * e;
    }
    return rep;
}

ConvergenceRates convergence_rates(const std::vector<std::pair<double, double>>& h_err) {
    if (h_err.size() < 3)
        throw ParamError("convergence_rates: at least 3 levels required");
    for (std::size_t i = 1; i < h_err.size(); ++i)
        if (!(h_err[i].first < h_err[i - 1].first))
            throw ParamError("convergence_rates: h must be strictly decreasing");
    ConvergenceRates out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 1; i < h_err.size(); ++i) {
        if (h_err[i - 1].second > 0.0 && h_err[i].second > 0.0)
            out.pairwise.push_back(std::log(h_err[i - 1].second / h_err[i].second) /
                                   std::log(h_err[i - 1].first / h_err[i].first));
        else
            out.pairwise.push_back(nan);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& [h, e] : h_err) {
        if (!(e > 0.0)) continue;
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    out.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : nan;
    return out;
}

PointBalance point_balance(const SolutionField& u_h, int point_index) {
    const Discretization& d = u_h.disc();
    const PointComponent& p = d.domain().points[static_cast<std::size_t>(point_index)];
    const double u0 = u_h.point_value(point_index);
    PointBalance out;
    out.scale = std::abs(u0);
    double strong = -p.alpha * u0 + p.f;
    double discrete = strong;
    for (const CrackEndPoint& ep : d.iq.crack_ends) {
        if (ep.outer || ep.point != point_index) continue;
        const double trace = u_h.eval_on_tri({1, ep.crack}, ep.tri_crack, ep.x);
        out.scale = std::max(out.scale, std::abs(trace));
        strong += ep.nu_beta * trace;
        discrete += ep.nu_beta * trace;
        if (ep.nu_beta < 0.0) discrete += std::abs(ep.nu_beta) * (trace - u0);
    }
    out.strong = std::abs(strong);
    out.discrete = std::abs(discrete);
    return out;
}

double CoercivityIdentity::residual() const { return std::abs(lhs - rhs); }

CoercivityIdentity coercivity_identity(const AssembledSystem& sys, const SolutionField& v,
                                       const AssemblyParams& params) {
    const Discretization& d = v.disc();
    const FracturedDomain& dom = d.domain();
    const double h = d.h();

    CoercivityIdentity out;
    {
        const std::vector<double> Av = sys.A.matvec(v.coeffs());
        double s = 0.0;
        for (std::size_t i = 0; i < Av.size(); ++i) s += v.coeffs()[i] * Av[i];
        out.lhs = s;
    }

    double t_react = 0.0, t_jump_i = 0.0, t_jump_b = 0.0, t_gls = 0.0, t_stab = 0.0;

    for (int bi = 0; bi < dom.component_count(2); ++bi) {
        const ComponentId cid{2, bi};
        const BulkComponent& bulk = dom.bulks[static_cast<std::size_t>(bi)];
        for (const CutCell& cell : d.active(cid).cells) {
            for (const Polygon& piece : cell.pieces) {
                const QuadRule q = polygon_rule(piece, params.volume_degree);
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const Vec2 x = q.points[k];
                    const double w = q.weights[k];
                    const double vv = v.eval_on_tri(cid, cell.tri, x);
                    const double gam = bulk.beta.divergence(x) + bulk.alpha.value(x);
                    const double Lv = dot(bulk.beta.value(x), v.grad_on_tri(cid, cell.tri)) +
                                      gam * vv;
                    t_react +=
                        w * (bulk.alpha.value(x) + 0.5 * bulk.beta.divergence(x)) * vv * vv;
                    t_gls += params.tau1 * h * w * Lv * Lv;
                }
            }
        }
    }
    for (const InterfacePoint& ip : d.iq.crack_points) {
        const CrackComponent& c = dom.cracks[static_cast<std::size_t>(ip.crack)];
        const ComponentId cid{1, ip.crack};
        const double vc = v.eval_on_tri(cid, ip.tri_crack, ip.x);
        double div1 = c.div_beta_tangential(ip.crack_segment, ip.x);
        const int sides[2] = {c.left_bulk, c.right_bulk};
        const int tris[2] = {ip.tri_left, ip.tri_right};
        for (int s = 0; s < 2; ++s) {
            if (sides[s] < 0) continue;
            const Vec2 nu = s == 0 ? ip.nu_left : -ip.nu_left;
            const double flux =
                dot(nu, dom.bulks[static_cast<std::size_t>(sides[s])].beta.value(ip.x));
            div1 -= flux;
            // Interface jump with the full |nu.beta| weight (both signs).
            const double vb = v.eval_on_tri({2, sides[s]}, tris[s], ip.x);
            t_jump_i += 0.5 * ip.w * std::abs(flux) * (vb - vc) * (vb - vc);
        }
        t_react += ip.w * (c.alpha.value(ip.x) + 0.5 * div1) * vc * vc;
        const double Lv = residual_L_at(v, ip);
        t_gls += params.tau1 * h * ip.w * Lv * Lv;
    }
    for (int pi = 0; pi < dom.component_count(0); ++pi) {
        const PointComponent& p = dom.points[static_cast<std::size_t>(pi)];
        const double v0 = v.point_value(pi);
        t_react += (p.alpha + 0.5 * dom.div_beta({0, pi}, p.x)) * v0 * v0;
        const double Lv = residual_L_point(v, pi);
        t_gls += params.tau1 * h * Lv * Lv;
    }
    for (const CrackEndPoint& ep : d.iq.crack_ends) {
        const ComponentId cid{1, ep.crack};
        const double vc = v.eval_on_tri(cid, ep.tri_crack, ep.x);
        if (ep.outer) {
            t_jump_b += 0.5 * std::abs(ep.nu_beta) * vc * vc;
        } else {
            const double v0 = v.point_value(ep.point);
            t_jump_i += 0.5 * std::abs(ep.nu_beta) * (vc - v0) * (vc - v0);
        }
    }
    for (const BulkBoundaryPoint& bp : d.iq.boundary_points) {
        const BulkComponent& bulk = dom.bulks[static_cast<std::size_t>(bp.bulk)];
        const double flux = dot(bp.nu, bulk.beta.value(bp.x));
        const double vb = v.eval_on_tri({2, bp.bulk}, bp.tri, bp.x);
        t_jump_b += 0.5 * bp.w * std::abs(flux) * vb * vb;
    }
    if (params.tau2 > 0.0) {
        for (const ComponentId cid : dom.all_components()) {
            if (cid.dim == 0) continue;
            const double s2 = params.tau2 * (cid.dim == 2 ? h * h * h : h * h);
            for (int tri : d.active(cid).tris) {
                const Vec2 g = v.grad_on_tri(cid, tri);
                t_stab += s2 * d.bg.triangle(tri).area() * dot(g, g);
            }
        }
    }

    out.rhs = t_react + t_jump_i + t_jump_b + t_gls + t_stab;
    out.scale = std::abs(out.lhs) + std::abs(t_react) + t_jump_i + t_jump_b + t_gls + t_stab +
                std::numeric_limits<double>::min();
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void export_csv(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows, std::ostream& os) {
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        os << "\n";
    }
}

void export_csv_file(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ParamError("cannot write CSV file: " + path);
    export_csv(header, rows, os);
}

namespace {

void vtk_header(std::ostream& os, const std::string& title) {
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
}

} // namespace

std::vector<std::string> export_vtk(const SolutionField& u, const std::string& base_path) {
    const Discretization& d = u.disc();
    const FracturedDomain& dom = d.domain();
    std::vector<std::string> written;

    if (dom.all_components().empty()) {
        const std::string path = base_path + ".vtk";
        std::ofstream os(path);
        if (!os) throw ParamError("cannot write VTK file: " + path);
        vtk_header(os, "empty domain");
        written.push_back(path);
        return written;
    }

    for (const ComponentId cid : dom.all_components()) {
        const std::string path = base_path + "_d" + std::to_string(cid.dim) + "_" +
                                 std::to_string(cid.index) + ".vtk";
        std::ofstream os(path);
        if (!os) throw ParamError("cannot write VTK file: " + path);
        os.precision(17);
        if (cid.dim == 2) {
            const auto& cd = d.dofs.comp_dofs(cid);
            vtk_header(os, "bulk component " + std::to_string(cid.index));
            os << "POINTS " << cd.vertices.size() << " double\n";
            for (int v : cd.vertices) {
                const Vec2 p = d.bg.vertex(v);
                os << p.x << " " << p.y << " 0\n";
            }
            const auto& tris = d.active(cid).tris;
            os << "CELLS " << tris.size() << " " << 4 * tris.size() << "\n";
            for (int t : tris) {
                const auto& tv = d.bg.triangle_vertices(t);
                os << "3 " << cd.local.at(tv[0]) << " " << cd.local.at(tv[1]) << " "
                   << cd.local.at(tv[2]) << "\n";
            }
            os << "CELL_TYPES " << tris.size() << "\n";
            for (std::size_t k = 0; k < tris.size(); ++k) os << "5\n";
            os << "POINT_DATA " << cd.vertices.size() << "\nSCALARS u double 1\n"
               << "LOOKUP_TABLE default\n";
            for (std::size_t k = 0; k < cd.vertices.size(); ++k)
                os << u.coeffs()[cd.offset + k] << "\n";
        } else if (cid.dim == 1) {
            const auto& segs = d.active(cid).segs;
            vtk_header(os, "crack component " + std::to_string(cid.index));
            os << "POINTS " << 2 * segs.size() << " double\n";
            for (const CutSeg& s : segs)
                os << s.seg.a.x << " " << s.seg.a.y << " 0\n"
                   << s.seg.b.x << " " << s.seg.b.y << " 0\n";
            os << "CELLS " << segs.size() << " " << 3 * segs.size() << "\n";
            for (std::size_t k = 0; k < segs.size(); ++k)
                os << "2 " << 2 * k << " " << 2 * k + 1 << "\n";
            os << "CELL_TYPES " << segs.size() << "\n";
            for (std::size_t k = 0; k < segs.size(); ++k) os << "3\n";
            os << "CELL_DATA " << segs.size() << "\nSCALARS u double 1\n"
               << "LOOKUP_TABLE default\n";
            for (const CutSeg& s : segs)
                os << u.eval_on_tri(cid, s.tri, s.seg.at(0.5)) << "\n";
        } else {
            const Vec2 x = dom.points[static_cast<std::size_t>(cid.index)].x;
            vtk_header(os, "point component " + std::to_string(cid.index));
            os << "POINTS 1 double\n" << x.x << " " << x.y << " 0\n";
            os << "CELLS 1 2\n1 0\n";
            os << "CELL_TYPES 1\n1\n";
            os << "POINT_DATA 1\nSCALARS u double 1\nLOOKUP_TABLE default\n"
               << u.point_value(cid.index) << "\n";
        }
        written.push_back(path);
    }
    return written;
}

} // namespace cutfrac
