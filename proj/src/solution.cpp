#include "cutfrac/solution.hpp"

#include <cmath>

#include "cutfrac/errors.hpp"

namespace cutfrac {

SolutionField::SolutionField(const Discretization& disc, std::vector<double> coeffs)
    : disc_(&disc), u_(std::move(coeffs)) {
    if (u_.size() != disc.dofs.total())
        throw ParamError("SolutionField: coefficient count does not match dof map");
}

double SolutionField::eval_on_tri(ComponentId comp, int tri, Vec2 p) const {
    if (comp.dim == 0) return u_[disc_->dofs.point_dof(comp.index)];
    const P1Basis b = eval_basis(disc_->bg.triangle(tri), p, 1e-9);
    const auto& tv = disc_->bg.triangle_vertices(tri);
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += u_[disc_->dofs.vertex_dof(comp, tv[k])] * b.val[k];
    return s;
}

Vec2 SolutionField::grad_on_tri(ComponentId comp, int tri) const {
    if (comp.dim == 0) return {0.0, 0.0};
    const Triangle T = disc_->bg.triangle(tri);
    const P1Basis b = eval_basis(T, T.centroid());
    const auto& tv = disc_->bg.triangle_vertices(tri);
    Vec2 g{0, 0};
    for (int k = 0; k < 3; ++k) g += u_[disc_->dofs.vertex_dof(comp, tv[k])] * b.grad[k];
    return g;
}

double SolutionField::eval(ComponentId comp, Vec2 p, std::optional<SideHint> hint) const {
    if (comp.dim == 0) return u_[disc_->dofs.point_dof(comp.index)];
    const int tri = locate_point(disc_->active(comp), disc_->bg, p, hint);
    return eval_on_tri(comp, tri, p);
}

double SolutionField::point_value(int point_index) const {
    return u_[disc_->dofs.point_dof(point_index)];
}

SolutionField interpolate(const Discretization& disc, const AnalyticField& f) {
    std::vector<double> u(disc.dofs.total(), 0.0);
    const FracturedDomain& dom = disc.domain();
    for (const ComponentId comp : dom.all_components()) {
        if (comp.dim == 0) {
            u[disc.dofs.point_dof(comp.index)] =
                f.value(comp, dom.points[static_cast<std::size_t>(comp.index)].x);
            continue;
        }
        const auto& cd = disc.dofs.comp_dofs(comp);
        for (std::size_t k = 0; k < cd.vertices.size(); ++k)
            u[cd.offset + k] = f.value(comp, disc.bg.vertex(cd.vertices[k]));
    }
    return {disc, std::move(u)};
}

double residual_L_at(const SolutionField& u, const InterfacePoint& ip) {
    const Discretization& d = u.disc();
    const FracturedDomain& dom = d.domain();
    const CrackComponent& c = dom.cracks[static_cast<std::size_t>(ip.crack)];
    const ComponentId cid{1, ip.crack};
    const Vec2 t = c.tangent(ip.crack_segment);
    const double speed = c.speed.value(ip.x);
    const double gam = c.div_beta_tangential(ip.crack_segment, ip.x) + c.alpha.value(ip.x);
    double r = speed * dot(t, u.grad_on_tri(cid, ip.tri_crack)) +
               gam * u.eval_on_tri(cid, ip.tri_crack, ip.x);
    const int sides[2] = {c.left_bulk, c.right_bulk};
    const int tris[2] = {ip.tri_left, ip.tri_right};
    for (int s = 0; s < 2; ++s) {
        if (sides[s] < 0) continue;
        const Vec2 nu = s == 0 ? ip.nu_left : -ip.nu_left;
        const double flux =
            dot(nu, dom.bulks[static_cast<std::size_t>(sides[s])].beta.value(ip.x));
        r -= flux * u.eval_on_tri({2, sides[s]}, tris[s], ip.x);
    }
    return r;
}

double residual_L_point(const SolutionField& u, int point_index) {
    const Discretization& d = u.disc();
    const PointComponent& p = d.domain().points[static_cast<std::size_t>(point_index)];
    double r = p.alpha * u.point_value(point_index);
    for (const CrackEndPoint& ep : d.iq.crack_ends) {
        if (ep.outer || ep.point != point_index) continue;
        r -= ep.nu_beta * u.eval_on_tri({1, ep.crack}, ep.tri_crack, ep.x);
    }
    return r;
}

double residual_L(const SolutionField& u, ComponentId comp, Vec2 p) {
    const Discretization& d = u.disc();
    const FracturedDomain& dom = d.domain();
    switch (comp.dim) {
    case 2: {
        const BulkComponent& b = dom.bulks[static_cast<std::size_t>(comp.index)];
        const int tri = locate_point(d.active(comp), d.bg, p);
        return dot(b.beta.value(p), u.grad_on_tri(comp, tri)) +
               (b.beta.divergence(p) + b.alpha.value(p)) * u.eval_on_tri(comp, tri, p);
    }
    case 1: {
        const CrackComponent& c = dom.cracks[static_cast<std::size_t>(comp.index)];
        InterfacePoint ip;
        ip.x = p;
        ip.w = 0.0;
        ip.crack = comp.index;
        ip.crack_segment = c.segment_at(p, dom.eps_geom());
        ip.nu_left = dom.crack_side_normal_seg(comp.index, ip.crack_segment, Side::left);
        const double off = side_offset(d.bg);
        ip.tri_crack = locate_point(d.active(comp), d.bg, p);
        if (c.left_bulk >= 0)
            ip.tri_left = locate_point(d.active({2, c.left_bulk}), d.bg, p,
                                       SideHint{ip.nu_left, off});
        if (c.right_bulk >= 0)
            ip.tri_right = locate_point(d.active({2, c.right_bulk}), d.bg, p,
                                        SideHint{-ip.nu_left, off});
        return residual_L_at(u, ip);
    }
    case 0:
        return residual_L_point(u, comp.index);
    default:
        throw ParamError("residual_L: invalid dimension");
    }
}

double residual_L(const FracturedDomain& dom, const AnalyticField& v, ComponentId comp,
                  Vec2 p) {
    return d_beta_analytic(dom, v, comp, p) + dom.gamma(comp, p) * v.value(comp, p);
}

} // namespace cutfrac
