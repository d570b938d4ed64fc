#include "cutfrac/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cutfrac/errors.hpp"
#include "cutfrac/quadrature.hpp"

namespace cutfrac {

P1Basis eval_basis(const Triangle& t, Vec2 p, double tol) {
    const double a2 = 2.0 * t.area();
    P1Basis b;
    b.val[0] = cross(t.v[2] - t.v[1], p - t.v[1]) / a2;
    b.val[1] = cross(t.v[0] - t.v[2], p - t.v[2]) / a2;
    b.val[2] = cross(t.v[1] - t.v[0], p - t.v[0]) / a2;
    for (int k = 0; k < 3; ++k)
        if (b.val[k] < -tol)
            throw GeometryError("eval_basis: point outside triangle (coordinate " +
                                std::to_string(b.val[k]) + ")");
    b.grad[0] = rot90(t.v[2] - t.v[1]) / a2;
    b.grad[1] = rot90(t.v[0] - t.v[2]) / a2;
    b.grad[2] = rot90(t.v[1] - t.v[0]) / a2;
    return b;
}

std::size_t DofMap::index_of(ComponentId c) const {
    switch (c.dim) {
    case 0:
        return static_cast<std::size_t>(c.index);
    case 1:
        return static_cast<std::size_t>(n0_ + c.index);
    default:
        return static_cast<std::size_t>(n0_ + n1_ + c.index);
    }
}

const DofMap::CompDofs& DofMap::comp_dofs(ComponentId c) const {
    return comps_[index_of(c)];
}

std::size_t DofMap::vertex_dof(ComponentId c, int background_vertex) const {
    const CompDofs& cd = comp_dofs(c);
    const auto it = cd.local.find(background_vertex);
    if (it == cd.local.end())
        throw GeometryError("vertex_dof: vertex " + std::to_string(background_vertex) +
                            " not active for component");
    return cd.offset + static_cast<std::size_t>(it->second);
}

std::size_t DofMap::point_dof(int point_index) const {
    return comps_[static_cast<std::size_t>(point_index)].offset;
}

std::size_t DofMap::dof_count(ComponentId c) const {
    const CompDofs& cd = comp_dofs(c);
    return c.dim == 0 ? 1 : cd.vertices.size();
}

ComponentId DofMap::owner(std::size_t dof) const {
    for (std::size_t k = comps_.size(); k-- > 0;)
        if (dof >= comps_[k].offset) return comps_[k].comp;
    throw ParamError("owner: dof out of range");
}

DofMap DofMap::build(const FracturedDomain& dom, const BackgroundMesh& bg,
                     const std::vector<ActiveMesh>& bulk,
                     const std::vector<ActiveMesh>& crack) {
    DofMap m;
    m.n0_ = static_cast<int>(dom.points.size());
    m.n1_ = static_cast<int>(crack.size());
    m.n2_ = static_cast<int>(bulk.size());

    for (int i = 0; i < m.n0_; ++i) {
        CompDofs cd;
        cd.comp = {0, i};
        cd.offset = m.total_;
        m.total_ += 1;
        m.comps_.push_back(std::move(cd));
    }
    auto add_nodal = [&](const ActiveMesh& am) {
        CompDofs cd;
        cd.comp = am.comp;
        cd.offset = m.total_;
        std::vector<int> verts;
        for (int t : am.tris) {
            const auto& tv = bg.triangle_vertices(t);
            verts.insert(verts.end(), tv.begin(), tv.end());
        }
        std::sort(verts.begin(), verts.end());
        verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
        cd.vertices = std::move(verts);
        for (std::size_t k = 0; k < cd.vertices.size(); ++k)
            cd.local[cd.vertices[k]] = static_cast<int>(k);
        m.total_ += cd.vertices.size();
        m.comps_.push_back(std::move(cd));
    };
    for (const ActiveMesh& am : crack) add_nodal(am);
    for (const ActiveMesh& am : bulk) add_nodal(am);
    return m;
}

Discretization Discretization::build(const FracturedDomain& dom, int nx) {
    Discretization d;
    d.dom = &dom;
    d.bg = BackgroundMesh(nx);
    for (int i = 0; i < dom.component_count(2); ++i)
        d.bulk_active.push_back(extract_active_mesh(dom, {2, i}, d.bg));
    for (int i = 0; i < dom.component_count(1); ++i)
        d.crack_active.push_back(extract_active_mesh(dom, {1, i}, d.bg));
    for (int i = 0; i < dom.component_count(0); ++i)
        d.point_active.push_back(extract_active_mesh(dom, {0, i}, d.bg));
    d.iq = build_interface_quadrature(dom, d.bg, d.bulk_active, d.crack_active);
    d.dofs = DofMap::build(dom, d.bg, d.bulk_active, d.crack_active);
    return d;
}

const ActiveMesh& Discretization::active(ComponentId c) const {
    switch (c.dim) {
    case 2:
        return bulk_active[static_cast<std::size_t>(c.index)];
    case 1:
        return crack_active[static_cast<std::size_t>(c.index)];
    default:
        return point_active[static_cast<std::size_t>(c.index)];
    }
}

namespace {

struct DofCoef {
    std::size_t dof;
    double coef;
};

// Accumulator with a non-finite guard; the message names the triangle and term.
// Zero-valued contributions are stored so the sparsity pattern stays symmetric.
class Acc {
public:
    Acc(TripletBuffer& A, std::vector<double>& b) : A_(A), b_(b) {}

    void matrix(std::size_t row, std::size_t col, double v, int tri, const char* term) {
        check(v, tri, term);
        A_.add(row, col, v);
    }
    void rhs(std::size_t row, double v, int tri, const char* term) {
        check(v, tri, term);
        b_[row] += v;
    }

private:
    void check(double v, int tri, const char* term) const {
        if (!std::isfinite(v))
            throw AssemblyError("non-finite contribution in term '" + std::string(term) +
                                "' at triangle " + std::to_string(tri));
    }
    TripletBuffer& A_;
    std::vector<double>& b_;
};

std::array<std::size_t, 3> tri_dofs(const Discretization& d, ComponentId comp, int tri) {
    const auto& tv = d.bg.triangle_vertices(tri);
    return {d.dofs.vertex_dof(comp, tv[0]), d.dofs.vertex_dof(comp, tv[1]),
            d.dofs.vertex_dof(comp, tv[2])};
}

// L-operator coefficients on a crack quadrature point: crack gradient/reaction
// entries plus minus the one-sided bulk trace fluxes.
void crack_L_coefs(const Discretization& d, const InterfacePoint& ip,
                   std::vector<DofCoef>& out) {
    out.clear();
    const FracturedDomain& dom = d.domain();
    const CrackComponent& c = dom.cracks[static_cast<std::size_t>(ip.crack)];
    const ComponentId cid{1, ip.crack};
    const Vec2 t = c.tangent(ip.crack_segment);
    const double speed = c.speed.value(ip.x);
    const double gam = c.div_beta_tangential(ip.crack_segment, ip.x) + c.alpha.value(ip.x);
    const P1Basis bc = eval_basis(d.bg.triangle(ip.tri_crack), ip.x);
    const auto cd = tri_dofs(d, cid, ip.tri_crack);
    for (int k = 0; k < 3; ++k)
        out.push_back({cd[k], speed * dot(t, bc.grad[k]) + gam * bc.val[k]});
    const int sides[2] = {c.left_bulk, c.right_bulk};
    const int tris[2] = {ip.tri_left, ip.tri_right};
    for (int s = 0; s < 2; ++s) {
        if (sides[s] < 0) continue;
        const Vec2 nu = s == 0 ? ip.nu_left : -ip.nu_left;
        const double flux = dot(nu, dom.bulks[static_cast<std::size_t>(sides[s])].beta.value(ip.x));
        const P1Basis bb = eval_basis(d.bg.triangle(tris[s]), ip.x);
        const auto bd = tri_dofs(d, {2, sides[s]}, tris[s]);
        for (int k = 0; k < 3; ++k) out.push_back({bd[k], -flux * bb.val[k]});
    }
}

// L-operator coefficients at a point component: alpha on the point dof minus
// the incident crack endpoint fluxes.
void point_L_coefs(const Discretization& d, int point_index,
                   const std::vector<const CrackEndPoint*>& incident,
                   std::vector<DofCoef>& out) {
    out.clear();
    const PointComponent& p = d.domain().points[static_cast<std::size_t>(point_index)];
    out.push_back({d.dofs.point_dof(point_index), p.alpha});
    for (const CrackEndPoint* ep : incident) {
        const P1Basis bc = eval_basis(d.bg.triangle(ep->tri_crack), p.x);
        const auto cd = tri_dofs(d, {1, ep->crack}, ep->tri_crack);
        for (int k = 0; k < 3; ++k) out.push_back({cd[k], -ep->nu_beta * bc.val[k]});
    }
}

} // namespace

AssembledSystem assemble(const Discretization& d, const AssemblyParams& params) {
    const FracturedDomain& dom = d.domain();
    const double h = d.h();
    const double t1h = params.tau1 * h;

    TripletBuffer trip(d.dofs.total());
    std::vector<double> rhs(d.dofs.total(), 0.0);
    Acc acc(trip, rhs);

    // Bulk components: GLS volume terms on cut polygons, gradient stabilization
    // over whole active triangles, inflow boundary penalty on outer edges.
    for (int bi = 0; bi < dom.component_count(2); ++bi) {
        const BulkComponent& bulk = dom.bulks[static_cast<std::size_t>(bi)];
        const ComponentId cid{2, bi};
        const ActiveMesh& am = d.bulk_active[static_cast<std::size_t>(bi)];
        for (const CutCell& cell : am.cells) {
            const Triangle T = d.bg.triangle(cell.tri);
            const auto gd = tri_dofs(d, cid, cell.tri);
            for (const Polygon& piece : cell.pieces) {
                const QuadRule q = polygon_rule(piece, params.volume_degree);
                for (std::size_t k = 0; k < q.size(); ++k) {
                    const Vec2 x = q.points[k];
                    const double w = q.weights[k];
                    const P1Basis bas = eval_basis(T, x, 1e-9);
                    const Vec2 beta = bulk.beta.value(x);
                    const double gam = bulk.beta.divergence(x) + bulk.alpha.value(x);
                    std::array<double, 3> L;
                    for (int a = 0; a < 3; ++a)
                        L[a] = dot(beta, bas.grad[a]) + gam * bas.val[a];
                    const double f = bulk.f.value(x);
                    for (int a = 0; a < 3; ++a) {
                        for (int c = 0; c < 3; ++c)
                            acc.matrix(gd[a], gd[c],
                                       w * (bas.val[a] * L[c] + t1h * L[a] * L[c]), cell.tri,
                                       "bulk volume");
                        acc.rhs(gd[a], w * f * (bas.val[a] + t1h * L[a]), cell.tri,
                                "bulk load");
                    }
                }
            }
        }
        if (params.tau2 > 0.0) {
            const double s2 = params.tau2 * h * h * h; // codimension 0
            for (int tri : am.tris) {
                const Triangle T = d.bg.triangle(tri);
                const P1Basis bas = eval_basis(T, T.centroid());
                const auto gd = tri_dofs(d, cid, tri);
                const double a = T.area();
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        acc.matrix(gd[i], gd[j], s2 * a * dot(bas.grad[i], bas.grad[j]), tri,
                                   "bulk stabilization");
            }
        }
    }

    // Crack components: volume + GLS with one-sided bulk traces, interface
    // penalties on inflow sides, gradient stabilization.
    std::vector<DofCoef> L;
    for (const InterfacePoint& ip : d.iq.crack_points) {
        const CrackComponent& c = dom.cracks[static_cast<std::size_t>(ip.crack)];
        const ComponentId cid{1, ip.crack};
        const P1Basis bc = eval_basis(d.bg.triangle(ip.tri_crack), ip.x);
        const auto cd = tri_dofs(d, cid, ip.tri_crack);
        crack_L_coefs(d, ip, L);
        const double f = c.f.value(ip.x);
        for (int a = 0; a < 3; ++a) {
            for (const DofCoef& dc : L)
                acc.matrix(cd[a], dc.dof, ip.w * bc.val[a] * dc.coef, ip.tri_crack,
                           "crack advection");
            acc.rhs(cd[a], ip.w * f * bc.val[a], ip.tri_crack, "crack load");
        }
        for (const DofCoef& da : L) {
            for (const DofCoef& db : L)
                acc.matrix(da.dof, db.dof, ip.w * t1h * da.coef * db.coef, ip.tri_crack,
                           "crack GLS");
            acc.rhs(da.dof, ip.w * t1h * f * da.coef, ip.tri_crack, "crack GLS load");
        }
        // Inflow interface penalty per side: (|nu.beta|_- [v], [w]).
        const int sides[2] = {c.left_bulk, c.right_bulk};
        const int tris[2] = {ip.tri_left, ip.tri_right};
        for (int s = 0; s < 2; ++s) {
            if (sides[s] < 0) continue;
            const Vec2 nu = s == 0 ? ip.nu_left : -ip.nu_left;
            const double flux =
                dot(nu, dom.bulks[static_cast<std::size_t>(sides[s])].beta.value(ip.x));
            if (flux >= 0.0) continue;
            const double wpen = ip.w * std::abs(flux);
            const P1Basis bb = eval_basis(d.bg.triangle(tris[s]), ip.x);
            const auto bd = tri_dofs(d, {2, sides[s]}, tris[s]);
            std::array<DofCoef, 6> J;
            for (int k = 0; k < 3; ++k) J[static_cast<std::size_t>(k)] = {bd[k], bb.val[k]};
            for (int k = 0; k < 3; ++k)
                J[static_cast<std::size_t>(3 + k)] = {cd[k], -bc.val[k]};
            for (const DofCoef& ja : J)
                for (const DofCoef& jb : J)
                    acc.matrix(ja.dof, jb.dof, wpen * ja.coef * jb.coef, ip.tri_crack,
                               "interface penalty");
        }
    }
    for (int ci = 0; params.tau2 > 0.0 && ci < dom.component_count(1); ++ci) {
        const ComponentId cid{1, ci};
        const double s2 = params.tau2 * h * h; // codimension 1
        for (int tri : d.crack_active[static_cast<std::size_t>(ci)].tris) {
            const Triangle T = d.bg.triangle(tri);
            const P1Basis bas = eval_basis(T, T.centroid());
            const auto gd = tri_dofs(d, cid, tri);
            const double a = T.area();
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    acc.matrix(gd[i], gd[j], s2 * a * dot(bas.grad[i], bas.grad[j]), tri,
                               "crack stabilization");
        }
    }

    // Crack endpoints: outer ones carry the weak boundary condition, interior
    // ones the inflow jump penalty against the point dof (unit point measure).
    for (const CrackEndPoint& ep : d.iq.crack_ends) {
        if (ep.nu_beta >= 0.0) continue;
        const double wpen = std::abs(ep.nu_beta);
        const ComponentId cid{1, ep.crack};
        const P1Basis bc = eval_basis(d.bg.triangle(ep.tri_crack), ep.x);
        const auto cd = tri_dofs(d, cid, ep.tri_crack);
        if (ep.outer) {
            const double g = dom.cracks[static_cast<std::size_t>(ep.crack)].g.value(ep.x);
            for (int a = 0; a < 3; ++a) {
                for (int b2 = 0; b2 < 3; ++b2)
                    acc.matrix(cd[a], cd[b2], wpen * bc.val[a] * bc.val[b2], ep.tri_crack,
                               "crack boundary penalty");
                acc.rhs(cd[a], wpen * g * bc.val[a], ep.tri_crack, "crack boundary data");
            }
        } else {
            const std::size_t pd = d.dofs.point_dof(ep.point);
            std::array<DofCoef, 4> J;
            for (int k = 0; k < 3; ++k) J[static_cast<std::size_t>(k)] = {cd[k], bc.val[k]};
            J[3] = {pd, -1.0};
            for (const DofCoef& ja : J)
                for (const DofCoef& jb : J)
                    acc.matrix(ja.dof, jb.dof, wpen * ja.coef * jb.coef, ep.tri_crack,
                               "point junction penalty");
        }
    }

    // Bulk outer boundary: weak inflow data.
    for (const BulkBoundaryPoint& bp : d.iq.boundary_points) {
        const BulkComponent& bulk = dom.bulks[static_cast<std::size_t>(bp.bulk)];
        const double flux = dot(bp.nu, bulk.beta.value(bp.x));
        if (flux >= 0.0) continue;
        const double wpen = bp.w * std::abs(flux);
        const P1Basis bas = eval_basis(d.bg.triangle(bp.tri), bp.x);
        const auto gd = tri_dofs(d, {2, bp.bulk}, bp.tri);
        const double g = bulk.g.value(bp.x);
        for (int a = 0; a < 3; ++a) {
            for (int b2 = 0; b2 < 3; ++b2)
                acc.matrix(gd[a], gd[b2], wpen * bas.val[a] * bas.val[b2], bp.tri,
                           "bulk boundary penalty");
            acc.rhs(gd[a], wpen * g * bas.val[a], bp.tri, "bulk boundary data");
        }
    }

    // Point components: advection row, GLS coupling across the point, load.
    {
        std::vector<std::vector<const CrackEndPoint*>> incident(dom.points.size());
        for (const CrackEndPoint& ep : d.iq.crack_ends)
            if (!ep.outer) incident[static_cast<std::size_t>(ep.point)].push_back(&ep);
        std::vector<DofCoef> Lp;
        for (int pi = 0; pi < dom.component_count(0); ++pi) {
            const PointComponent& p = dom.points[static_cast<std::size_t>(pi)];
            const std::size_t pd = d.dofs.point_dof(pi);
            point_L_coefs(d, pi, incident[static_cast<std::size_t>(pi)], Lp);
            for (const DofCoef& dc : Lp)
                acc.matrix(pd, dc.dof, dc.coef, -1, "point advection");
            for (const DofCoef& da : Lp)
                for (const DofCoef& db : Lp)
                    acc.matrix(da.dof, db.dof, t1h * da.coef * db.coef, -1, "point GLS");
            acc.rhs(pd, p.f, -1, "point load");
            for (const DofCoef& da : Lp)
                acc.rhs(da.dof, t1h * p.f * da.coef, -1, "point GLS load");
        }
    }

    // Pin dofs whose rows and columns carry no energy (tau2 = 0 leaves
    // active-mesh vertices away from the manifold untouched). The unit diagonal
    // fixes them to zero without affecting the solution on the component.
    // Rounding residue from non-representable coordinates counts as empty.
    AssembledSystem out;
    {
        std::vector<double> row_max(d.dofs.total(), 0.0), col_max(d.dofs.total(), 0.0);
        double global_max = 0.0;
        for (const auto& e : trip.entries()) {
            row_max[e.row] = std::max(row_max[e.row], std::abs(e.value));
            col_max[e.col] = std::max(col_max[e.col], std::abs(e.value));
            global_max = std::max(global_max, std::abs(e.value));
        }
        const double tol = 1e-12 * global_max;
        for (std::size_t i = 0; i < d.dofs.total(); ++i) {
            if (row_max[i] <= tol && col_max[i] <= tol) {
                trip.add(i, i, 1.0);
                out.pinned.push_back(i);
            }
        }
    }
    out.A = SparseMatrix::compress(trip);
    out.b = std::move(rhs);
    return out;
}

} // namespace cutfrac
