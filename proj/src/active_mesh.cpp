#include "cutfrac/active_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "cutfrac/errors.hpp"
#include "cutfrac/quadrature.hpp"

namespace cutfrac {

double CutCell::area() const {
    double a = 0.0;
    for (const Polygon& p : pieces) a += polygon_area(p);
    return a;
}

bool ActiveMesh::is_active(int tri) const {
    return std::binary_search(tris.begin(), tris.end(), tri);
}

double ActiveMesh::measure() const {
    if (comp.dim == 2) {
        double a = 0.0;
        for (const CutCell& c : cells) a += c.area();
        return a;
    }
    if (comp.dim == 1) {
        double len = 0.0;
        for (const CutSeg& s : segs) len += s.seg.length();
        return len;
    }
    return 1.0;
}

double side_offset(const BackgroundMesh& bg) { return 1e-8 * bg.cell_size(); }

namespace {

struct CellRange {
    int i0, i1, j0, j1;
};

CellRange cells_overlapping(const BackgroundMesh& bg, Vec2 lo, Vec2 hi) {
    const int nx = bg.nx();
    auto clampi = [nx](int v) { return std::clamp(v, 0, nx - 1); };
    return {clampi(static_cast<int>(std::floor(lo.x * nx)) - 1),
            clampi(static_cast<int>(std::floor(hi.x * nx)) + 1),
            clampi(static_cast<int>(std::floor(lo.y * nx)) - 1),
            clampi(static_cast<int>(std::floor(hi.y * nx)) + 1)};
}

struct HostedPiece {
    int tri;
    double t0, t1;
};

// Splits a segment into sub-segments each contained in one triangle; where the
// segment lies on a shared edge the lowest-indexed triangle hosts. Also returns
// the full list of triangles meeting the segment with positive length.
void split_segment(const Segment& seg, const BackgroundMesh& bg, double min_len,
                   std::vector<HostedPiece>& hosted, std::vector<int>& touching) {
    hosted.clear();
    touching.clear();
    const Vec2 lo{std::min(seg.a.x, seg.b.x), std::min(seg.a.y, seg.b.y)};
    const Vec2 hi{std::max(seg.a.x, seg.b.x), std::max(seg.a.y, seg.b.y)};
    const CellRange r = cells_overlapping(bg, lo, hi);
    const double len = seg.length();
    if (len <= 0.0) return;
    const double tmin = min_len / len;

    struct Candidate {
        int tri;
        double t0, t1;
    };
    std::vector<Candidate> cand;
    std::vector<double> cuts{0.0, 1.0};
    for (int j = r.j0; j <= r.j1; ++j) {
        for (int i = r.i0; i <= r.i1; ++i) {
            for (int k = 0; k < 2; ++k) {
                const int tri = 2 * (j * bg.nx() + i) + k;
                const auto t = clip_segment_triangle_param(seg, bg.triangle(tri));
                if (!t || (*t)[1] - (*t)[0] < tmin) continue;
                cand.push_back({tri, (*t)[0], (*t)[1]});
                touching.push_back(tri);
                cuts.push_back((*t)[0]);
                cuts.push_back((*t)[1]);
            }
        }
    }
    std::sort(touching.begin(), touching.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [tmin](double a, double b) { return b - a < 0.5 * tmin; }),
               cuts.end());

    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double ta = cuts[c], tb = cuts[c + 1];
        if (tb - ta < tmin) continue;
        int host = -1;
        for (const Candidate& cd : cand) {
            if (cd.t0 <= ta + 0.25 * tmin && cd.t1 >= tb - 0.25 * tmin) {
                if (host < 0 || cd.tri < host) host = cd.tri;
            }
        }
        if (host < 0)
            throw GeometryError("segment piece not covered by any triangle (outside mesh?)");
        if (!hosted.empty() && hosted.back().tri == host &&
            std::abs(hosted.back().t1 - ta) < 0.5 * tmin) {
            hosted.back().t1 = tb; // merge adjacent pieces in the same triangle
        } else {
            hosted.push_back({host, ta, tb});
        }
    }
}

void require_inside_box(const FracturedDomain& dom, Vec2 p, const std::string& what) {
    const double eps = dom.eps_geom();
    if (p.x < dom.box_lo.x - eps || p.x > dom.box_hi.x + eps || p.y < dom.box_lo.y - eps ||
        p.y > dom.box_hi.y + eps)
        throw GeometryError(what + " lies outside the background domain");
}

} // namespace

ActiveMesh extract_active_mesh(const FracturedDomain& dom, ComponentId comp,
                               const BackgroundMesh& bg) {
    ActiveMesh out;
    out.comp = comp;
    const double eps = dom.eps_geom();

    if (comp.dim == 2) {
        const BulkComponent& b = dom.bulks[comp.index];
        for (const Vec2& v : b.polygon) require_inside_box(dom, v, "bulk '" + b.name + "'");
        Vec2 lo = b.polygon[0], hi = b.polygon[0];
        for (const Vec2& v : b.polygon) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
        }
        const CellRange r = cells_overlapping(bg, lo, hi);
        for (int j = r.j0; j <= r.j1; ++j) {
            for (int i = r.i0; i <= r.i1; ++i) {
                for (int k = 0; k < 2; ++k) {
                    const int tri = 2 * (j * bg.nx() + i) + k;
                    const Triangle T = bg.triangle(tri);
                    CutCell cell;
                    cell.tri = tri;
                    for (const Polygon& piece : b.convex_pieces) {
                        Polygon clipped = clip_polygon_triangle(piece, T, eps * eps);
                        if (!clipped.empty()) cell.pieces.push_back(std::move(clipped));
                    }
                    if (!cell.pieces.empty() && cell.area() > eps * eps) {
                        out.tris.push_back(tri);
                        out.cells.push_back(std::move(cell));
                    }
                }
            }
        }
    } else if (comp.dim == 1) {
        const CrackComponent& c = dom.cracks[comp.index];
        for (const Vec2& v : c.polyline) require_inside_box(dom, v, "crack '" + c.name + "'");
        std::vector<HostedPiece> hosted;
        std::vector<int> touching;
        for (int s = 0; s < c.segment_count(); ++s) {
            const Segment sg = c.segment(s);
            split_segment(sg, bg, eps, hosted, touching);
            for (int t : touching) out.tris.push_back(t);
            for (const HostedPiece& hp : hosted)
                out.segs.push_back({hp.tri, s, Segment{sg.at(hp.t0), sg.at(hp.t1)}});
        }
        std::sort(out.tris.begin(), out.tris.end());
        out.tris.erase(std::unique(out.tris.begin(), out.tris.end()), out.tris.end());
    } else {
        const PointComponent& p = dom.points[comp.index];
        require_inside_box(dom, p.x, "point '" + p.name + "'");
        out.tris = bg.triangles_containing(p.x, eps);
        if (out.tris.empty())
            throw GeometryError("point '" + p.name + "' not inside any background triangle");
        out.host_tri = out.tris.front();
    }
    return out;
}

int locate_point(const ActiveMesh& active, const BackgroundMesh& bg, Vec2 p,
                 std::optional<SideHint> hint) {
    const double tol = 1e-12;
    if (active.comp.dim == 0) return active.host_tri;
    const Vec2 probe = hint ? p - hint->scale * hint->nu : p;
    for (int t : bg.triangles_near(probe))
        if (active.is_active(t) && point_in_triangle(bg.triangle(t), probe, tol)) return t;
    if (hint) {
        for (int t : bg.triangles_near(p))
            if (active.is_active(t) && point_in_triangle(bg.triangle(t), p, tol)) return t;
    }
    throw GeometryError("locate_point: no active triangle contains (" + std::to_string(p.x) +
                        "," + std::to_string(p.y) + ")");
}

InterfaceQuadrature build_interface_quadrature(const FracturedDomain& dom,
                                               const BackgroundMesh& bg,
                                               const std::vector<ActiveMesh>& bulk_active,
                                               const std::vector<ActiveMesh>& crack_active,
                                               int segment_points) {
    InterfaceQuadrature out;
    const double off = side_offset(bg);

    for (int ci = 0; ci < static_cast<int>(dom.cracks.size()); ++ci) {
        const CrackComponent& c = dom.cracks[ci];
        for (const CutSeg& cs : crack_active[static_cast<std::size_t>(ci)].segs) {
            const QuadRule q = segment_rule(cs.seg, segment_points);
            const Vec2 nu_left = dom.crack_side_normal_seg(ci, cs.crack_segment, Side::left);
            for (std::size_t k = 0; k < q.size(); ++k) {
                InterfacePoint ip;
                ip.x = q.points[k];
                ip.w = q.weights[k];
                ip.crack = ci;
                ip.crack_segment = cs.crack_segment;
                ip.nu_left = nu_left;
                ip.tri_crack = cs.tri;
                if (c.left_bulk >= 0)
                    ip.tri_left = locate_point(bulk_active[static_cast<std::size_t>(c.left_bulk)],
                                               bg, ip.x, SideHint{nu_left, off});
                if (c.right_bulk >= 0)
                    ip.tri_right =
                        locate_point(bulk_active[static_cast<std::size_t>(c.right_bulk)], bg,
                                     ip.x, SideHint{-nu_left, off});
                out.crack_points.push_back(ip);
            }
        }
        for (int which = 0; which < 2; ++which) {
            CrackEndPoint ep;
            ep.crack = ci;
            ep.which = which;
            ep.x = c.endpoint(which);
            ep.nu_beta = c.end_flux(which);
            const CrackEnd& end = which == 0 ? c.start : c.end;
            ep.outer = end.outer;
            ep.point = end.point;
            ep.tri_crack = locate_point(crack_active[static_cast<std::size_t>(ci)], bg, ep.x,
                                        SideHint{c.end_normal(which), off});
            out.crack_ends.push_back(ep);
        }
    }

    for (int bi = 0; bi < static_cast<int>(dom.bulks.size()); ++bi) {
        const BulkComponent& b = dom.bulks[bi];
        std::vector<HostedPiece> hosted;
        std::vector<int> touching;
        for (std::size_t e = 0; e < b.edges.size(); ++e) {
            if (!b.edges[e].outer) continue;
            const Vec2 pa = b.polygon[e];
            const Vec2 pb = b.polygon[(e + 1) % b.polygon.size()];
            const Segment edge{pa, pb};
            const Vec2 nu = normalized(Vec2{(pb - pa).y, -(pb - pa).x});
            split_segment(edge, bg, dom.eps_geom(), hosted, touching);
            for (const HostedPiece& hp : hosted) {
                const Segment sub{edge.at(hp.t0), edge.at(hp.t1)};
                const QuadRule q = segment_rule(sub, segment_points);
                for (std::size_t k = 0; k < q.size(); ++k) {
                    BulkBoundaryPoint bp;
                    bp.x = q.points[k];
                    bp.w = q.weights[k];
                    bp.bulk = bi;
                    bp.nu = nu;
                    bp.tri = locate_point(bulk_active[static_cast<std::size_t>(bi)], bg, bp.x,
                                          SideHint{nu, off});
                    out.boundary_points.push_back(bp);
                }
            }
        }
    }
    return out;
}

void dump_cut_geometry_csv(const std::vector<ActiveMesh>& meshes, std::ostream& os) {
    os << "dim,index,triangle,measure\n";
    for (const ActiveMesh& m : meshes) {
        if (m.comp.dim == 2) {
            for (const CutCell& c : m.cells)
                os << m.comp.dim << "," << m.comp.index << "," << c.tri << "," << c.area()
                   << "\n";
        } else if (m.comp.dim == 1) {
            for (const CutSeg& s : m.segs)
                os << m.comp.dim << "," << m.comp.index << "," << s.tri << ","
                   << s.seg.length() << "\n";
        } else {
            os << m.comp.dim << "," << m.comp.index << "," << m.host_tri << ",1\n";
        }
    }
}

} // namespace cutfrac
