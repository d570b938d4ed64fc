#ifndef CUTFRAC_ACTIVE_MESH_HPP
#define CUTFRAC_ACTIVE_MESH_HPP

#include <optional>
#include <vector>

#include "cutfrac/background_mesh.hpp"
#include "cutfrac/domain.hpp"

namespace cutfrac {

/// Cut geometry of one active triangle of a bulk component.
struct CutCell {
    int tri;
    std::vector<Polygon> pieces; // convex, disjoint, tile tri ∩ component
    double area() const;
};

/// One hosted sub-segment of a crack. The tiling is deduplicated: when a crack
/// runs along a shared triangle edge, the lowest-indexed triangle hosts it.
struct CutSeg {
    int tri;
    int crack_segment;
    Segment seg;
};

struct ActiveMesh {
    ComponentId comp;
    std::vector<int> tris; // sorted; every triangle meets the component with positive measure
    std::vector<CutCell> cells; // d=2 only
    std::vector<CutSeg> segs;   // d=1 only
    int host_tri = -1;          // d=0 only: lowest-indexed triangle containing the point

    bool is_active(int tri) const;
    /// Total measure of the cut tiling (area / length / 1 for a point).
    double measure() const;
};

ActiveMesh extract_active_mesh(const FracturedDomain& dom, ComponentId comp,
                               const BackgroundMesh& bg);

struct SideHint {
    Vec2 nu;     // offset direction; the probe moves against it
    double scale; // offset distance
};

/// Triangle of the active mesh containing p (optionally offset by -scale*nu).
/// Ties broken toward the lowest triangle index. Throws GeometryError when not found.
int locate_point(const ActiveMesh& active, const BackgroundMesh& bg, Vec2 p,
                 std::optional<SideHint> hint = std::nullopt);

/// Quadrature point on a crack with one-sided host resolution on both bulk sides.
struct InterfacePoint {
    Vec2 x;
    double w;
    int crack;
    int crack_segment;
    Vec2 nu_left;      // exterior normal of the left bulk at the crack
    int tri_crack;     // host in the crack's active mesh
    int tri_left = -1; // host in the left bulk's active mesh (-1: no neighbor)
    int tri_right = -1;
};

/// Quadrature point on the outer part of a bulk boundary.
struct BulkBoundaryPoint {
    Vec2 x;
    double w;
    int bulk;
    Vec2 nu; // outward
    int tri; // host in the bulk's active mesh
};

/// One crack endpoint with its host triangle resolved.
struct CrackEndPoint {
    int crack;
    int which; // 0 = start, 1 = end
    Vec2 x;
    double nu_beta; // nu_1 . beta_1 at the endpoint
    bool outer;
    int point = -1; // d=0 component when interior
    int tri_crack;
};

/// All lower-dimensional quadrature needed by the forms: crack-line rules with
/// two-sided bulk hosts, outer-boundary rules per bulk, and crack endpoints.
struct InterfaceQuadrature {
    std::vector<InterfacePoint> crack_points;
    std::vector<BulkBoundaryPoint> boundary_points;
    std::vector<CrackEndPoint> crack_ends;
};

InterfaceQuadrature build_interface_quadrature(const FracturedDomain& dom,
                                               const BackgroundMesh& bg,
                                               const std::vector<ActiveMesh>& bulk_active,
                                               const std::vector<ActiveMesh>& crack_active,
                                               int segment_points = 3);

/// Offset distance used for one-sided host resolution: 1e-8 * cell size.
double side_offset(const BackgroundMesh& bg);

/// Debug dump: one row per cut entity (component, triangle, measure).
void dump_cut_geometry_csv(const std::vector<ActiveMesh>& meshes, std::ostream& os);

} // namespace cutfrac

#endif
