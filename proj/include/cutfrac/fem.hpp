#ifndef CUTFRAC_FEM_HPP
#define CUTFRAC_FEM_HPP

#include <unordered_map>
#include <vector>

#include "cutfrac/active_mesh.hpp"
#include "cutfrac/linalg.hpp"

namespace cutfrac {

/// P1 barycentric values and (constant) gradients on a triangle.
struct P1Basis {
    std::array<double, 3> val;
    std::array<Vec2, 3> grad;
};

/// Throws GeometryError when the point lies outside the triangle (beyond tol).
P1Basis eval_basis(const Triangle& t, Vec2 p, double tol = 1e-10);

/// Global numbering of the direct-sum space: one continuous P1 space per
/// component active mesh, one scalar per d=0 component. A background vertex
/// shared by k component meshes owns k distinct global dofs.
class DofMap {
public:
    struct CompDofs {
        ComponentId comp;
        std::size_t offset = 0;
        std::vector<int> vertices; // ascending background index; empty for d=0
        std::unordered_map<int, int> local; // background vertex -> local index
    };

    std::size_t total() const { return total_; }
    const CompDofs& comp_dofs(ComponentId c) const;
    std::size_t vertex_dof(ComponentId c, int background_vertex) const;
    std::size_t point_dof(int point_index) const;
    std::size_t dof_count(ComponentId c) const;
    /// Component owning a global dof (every dof belongs to exactly one).
    ComponentId owner(std::size_t dof) const;

    static DofMap build(const FracturedDomain& dom, const BackgroundMesh& bg,
                        const std::vector<ActiveMesh>& bulk,
                        const std::vector<ActiveMesh>& crack);

private:
    std::vector<CompDofs> comps_; // ascending (d, i)
    std::size_t total_ = 0;
    std::size_t index_of(ComponentId c) const;
    int n0_ = 0, n1_ = 0, n2_ = 0;
};

/// Everything geometric and combinatorial needed to assemble on one mesh level.
struct Discretization {
    const FracturedDomain* dom = nullptr;
    BackgroundMesh bg{2};
    std::vector<ActiveMesh> bulk_active, crack_active, point_active;
    InterfaceQuadrature iq;
    DofMap dofs;

    static Discretization build(const FracturedDomain& dom, int nx);

    const ActiveMesh& active(ComponentId c) const;
    double h() const { return bg.cell_size(); }
    const FracturedDomain& domain() const { return *dom; }
};

struct AssemblyParams {
    double tau1 = 1e-2; // Galerkin least-squares weight
    double tau2 = 1e-3; // full-gradient stabilization weight
    int volume_degree = 2;
    bool deterministic = true; // single-threaded fixed-order accumulation
};

struct AssembledSystem {
    SparseMatrix A;
    std::vector<double> b;
    /// Dofs with structurally empty rows and columns that were pinned to zero
    /// via a unit diagonal (only occurs when tau2 = 0 leaves off-manifold
    /// vertices untouched).
    std::vector<std::size_t> pinned;
};

/// Builds the stabilized convection system: GLS volume terms on the cut
/// geometry, full-gradient stabilization over active triangles, inflow-weighted
/// interface and boundary penalties, and the point-component couplings.
AssembledSystem assemble(const Discretization& disc, const AssemblyParams& params);

} // namespace cutfrac

#endif
