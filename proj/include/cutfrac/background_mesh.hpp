#ifndef CUTFRAC_BACKGROUND_MESH_HPP
#define CUTFRAC_BACKGROUND_MESH_HPP

#include <array>
#include <vector>

#include "cutfrac/geometry.hpp"

namespace cutfrac {

/// Structured triangulation of the unit square: nx*nx cells, each split along
/// the lower-left/upper-right diagonal. Deterministic vertex/triangle ordering.
class BackgroundMesh {
public:
    explicit BackgroundMesh(int nx); // throws ParamError when nx < 2

    int nx() const { return nx_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t triangle_count() const { return tris_.size(); }

    Vec2 vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
    const std::array<int, 3>& triangle_vertices(int t) const {
        return tris_[static_cast<std::size_t>(t)];
    }
    Triangle triangle(int t) const;

    /// Grid cell size 1/nx, the mesh parameter used in the stabilized forms.
    double cell_size() const { return 1.0 / nx_; }
    /// Largest edge length sqrt(2)/nx.
    double max_edge() const { return std::sqrt(2.0) / nx_; }

    /// Triangles of the cell containing p plus the neighboring cells
    /// (tolerance band for points on cell boundaries). Sorted, unique.
    std::vector<int> triangles_near(Vec2 p) const;

    /// All triangles whose closure contains p (within tol), sorted ascending.
    std::vector<int> triangles_containing(Vec2 p, double tol) const;

    int vertex_index(int i, int j) const { return j * (nx_ + 1) + i; }

private:
    int nx_;
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> tris_;
};

} // namespace cutfrac

#endif
