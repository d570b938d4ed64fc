#include "cutfrac/background_mesh.hpp"

#include <algorithm>
#include <cmath>

#include "cutfrac/errors.hpp"

namespace cutfrac {

BackgroundMesh::BackgroundMesh(int nx) : nx_(nx) {
    if (nx < 2) throw ParamError("background mesh: nx must be >= 2");
    vertices_.reserve(static_cast<std::size_t>((nx + 1) * (nx + 1)));
    for (int j = 0; j <= nx; ++j)
        for (int i = 0; i <= nx; ++i)
            vertices_.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / nx});
    tris_.reserve(static_cast<std::size_t>(2 * nx * nx));
    for (int j = 0; j < nx; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = vertex_index(i, j);
            const int b = vertex_index(i + 1, j);
            const int c = vertex_index(i + 1, j + 1);
            const int d = vertex_index(i, j + 1);
            tris_.push_back({a, b, c}); // lower triangle of the cell
            tris_.push_back({a, c, d}); // upper triangle
        }
    }
}

Triangle BackgroundMesh::triangle(int t) const {
    const auto& tv = tris_[static_cast<std::size_t>(t)];
    return {{vertex(tv[0]), vertex(tv[1]), vertex(tv[2])}};
}

std::vector<int> BackgroundMesh::triangles_near(Vec2 p) const {
    std::vector<int> out;
    const int ci = static_cast<int>(std::floor(p.x * nx_));
    const int cj = static_cast<int>(std::floor(p.y * nx_));
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            const int i = ci + di, j = cj + dj;
            if (i < 0 || j < 0 || i >= nx_ || j >= nx_) continue;
            const int base = 2 * (j * nx_ + i);
            out.push_back(base);
            out.push_back(base + 1);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> BackgroundMesh::triangles_containing(Vec2 p, double tol) const {
    std::vector<int> out;
    for (int t : triangles_near(p))
        if (point_in_triangle(triangle(t), p, tol)) out.push_back(t);
    return out;
}

} // namespace cutfrac
