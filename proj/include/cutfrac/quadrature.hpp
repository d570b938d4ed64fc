#ifndef CUTFRAC_QUADRATURE_HPP
#define CUTFRAC_QUADRATURE_HPP

#include <vector>

#include "cutfrac/geometry.hpp"

namespace cutfrac {

struct QuadRule {
    std::vector<Vec2> points;
    std::vector<double> weights; // physical weights; sum equals the entity measure
    std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre rule with npts in {1,...,5} mapped onto the segment.
QuadRule segment_rule(const Segment& s, int npts);

/// Symmetric triangle rule exact to the requested polynomial degree (supports 1, 2, 5).
/// Degrees in between are promoted to the next available rule.
QuadRule triangle_rule(const Triangle& t, int degree);

/// Fan triangulation from the centroid, then per-triangle rules. Polygon must be convex.
QuadRule polygon_rule(const Polygon& p, int degree);

/// Composite rule over an ear-clipped simple polygon (used for exact-geometry integrals).
QuadRule simple_polygon_rule(const Polygon& p, int degree);

} // namespace cutfrac

#endif
