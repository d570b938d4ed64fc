#ifndef CUTFRAC_GEOMETRY_HPP
#define CUTFRAC_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace cutfrac {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Counterclockwise rotation by 90 degrees.
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

inline Vec2 normalized(Vec2 a) { return a / norm(a); }

struct Segment {
    Vec2 a, b;
    double length() const { return dist(a, b); }
    Vec2 at(double t) const { return a + t * (b - a); }
    Vec2 tangent() const { return normalized(b - a); }
};

struct Triangle {
    std::array<Vec2, 3> v;
    double area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }
    Vec2 centroid() const { return (v[0] + v[1] + v[2]) / 3.0; }
};

/// Vertex loop, implicitly closed. Positively oriented for area > 0.
using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& p);
Vec2 polygon_centroid(const Polygon& p);

/// Exact integral of x^px * y^py over the polygon via Green's theorem.
/// Supports px+py <= 3; used as an independent quadrature oracle.
double polygon_moment(const Polygon& p, int px, int py);

/// Signed distance sign test against all three edges of a CCW triangle.
bool point_in_triangle(const Triangle& t, Vec2 p, double tol);

/// Works for simple (possibly non-convex) polygons; boundary counts as inside within tol.
bool point_in_polygon(const Polygon& poly, Vec2 p, double tol);

double distance_point_segment(Vec2 p, Vec2 a, Vec2 b);

/// seg ∩ tri as a parameter interval [t0, t1] of seg, or empty.
std::optional<std::array<double, 2>> clip_segment_triangle_param(const Segment& seg,
                                                                 const Triangle& tri);

/// seg ∩ tri by parametric clipping against the three half-planes.
/// Results shorter than min_len are reported as empty.
std::optional<Segment> clip_segment_triangle(const Segment& seg, const Triangle& tri,
                                             double min_len);

/// Sutherland-Hodgman clip of a convex polygon against a CCW triangle.
/// Results with area below min_area come back empty.
Polygon clip_polygon_triangle(const Polygon& poly, const Triangle& tri, double min_area);

/// Ear-clipping triangulation of a simple CCW polygon. Collinear vertices allowed.
std::vector<Triangle> triangulate_polygon(const Polygon& poly);

} // namespace cutfrac

#endif
