#include "cutfrac/geometry.hpp"

#include <algorithm>
#include <cstdlib>

#include "cutfrac/errors.hpp"

namespace cutfrac {

double polygon_area(const Polygon& p) {
    double a = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(p[i], p[(i + 1) % n]);
    return 0.5 * a;
}

Vec2 polygon_centroid(const Polygon& p) {
    const std::size_t n = p.size();
    double a = 0.0;
    Vec2 c{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 q = p[i], r = p[(i + 1) % n];
        const double w = cross(q, r);
        a += w;
        c += (q + r) * w;
    }
    if (std::abs(a) < 1e-300) {
        // Degenerate loop: fall back to the vertex average.
        Vec2 m{0, 0};
        for (const Vec2& q : p) m += q;
        return m / static_cast<double>(n);
    }
    return c / (3.0 * a);
}

namespace {

// ∫ x^px y^py over the triangle (0, q, r) using barycentric expansion.
// Exact for total degree <= 3, which covers every caller in this project.
double tri_origin_moment(Vec2 q, Vec2 r, int px, int py) {
    const double jac = cross(q, r); // twice the signed area
    // x = s*qx + t*rx, y = s*qy + t*ry over the reference simplex {s,t>=0, s+t<=1}.
    // ∫ s^a t^b = a! b! / (a+b+2)!
    auto ref = [](int a, int b) {
        auto fact = [](int m) {
            double f = 1;
            for (int k = 2; k <= m; ++k) f *= k;
            return f;
        };
        return fact(a) * fact(b) / fact(a + b + 2);
    };
    auto choose = [](int n, int k) {
        double c = 1;
        for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
        return c;
    };
    double sum = 0.0;
    for (int i = 0; i <= px; ++i) {
        for (int j = 0; j <= py; ++j) {
            const double coef = choose(px, i) * choose(py, j) * std::pow(q.x, i) *
                                std::pow(r.x, px - i) * std::pow(q.y, j) *
                                std::pow(r.y, py - j);
            sum += coef * ref(i + j, px - i + py - j);
        }
    }
    return jac * sum;
}

} // namespace

double polygon_moment(const Polygon& p, int px, int py) {
    const std::size_t n = p.size();
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m += tri_origin_moment(p[i], p[(i + 1) % n], px, py);
    return m;
}

bool point_in_triangle(const Triangle& t, Vec2 p, double tol) {
    for (int e = 0; e < 3; ++e) {
        const Vec2 a = t.v[e], b = t.v[(e + 1) % 3];
        if (cross(b - a, p - a) < -tol * norm(b - a)) return false;
    }
    return true;
}

double distance_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    if (len2 == 0.0) return dist(p, a);
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return dist(p, a + t * d);
}

bool point_in_polygon(const Polygon& poly, Vec2 p, double tol) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        if (distance_point_segment(p, poly[i], poly[(i + 1) % n]) <= tol) return true;
    // Crossing-number test, robust away from the boundary (handled above).
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = poly[j], b = poly[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            const double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

std::optional<std::array<double, 2>> clip_segment_triangle_param(const Segment& seg,
                                                                 const Triangle& tri) {
    double t0 = 0.0, t1 = 1.0;
    for (int e = 0; e < 3; ++e) {
        const Vec2 a = tri.v[e], b = tri.v[(e + 1) % 3];
        const Vec2 n = rot90(b - a); // points into a CCW triangle
        const double sa = dot(seg.a - a, n);
        const double sb = dot(seg.b - a, n);
        const double ds = sb - sa;
        if (std::abs(ds) < 1e-300) {
            if (sa < 0.0) return std::nullopt; // parallel and outside
            continue;
        }
        const double tc = -sa / ds;
        if (ds > 0.0)
            t0 = std::max(t0, tc); // entering
        else
            t1 = std::min(t1, tc); // leaving
        if (t0 >= t1) return std::nullopt;
    }
    return std::array<double, 2>{t0, t1};
}

std::optional<Segment> clip_segment_triangle(const Segment& seg, const Triangle& tri,
                                             double min_len) {
    const auto t = clip_segment_triangle_param(seg, tri);
    if (!t) return std::nullopt;
    Segment out{seg.at((*t)[0]), seg.at((*t)[1])};
    if (out.length() < min_len) return std::nullopt;
    return out;
}

Polygon clip_polygon_triangle(const Polygon& poly, const Triangle& tri, double min_area) {
    Polygon cur = poly;
    for (int e = 0; e < 3 && !cur.empty(); ++e) {
        const Vec2 a = tri.v[e], b = tri.v[(e + 1) % 3];
        const Vec2 n = rot90(b - a);
        Polygon next;
        const std::size_t m = cur.size();
        for (std::size_t i = 0; i < m; ++i) {
            const Vec2 p = cur[i], q = cur[(i + 1) % m];
            const double sp = dot(p - a, n);
            const double sq = dot(q - a, n);
            if (sp >= 0.0) next.push_back(p);
            if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
                const double t = sp / (sp - sq);
                next.push_back(p + t * (q - p));
            }
        }
        cur = std::move(next);
    }
    // Drop consecutive duplicates left behind by touching edges.
    if (!cur.empty()) {
        Polygon dedup;
        for (const Vec2& p : cur)
            if (dedup.empty() || dist(dedup.back(), p) > 1e-14) dedup.push_back(p);
        while (dedup.size() > 1 && dist(dedup.front(), dedup.back()) <= 1e-14)
            dedup.pop_back();
        cur = std::move(dedup);
    }
    if (cur.size() < 3 || polygon_area(cur) < min_area) return {};
    return cur;
}

std::vector<Triangle> triangulate_polygon(const Polygon& poly) {
    std::vector<Triangle> out;
    if (poly.size() < 3) throw GeometryError("triangulate_polygon: fewer than 3 vertices");
    std::vector<Vec2> v = poly;
    if (polygon_area(v) < 0.0) std::reverse(v.begin(), v.end());
    const double scale = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            s = std::max(s, dist(v[i], v[(i + 1) % v.size()]));
        return s;
    }();
    const double eps = 1e-12 * scale * scale;

    while (v.size() > 3) {
        bool clipped = false;
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
            const double conv = cross(b - a, c - b);
            if (conv <= eps) continue; // reflex or collinear corner, not an ear
            const Triangle ear{{a, b, c}};
            bool contains_other = false;
            for (std::size_t j = 0; j < n && !contains_other; ++j) {
                if (j == i || j == (i + n - 1) % n || j == (i + 1) % n) continue;
                // Boundary contact blocks too: a reflex vertex on the ear edge
                // means the ear crosses a pinch.
                if (point_in_triangle(ear, v[j], 1e-12 * scale)) contains_other = true;
            }
            if (contains_other) continue;
            out.push_back(ear);
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
            clipped = true;
            break;
        }
        if (!clipped) {
            // Only collinear corners remain; drop one and continue.
            std::size_t drop = 0;
            double best = 1e300;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::size_t n2 = v.size();
                const Vec2 a = v[(i + n2 - 1) % n2], b = v[i], c = v[(i + 1) % n2];
                const double conv = std::abs(cross(b - a, c - b));
                if (conv < best) {
                    best = conv;
                    drop = i;
                }
            }
            if (best > eps) throw GeometryError("triangulate_polygon: no ear found");
            v.erase(v.begin() + static_cast<std::ptrdiff_t>(drop));
            if (v.size() < 3) break;
        }
    }
    if (v.size() == 3) {
        const Triangle last{{v[0], v[1], v[2]}};
        if (last.area() > eps) out.push_back(last);
    }
    return out;
}

} // namespace cutfrac
