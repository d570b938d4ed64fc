#include "cutfrac/quadrature.hpp"

#include <cmath>

#include "cutfrac/errors.hpp"

namespace cutfrac {

namespace {

struct Rule1D {
    std::vector<double> x; // on [-1, 1]
    std::vector<double> w; // sum = 2
};

Rule1D gauss_legendre(int n) {
    switch (n) {
    case 1:
        return {{0.0}, {2.0}};
    case 2: {
        const double a = 1.0 / std::sqrt(3.0);
        return {{-a, a}, {1.0, 1.0}};
    }
    case 3: {
        const double a = std::sqrt(3.0 / 5.0);
        return {{-a, 0.0, a}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    case 4: {
        const double b = 2.0 / 7.0 * std::sqrt(6.0 / 5.0);
        const double x1 = std::sqrt(3.0 / 7.0 - b), x2 = std::sqrt(3.0 / 7.0 + b);
        const double w1 = (18.0 + std::sqrt(30.0)) / 36.0;
        const double w2 = (18.0 - std::sqrt(30.0)) / 36.0;
        return {{-x2, -x1, x1, x2}, {w2, w1, w1, w2}};
    }
    case 5: {
        const double c = 2.0 * std::sqrt(10.0 / 7.0);
        const double x1 = std::sqrt(5.0 - c) / 3.0, x2 = std::sqrt(5.0 + c) / 3.0;
        const double w0 = 128.0 / 225.0;
        const double w1 = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double w2 = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        return {{-x2, -x1, 0.0, x1, x2}, {w2, w1, w0, w1, w2}};
    }
    default:
        throw ParamError("segment_rule: point count must be in 1..5");
    }
}

struct BaryRule {
    // barycentric points (l1, l2, l3) with weights summing to 1
    std::vector<std::array<double, 3>> p;
    std::vector<double> w;
};

BaryRule triangle_reference_rule(int degree) {
    BaryRule r;
    if (degree <= 1) {
        r.p = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
        r.w = {1.0};
    } else if (degree <= 2) {
        const double a = 2.0 / 3.0, b = 1.0 / 6.0;
        r.p = {{a, b, b}, {b, a, b}, {b, b, a}};
        r.w = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    } else if (degree <= 5) {
        // Classic 7-point degree-5 rule.
        const double s15 = std::sqrt(15.0);
        const double a1 = (6.0 - s15) / 21.0, b1 = (9.0 + 2.0 * s15) / 21.0;
        const double a2 = (6.0 + s15) / 21.0, b2 = (9.0 - 2.0 * s15) / 21.0;
        const double w1 = (155.0 - s15) / 1200.0;
        const double w2 = (155.0 + s15) / 1200.0;
        r.p = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
               {b1, a1, a1},
               {a1, b1, a1},
               {a1, a1, b1},
               {b2, a2, a2},
               {a2, b2, a2},
               {a2, a2, b2}};
        r.w = {9.0 / 40.0, w1, w1, w1, w2, w2, w2};
    } else {
        throw ParamError("triangle_rule: degree must be <= 5");
    }
    return r;
}

} // namespace

QuadRule segment_rule(const Segment& s, int npts) {
    const Rule1D r = gauss_legendre(npts);
    QuadRule out;
    const double half = 0.5 * s.length();
    for (std::size_t i = 0; i < r.x.size(); ++i) {
        out.points.push_back(s.at(0.5 * (r.x[i] + 1.0)));
        out.weights.push_back(r.w[i] * half);
    }
    return out;
}

QuadRule triangle_rule(const Triangle& t, int degree) {
    const BaryRule r = triangle_reference_rule(degree);
    QuadRule out;
    const double area = t.area();
    for (std::size_t i = 0; i < r.p.size(); ++i) {
        const auto& l = r.p[i];
        out.points.push_back(t.v[0] * l[0] + t.v[1] * l[1] + t.v[2] * l[2]);
        out.weights.push_back(r.w[i] * area);
    }
    return out;
}

QuadRule polygon_rule(const Polygon& p, int degree) {
    QuadRule out;
    if (p.size() < 3) return out;
    if (p.size() == 3) return triangle_rule(Triangle{{p[0], p[1], p[2]}}, degree);
    const Vec2 c = polygon_centroid(p);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Triangle t{{c, p[i], p[(i + 1) % p.size()]}};
        if (t.area() <= 0.0) continue;
        const QuadRule q = triangle_rule(t, degree);
        out.points.insert(out.points.end(), q.points.begin(), q.points.end());
        out.weights.insert(out.weights.end(), q.weights.begin(), q.weights.end());
    }
    return out;
}

QuadRule simple_polygon_rule(const Polygon& p, int degree) {
    QuadRule out;
    for (const Triangle& t : triangulate_polygon(p)) {
        const QuadRule q = triangle_rule(t, degree);
        out.points.insert(out.points.end(), q.points.begin(), q.points.end());
        out.weights.insert(out.weights.end(), q.weights.begin(), q.weights.end());
    }
    return out;
}

} // namespace cutfrac
