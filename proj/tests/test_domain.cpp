#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "cutfrac/domain_io.hpp"
#include "cutfrac/driver.hpp"
#include "cutfrac/errors.hpp"

using namespace cutfrac;

namespace {

FracturedDomain load_preset(const std::string& name) {
    return load_domain_file(preset_path(name));
}

const char* single_bulk_json = R"({
  "bounding_box": [[0,0],[1,1]],
  "bulks": [{
    "name": "all",
    "polygon": [[0,0],[1,0],[1,1],[0,1]],
    "edges": ["outer","outer","outer","outer"],
    "beta": [0,0], "alpha": 2, "f": 0, "g": 0
  }],
  "cracks": [], "points": []
})";

// Per-component polynomial field with exact gradients, for identity tests.
AnalyticField component_polynomials() {
    AnalyticField f;
    f.value = [](ComponentId c, Vec2 p) {
        const double a = 1.0 + c.dim + 0.5 * c.index;
        const double b = 0.25 * (c.index + 1);
        return a * p.x + b * p.y * p.y + 0.125 * c.dim;
    };
    f.grad = [](ComponentId c, Vec2 p) {
        const double a = 1.0 + c.dim + 0.5 * c.index;
        const double b = 0.25 * (c.index + 1);
        return Vec2{a, 2.0 * b * p.y};
    };
    return f;
}

} // namespace

TEST_CASE("crack side normals: vertical crack") {
    const FracturedDomain dom = load_preset("example1");
    const Vec2 p{0.5, 0.37};
    const Vec2 nl = dom.crack_side_normal(0, Side::left, p);
    CHECK(nl.x == doctest::Approx(1.0));
    CHECK(nl.y == doctest::Approx(0.0));
    const Vec2 nr = dom.crack_side_normal(0, Side::right, p);
    CHECK(nr.x == doctest::Approx(-1.0));
    CHECK(nr.y == doctest::Approx(0.0));
    // endpoint query: outward tangent at the top end
    const Vec2 n1 = dom.cracks[0].end_normal(1);
    CHECK(n1.x == doctest::Approx(0.0));
    CHECK(n1.y == doctest::Approx(1.0));

    CHECK_THROWS_AS(dom.crack_side_normal(0, Side::left, Vec2{0.7, 0.5}), GeometryError);
}

TEST_CASE("crack with a missing neighbor reports an adjacency error") {
    const char* crack_on_boundary = R"({
      "bounding_box": [[0,0],[1,1]],
      "bulks": [{
        "name": "all",
        "polygon": [[0,0],[1,0],[1,1],[0,1]],
        "edges": [{"crack":"bottom"},"outer","outer","outer"],
        "beta": [0,1], "alpha": 0, "f": 0, "g": 1
      }],
      "cracks": [{
        "name": "bottom",
        "polyline": [[0,0],[1,0]],
        "speed": 1, "left": "all", "right": null,
        "start": "outer", "end": "outer"
      }],
      "points": []
    })";
    const FracturedDomain dom = load_domain_json(crack_on_boundary);
    CHECK_NOTHROW(dom.crack_side_normal(0, Side::left, Vec2{0.5, 0.0}));
    CHECK_THROWS_AS(dom.crack_side_normal(0, Side::right, Vec2{0.5, 0.0}), AdjacencyError);
}

TEST_CASE("normals are unit and antiparallel across every preset crack") {
    for (const std::string& name : preset_names()) {
        const FracturedDomain dom = load_preset(name);
        for (int ci = 0; ci < dom.component_count(1); ++ci) {
            const CrackComponent& c = dom.cracks[static_cast<std::size_t>(ci)];
            for (int s = 0; s < c.segment_count(); ++s) {
                const Vec2 nl = dom.crack_side_normal_seg(ci, s, Side::left);
                const Vec2 nr = dom.crack_side_normal_seg(ci, s, Side::right);
                CHECK(norm(nl) == doctest::Approx(1.0).epsilon(1e-14));
                CHECK(norm(nl + nr) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
                CHECK(std::abs(dot(nl, c.tangent(s))) < 1e-14);
            }
        }
    }
}

TEST_CASE("div_beta across dimensions") {
    const FracturedDomain ex1 = load_preset("example1");
    CHECK(ex1.div_beta({2, 0}, {0.25, 0.5}) == doctest::Approx(0.0));
    // crack: 0 - (nu_L.beta_L + nu_R.beta_R) = -(1 + 1)
    CHECK(ex1.div_beta({1, 0}, {0.5, 0.3}) == doctest::Approx(-2.0));

    // bifurcation with fluxes +1, -1, -1
    const FracturedDomain ex4 = load_preset("example4");
    CHECK(ex4.div_beta({0, 0}, ex4.points[0].x) == doctest::Approx(1.0));
}

TEST_CASE("gamma = alpha + Div beta") {
    const FracturedDomain ex1 = load_preset("example1");
    CHECK(ex1.gamma({2, 0}, {0.25, 0.5}) == doctest::Approx(0.0));
    CHECK(ex1.gamma({1, 0}, {0.5, 0.3}) == doctest::Approx(-2.0));

    // same geometry with alpha = 5 on the crack: 5 + (-2) = 3
    std::ifstream in(preset_path("example1"));
    nlohmann::json j = nlohmann::json::parse(in);
    j["cracks"][0]["alpha"] = 5.0;
    const FracturedDomain mod = load_domain_json(j.dump());
    CHECK(mod.gamma({1, 0}, {0.5, 0.3}) == doctest::Approx(3.0));
}

TEST_CASE("directional derivative D_beta") {
    const FracturedDomain ex1 = load_preset("example1");

    // constant function on a bulk
    const AnalyticField c1 = AnalyticField::global([](Vec2) { return 7.0; },
                                                   [](Vec2) { return Vec2{0, 0}; });
    CHECK(d_beta_analytic(ex1, c1, {2, 0}, {0.3, 0.4}) == doctest::Approx(0.0));

    // v = 1 on both bulks, v = 2y on the crack with beta_1 = (0,1):
    // D_beta v = 2 + (2y - 1) + (2y - 1) = 4y
    AnalyticField v;
    v.value = [](ComponentId c, Vec2 p) { return c.dim == 1 ? 2.0 * p.y : 1.0; };
    v.grad = [](ComponentId c, Vec2) { return c.dim == 1 ? Vec2{0, 2} : Vec2{0, 0}; };
    for (double y : {0.1, 0.5, 0.9})
        CHECK(d_beta_analytic(ex1, v, {1, 0}, {0.5, y}) == doctest::Approx(4.0 * y));

    // equal traces at a bifurcation point: jump terms vanish
    const FracturedDomain ex4 = load_preset("example4");
    const AnalyticField c2 = AnalyticField::global([](Vec2) { return 3.0; },
                                                   [](Vec2) { return Vec2{0, 0}; });
    CHECK(d_beta_analytic(ex4, c2, {0, 0}, ex4.points[0].x) ==
          doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("codim jump and interface jump") {
    CHECK(codim_jump({{1.0, 2.5}, {1.0, 3.5}}) == doctest::Approx(6.0));
    CHECK(codim_jump({}) == doctest::Approx(0.0)); // top dimension: empty sum
    CHECK(codim_jump({{-1.0, 4.0}}) == doctest::Approx(4.0));

    CHECK(interface_jump(1, 3.0, 3.0) == doctest::Approx(0.0));
    CHECK(interface_jump(2, 1.0, 0.5) == doctest::Approx(0.5));
    CHECK(interface_jump(0, 42.0, -1.0) == doctest::Approx(0.0));
}

TEST_CASE("jump product identity") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<TraceSample> traces;
        const int n = 1 + trial % 4;
        for (int k = 0; k < n; ++k) traces.push_back({d(rng), d(rng)});
        const double w = d(rng);
        std::vector<TraceSample> scaled = traces;
        for (TraceSample& t : scaled) t.value *= w;
        CHECK(codim_jump(scaled) == doctest::Approx(codim_jump(traces) * w).epsilon(1e-12));
    }
}

TEST_CASE("divergence product rule Div(beta v) = D_beta v + (Div beta) v") {
    for (const std::string name : {"example1", "example4", "example5"}) {
        const FracturedDomain dom = load_preset(name);
        const AnalyticField v = component_polynomials();
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> d(0.05, 0.95);
        for (int bi = 0; bi < dom.component_count(2); ++bi) {
            const Vec2 p{d(rng), d(rng)}; // product rule is pointwise, any p works
            const ComponentId cid{2, bi};
            CHECK(div_beta_v_analytic(dom, v, cid, p) ==
                  doctest::Approx(d_beta_analytic(dom, v, cid, p) +
                                  dom.div_beta(cid, p) * v.value(cid, p))
                      .epsilon(1e-13));
        }
        for (int ci = 0; ci < dom.component_count(1); ++ci) {
            const ComponentId cid{1, ci};
            const CrackComponent& c = dom.cracks[static_cast<std::size_t>(ci)];
            const Vec2 p = c.segment(0).at(0.37);
            CHECK(div_beta_v_analytic(dom, v, cid, p) ==
                  doctest::Approx(d_beta_analytic(dom, v, cid, p) +
                                  dom.div_beta(cid, p) * v.value(cid, p))
                      .epsilon(1e-13));
        }
        for (int pi = 0; pi < dom.component_count(0); ++pi) {
            const ComponentId cid{0, pi};
            const Vec2 p = dom.points[static_cast<std::size_t>(pi)].x;
            CHECK(div_beta_v_analytic(dom, v, cid, p) ==
                  doctest::Approx(d_beta_analytic(dom, v, cid, p) +
                                  dom.div_beta(cid, p) * v.value(cid, p))
                      .epsilon(1e-13));
        }
    }
}

TEST_CASE("partial integration identity") {
    const FracturedDomain ex1 = load_preset("example1");

    const AnalyticField zero = AnalyticField::zero();
    CHECK(verify_partial_integration(ex1, zero, zero, 3) == doctest::Approx(0.0));

    const AnalyticField one = AnalyticField::global([](Vec2) { return 1.0; },
                                                    [](Vec2) { return Vec2{0, 0}; });
    CHECK(verify_partial_integration(ex1, one, one, 3) < 1e-12);

    const AnalyticField v = AnalyticField::global([](Vec2 p) { return p.x + p.y; },
                                                  [](Vec2) { return Vec2{1, 1}; });
    const AnalyticField w = AnalyticField::global([](Vec2 p) { return p.x * p.y; },
                                                  [](Vec2 p) { return Vec2{p.y, p.x}; });
    CHECK(verify_partial_integration(ex1, v, w, 4) <= 1e-10);
    CHECK(verify_partial_integration(ex1, v, w, 5) <= 1e-10);
}

TEST_CASE("partial integration with discontinuous per-component data") {
    for (const std::string name : {"example1", "example2", "example4", "example5"}) {
        const FracturedDomain dom = load_preset(name);
        const AnalyticField v = component_polynomials();
        AnalyticField w;
        w.value = [](ComponentId c, Vec2 p) {
            return (c.dim + 1.0) * p.x * p.y - 0.5 * c.index * p.x;
        };
        w.grad = [](ComponentId c, Vec2 p) {
            return Vec2{(c.dim + 1.0) * p.y - 0.5 * c.index, (c.dim + 1.0) * p.x};
        };
        CHECK(verify_partial_integration(dom, v, w, 5) <= 1e-10);
    }
}

TEST_CASE("coercivity indicator") {
    const FracturedDomain with_alpha = load_domain_json(single_bulk_json);
    CHECK(coercivity_indicator(with_alpha, 20) == doctest::Approx(4.0));

    const FracturedDomain ex1 = load_preset("example1");
    CHECK(coercivity_indicator(ex1, 20) == doctest::Approx(-2.0));

    nlohmann::json j = nlohmann::json::parse(single_bulk_json);
    j["bulks"][0]["alpha"] = 0.0;
    const FracturedDomain plain = load_domain_json(j.dump());
    CHECK(coercivity_indicator(plain, 20) == doctest::Approx(0.0));
}

TEST_CASE("preset domains satisfy all structural invariants") {
    for (const std::string& name : preset_names()) {
        const FracturedDomain dom = load_preset(name);
        CHECK_NOTHROW(dom.validate());
        // stratification: every crack endpoint resolves to the boundary or a point
        for (const CrackComponent& c : dom.cracks) {
            for (int which = 0; which < 2; ++which) {
                const CrackEnd& e = which == 0 ? c.start : c.end;
                if (e.outer)
                    CHECK(dom.on_outer_boundary(c.endpoint(which), dom.eps_geom()));
                else
                    CHECK(dist(dom.points[static_cast<std::size_t>(e.point)].x,
                               c.endpoint(which)) <= dom.eps_geom());
            }
        }
    }
}

TEST_CASE("loader rejects broken domains") {
    // a bifurcation with a single incident crack
    const char* lonely_point = R"({
      "bounding_box": [[0,0],[1,1]],
      "bulks": [{
        "name": "all", "polygon": [[0,0],[1,0],[1,1],[0,1]],
        "edges": ["outer","outer","outer","outer"], "beta": [0,0]
      }],
      "cracks": [{
        "name": "stub", "polyline": [[0,0.5],[0.5,0.5]],
        "speed": 1, "left": null, "right": null,
        "start": "outer", "end": {"point": "p"}
      }],
      "points": [{"name": "p", "x": [0.5,0.5]}]
    })";
    CHECK_THROWS_AS(load_domain_json(lonely_point), Error);

    // interface tag that does not coincide with the crack
    const char* misplaced = R"({
      "bounding_box": [[0,0],[1,1]],
      "bulks": [{
        "name": "all", "polygon": [[0,0],[1,0],[1,1],[0,1]],
        "edges": [{"crack":"c"},"outer","outer","outer"], "beta": [0,0]
      }],
      "cracks": [{
        "name": "c", "polyline": [[0,0.5],[1,0.5]],
        "speed": 1, "left": "all", "right": "all",
        "start": "outer", "end": "outer"
      }],
      "points": []
    })";
    CHECK_THROWS_AS(load_domain_json(misplaced), GeometryError);

    // unknown keys are rejected
    CHECK_THROWS_AS(load_domain_json(R"({"bounding_box":[[0,0],[1,1]],"typo":1})"),
                    ParamError);
}
