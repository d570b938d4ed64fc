#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "cutfrac/domain_io.hpp"
#include "cutfrac/driver.hpp"
#include "cutfrac/errors.hpp"
#include "cutfrac/post.hpp"

using namespace cutfrac;

namespace {

FracturedDomain load_preset(const std::string& name) {
    return load_domain_file(preset_path(name));
}

const char* reaction_only_json = R"({
  "bounding_box": [[0,0],[1,1]],
  "bulks": [{
    "name": "all", "polygon": [[0,0],[1,0],[1,1],[0,1]],
    "edges": ["outer","outer","outer","outer"],
    "beta": [0,0], "alpha": 1, "f": 0, "g": 0
  }],
  "cracks": [], "points": []
})";

double bilinear(const AssembledSystem& sys, const std::vector<double>& v,
                const std::vector<double>& w) {
    const std::vector<double> Av = sys.A.matvec(w);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * Av[i];
    return s;
}

} // namespace

TEST_CASE("P1 basis values and gradients") {
    const Triangle t{{Vec2{0, 0}, Vec2{1, 0}, Vec2{0, 1}}};
    const P1Basis at_vertex = eval_basis(t, {0, 0});
    CHECK(at_vertex.val[0] == doctest::Approx(1.0));
    CHECK(at_vertex.val[1] == doctest::Approx(0.0));
    CHECK(at_vertex.val[2] == doctest::Approx(0.0));

    const P1Basis at_centroid = eval_basis(t, t.centroid());
    for (int k = 0; k < 3; ++k) CHECK(at_centroid.val[k] == doctest::Approx(1.0 / 3.0));

    CHECK(at_vertex.grad[0].x == doctest::Approx(-1.0));
    CHECK(at_vertex.grad[0].y == doctest::Approx(-1.0));

    double vsum = 0.0;
    Vec2 gsum{0, 0};
    const P1Basis b = eval_basis(t, {0.2, 0.3});
    for (int k = 0; k < 3; ++k) {
        vsum += b.val[k];
        gsum += b.grad[k];
    }
    CHECK(vsum == doctest::Approx(1.0));
    CHECK(norm(gsum) < 1e-14);

    CHECK_THROWS_AS(eval_basis(t, {2.0, 2.0}), GeometryError);
}

TEST_CASE("dof map: direct sum with duplicated shared vertices") {
    const FracturedDomain dom = load_preset("example1");
    const Discretization d = Discretization::build(dom, 10);

    std::size_t total = 0;
    for (const ComponentId cid : dom.all_components()) {
        const auto& cd = d.dofs.comp_dofs(cid);
        std::vector<int> expect;
        for (int t : d.active(cid).tris) {
            const auto& tv = d.bg.triangle_vertices(t);
            expect.insert(expect.end(), tv.begin(), tv.end());
        }
        std::sort(expect.begin(), expect.end());
        expect.erase(std::unique(expect.begin(), expect.end()), expect.end());
        CHECK(cd.vertices == expect);
        total += d.dofs.dof_count(cid);
        // vertices ascending
        for (std::size_t k = 1; k < cd.vertices.size(); ++k)
            CHECK(cd.vertices[k - 1] < cd.vertices[k]);
    }
    CHECK(d.dofs.total() == total);

    // every dof belongs to exactly one component
    for (std::size_t dof = 0; dof < d.dofs.total(); ++dof) {
        const ComponentId c = d.dofs.owner(dof);
        const auto& cd = d.dofs.comp_dofs(c);
        CHECK(dof >= cd.offset);
        CHECK(dof < cd.offset + d.dofs.dof_count(c));
    }
}

TEST_CASE("dof map: single bulk equals background vertex count, points get one dof") {
    const char* whole = R"({
      "bounding_box": [[0,0],[1,1]],
      "bulks": [{"name":"all","polygon":[[0,0],[1,0],[1,1],[0,1]],
                 "edges":["outer","outer","outer","outer"],"beta":[1,0],"g":1}],
      "cracks": [], "points": []
    })";
    const FracturedDomain dom = load_domain_json(whole);
    const Discretization d = Discretization::build(dom, 6);
    CHECK(d.dofs.total() == 49);

    const FracturedDomain ex4 = load_preset("example4");
    const Discretization d4 = Discretization::build(ex4, 10);
    CHECK(d4.dofs.dof_count({0, 0}) == 1);
}

TEST_CASE("strong residual of analytic and interpolated fields") {
    const FracturedDomain ex1 = load_preset("example1");
    const Discretization d = Discretization::build(ex1, 10);

    // affine bulk field under constant transport: L v = b
    const AnalyticField affine = AnalyticField::global(
        [](Vec2 p) { return 0.5 + 2.0 * p.x - 1.0 * p.y; }, [](Vec2) { return Vec2{2, -1}; });
    CHECK(residual_L(ex1, affine, {2, 0}, {0.3, 0.6}) == doctest::Approx(2.0));

    // the exact solution of the inflow-crack setup satisfies L = 0 on the crack
    AnalyticField exact;
    exact.value = [](ComponentId c, Vec2 p) { return c.dim == 1 ? 2.0 * p.y : 1.0; };
    exact.grad = [](ComponentId c, Vec2) { return c.dim == 1 ? Vec2{0, 2} : Vec2{0, 0}; };
    for (double y : {0.15, 0.5, 0.85})
        CHECK(residual_L(ex1, exact, {1, 0}, {0.5, y}) ==
              doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    // same through the discrete path: nodal interpolant of the exact solution
    const SolutionField uh = interpolate(d, exact);
    for (double y : {0.15, 0.5, 0.85})
        CHECK(residual_L(uh, {1, 0}, {0.5, y}) == doctest::Approx(0.0).scale(1.0));
    CHECK(residual_L(uh, {2, 1}, {0.8, 0.3}) == doctest::Approx(0.0).scale(1.0));

    // zero field
    const SolutionField z(d, std::vector<double>(d.dofs.total(), 0.0));
    CHECK(residual_L(z, {1, 0}, {0.5, 0.5}) == doctest::Approx(0.0));
}

TEST_CASE("pure reaction: a_h(1,1) equals the area") {
    const FracturedDomain dom = load_domain_json(reaction_only_json);
    const Discretization d = Discretization::build(dom, 5);
    const std::vector<double> ones(d.dofs.total(), 1.0);

    AssemblyParams p;
    p.tau1 = 0.0; // isolate (alpha v, w); the GLS product would add tau1*h*|O|
    p.tau2 = 0.0;
    const AssembledSystem sys = assemble(d, p);
    CHECK(bilinear(sys, ones, ones) == doctest::Approx(1.0).epsilon(1e-13));

    AssemblyParams p2;
    p2.tau1 = 1e-2;
    p2.tau2 = 1e-3;
    const AssembledSystem sys2 = assemble(d, p2);
    CHECK(bilinear(sys2, ones, ones) ==
          doctest::Approx(1.0 + p2.tau1 * d.h()).epsilon(1e-13));
}

TEST_CASE("consistent mode reproduces the representable exact solution exactly") {
    // inflow-crack preset at tau2 = 0: u = 1 in the bulks, u = 2y on the crack
    FracturedDomain dom = load_preset("example1");
    AssemblyParams p;
    p.tau2 = 0.0;
    SolveCase c = solve_case(std::move(dom), 10, p);
    const std::optional<AnalyticField> exact = exact_solution(c.disc->domain());
    REQUIRE(exact.has_value());
    for (const ComponentId cid : c.disc->domain().all_components())
        CHECK(linf_error(*c.u, *exact, cid) <= 1e-9);
    CHECK(!c.sys.pinned.empty()); // off-crack vertices carry no energy at tau2 = 0
}

TEST_CASE("crack-system preset is exact in consistent mode, including bifurcations") {
    FracturedDomain dom = load_preset("example5");
    AssemblyParams p;
    p.tau2 = 0.0;
    SolveCase c = solve_case(std::move(dom), 10, p);
    const std::optional<AnalyticField> exact = exact_solution(c.disc->domain());
    REQUIRE(exact.has_value());
    for (const ComponentId cid : c.disc->domain().all_components())
        CHECK(linf_error(*c.u, *exact, cid) <= 1e-8);
    CHECK(c.u->point_value(0) == doctest::Approx(8.2).epsilon(1e-10));
    CHECK(c.u->point_value(1) == doctest::Approx(3.9).epsilon(1e-10));
}

TEST_CASE("stabilization perturbs the solution linearly in tau2") {
    auto errors = [](double tau2) {
        FracturedDomain dom = load_domain_file(preset_path("example1"));
        AssemblyParams p;
        p.tau2 = tau2;
        SolveCase c = solve_case(std::move(dom), 10, p);
        const std::optional<AnalyticField> exact = exact_solution(c.disc->domain());
        const ErrorReport rep = energy_error(*c.u, *exact, p);
        double linf = 0.0;
        for (const ComponentId cid : c.disc->domain().all_components())
            linf = std::max(linf, linf_error(*c.u, *exact, cid));
        return std::pair<double, double>{rep.l2(), linf};
    };
    const auto [l2_full, linf_full] = errors(1e-3);
    const auto [l2_half, linf_half] = errors(5e-4);
    CHECK(l2_full < 1e-2);
    CHECK(l2_full / l2_half >= 1.8);
    CHECK(l2_full / l2_half <= 2.2);
    CHECK(linf_full / linf_half >= 1.8);
    CHECK(linf_full / linf_half <= 2.2);
}

TEST_CASE("random chord cracks: measures and representable solutions are exact") {
    // Unit square split by a chord from (0,a) to (1,b); both bulks feed the
    // crack, so u = 1 in the bulks and u = 1 + c s on the crack with
    // c = 2 / sqrt(1 + (b-a)^2). Exercises genuinely cut geometry.
    std::mt19937 rng(20240812);
    std::uniform_real_distribution<double> pos(0.15, 0.85);
    for (int trial = 0; trial < 10; ++trial) {
        const double a = pos(rng), b = pos(rng);
        nlohmann::json j;
        j["bounding_box"] = {{0, 0}, {1, 1}};
        j["bulks"] = nlohmann::json::array();
        j["bulks"].push_back({{"name", "lower"},
                              {"polygon", {{0, 0}, {1, 0}, {1, b}, {0, a}}},
                              {"edges", {"outer", "outer", nlohmann::json{{"crack", "chord"}}, "outer"}},
                              {"beta", {0, 1}},
                              {"g", 1},
                              {"exact", {{"const", 1}}}});
        j["bulks"].push_back({{"name", "upper"},
                              {"polygon", {{0, a}, {1, b}, {1, 1}, {0, 1}}},
                              {"edges", {nlohmann::json{{"crack", "chord"}}, "outer", "outer", "outer"}},
                              {"beta", {0, -1}},
                              {"g", 1},
                              {"exact", {{"const", 1}}}});
        const double slope = b - a;
        const double c = 2.0 / std::sqrt(1.0 + slope * slope);
        // u = 1 + c * arclength = affine in (x, y) along the chord direction
        const double den = 1.0 + slope * slope;
        j["cracks"] = nlohmann::json::array();
        j["cracks"].push_back(
            {{"name", "chord"},
             {"polyline", {{0, a}, {1, b}}},
             {"speed", 1},
             {"g", 1},
             {"left", "upper"},
             {"right", "lower"},
             {"start", "outer"},
             {"end", "outer"},
             {"exact",
              {{"affine",
                {{"c", 1.0 - c * (a * slope) / std::sqrt(den)},
                 {"x", c / std::sqrt(den)},
                 {"y", c * slope / std::sqrt(den)}}}}}});
        j["points"] = nlohmann::json::array();

        FracturedDomain dom = load_domain_json(j.dump());
        const int nx = 6 + trial % 7;
        const BackgroundMesh bg(nx);
        const ActiveMesh crack_mesh = extract_active_mesh(dom, {1, 0}, bg);
        CHECK(crack_mesh.measure() ==
              doctest::Approx(std::sqrt(den)).epsilon(1e-12));

        AssemblyParams p;
        p.tau2 = 0.0;
        SolveCase sc = solve_case(std::move(dom), nx, p);
        const auto exact = exact_solution(sc.disc->domain());
        REQUIRE(exact.has_value());
        for (const ComponentId cid : sc.disc->domain().all_components())
            CHECK(linf_error(*sc.u, *exact, cid) <= 1e-8);
    }
}

TEST_CASE("every shipped preset assembles into a solvable system") {
    for (const std::string& name : preset_names()) {
        SolveCase c = solve_case(load_domain_file(preset_path(name)), 10, {});
        CHECK(c.solve_residual <= 1e-10 * (1.0 + max_abs(c.sys.b)));
        CHECK(c.sys.A.dim() == c.disc->dofs.total());
    }
}

TEST_CASE("matrix pattern is symmetric and couples only related components") {
    for (const std::string name : {"example2", "example4"}) {
        FracturedDomain dom = load_preset(name);
        const Discretization d = Discretization::build(dom, 8);
        const AssembledSystem sys = assemble(d, {});

        // pattern symmetry
        for (std::size_t r = 0; r < sys.A.dim(); ++r)
            for (std::size_t c : sys.A.row_cols(r))
                CHECK(!sys.A.row_cols(c).empty());
        std::size_t asym = 0;
        for (std::size_t r = 0; r < sys.A.dim(); ++r) {
            for (std::size_t c : sys.A.row_cols(r)) {
                const auto cols = sys.A.row_cols(c);
                if (!std::binary_search(cols.begin(), cols.end(), r)) ++asym;
            }
        }
        CHECK(asym == 0);

        // couplings: same component, adjacent with dimension gap one, or two
        // components joined through a shared crack/point quadrature (GLS).
        auto related = [&](ComponentId a, ComponentId b) {
            if (a.dim == b.dim && a.index == b.index) return true;
            if (a.dim < b.dim) std::swap(a, b);
            const FracturedDomain& dd = d.domain();
            if (a.dim == 2 && b.dim == 1) {
                const CrackComponent& c = dd.cracks[static_cast<std::size_t>(b.index)];
                return c.left_bulk == a.index || c.right_bulk == a.index;
            }
            if (a.dim == 1 && b.dim == 0) {
                for (const IncidentCrack& ic :
                     dd.points[static_cast<std::size_t>(b.index)].cracks)
                    if (ic.crack == a.index) return true;
                return false;
            }
            if (a.dim == 2 && b.dim == 2) {
                for (const CrackComponent& c : dd.cracks) {
                    const bool has_a = c.left_bulk == a.index || c.right_bulk == a.index;
                    const bool has_b = c.left_bulk == b.index || c.right_bulk == b.index;
                    if (has_a && has_b) return true;
                }
                return false;
            }
            if (a.dim == 1 && b.dim == 1) {
                for (const PointComponent& pt : dd.points) {
                    bool has_a = false, has_b = false;
                    for (const IncidentCrack& ic : pt.cracks) {
                        has_a = has_a || ic.crack == a.index;
                        has_b = has_b || ic.crack == b.index;
                    }
                    if (has_a && has_b) return true;
                }
                return false;
            }
            return false; // bulk-point coupling never appears
        };
        for (std::size_t r = 0; r < sys.A.dim(); ++r)
            for (std::size_t c : sys.A.row_cols(r))
                CHECK(related(d.dofs.owner(r), d.dofs.owner(c)));
    }
}

TEST_CASE("discrete coercivity identity holds to rounding") {
    FracturedDomain dom = load_preset("example2");
    const AssemblyParams p;
    SolveCase c = solve_case(std::move(dom), 10, p);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(c.disc->dofs.total());
        for (double& x : v) x = dist(rng);
        const SolutionField vf(*c.disc, std::move(v));
        const CoercivityIdentity id = coercivity_identity(c.sys, vf, p);
        CHECK(id.residual() <= 1e-10 * id.scale);
    }
}

TEST_CASE("one-sided evaluation differs across a discontinuous solve") {
    // force a discontinuity by driving the right bulk with boundary value 2
    std::ifstream in(preset_path("example1"));
    nlohmann::json j = nlohmann::json::parse(in);
    j["bulks"][1]["g"] = 2.0;
    j["bulks"][1].erase("exact");
    FracturedDomain dom = load_domain_json(j.dump());
    SolveCase c = solve_case(std::move(dom), 10, {});
    const Vec2 p{0.5, 0.45};
    const double off = side_offset(c.disc->bg);
    const double from_left = c.u->eval({2, 0}, p, SideHint{{1, 0}, off});
    const double from_right = c.u->eval({2, 1}, p, SideHint{{-1, 0}, off});
    CHECK(from_left == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(from_right == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("nodal interpolants reproduce affine data exactly") {
    FracturedDomain dom = load_preset("example4");
    const Discretization d = Discretization::build(dom, 9);
    const AnalyticField affine = AnalyticField::global(
        [](Vec2 p) { return 1.0 + 2.0 * p.x + 3.0 * p.y; }, [](Vec2) { return Vec2{2, 3}; });
    const SolutionField u = interpolate(d, affine);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    for (int k = 0; k < 50; ++k) {
        const Vec2 p{dist(rng), dist(rng)};
        for (int bi = 0; bi < d.domain().component_count(2); ++bi) {
            const ComponentId cid{2, bi};
            if (!point_in_polygon(d.domain().bulks[static_cast<std::size_t>(bi)].polygon, p,
                                  1e-12))
                continue;
            CHECK(u.eval(cid, p) ==
                  doctest::Approx(1.0 + 2.0 * p.x + 3.0 * p.y).epsilon(1e-12));
        }
    }
    // d = 0 evaluation returns the stored coefficient
    CHECK(u.point_value(0) == doctest::Approx(1.0 + 2.0 * 0.5 + 3.0 * 0.5));
}

TEST_CASE("non-finite coefficient fields abort assembly with a located error") {
    FracturedDomain dom = load_preset("example1");
    dom.bulks[0].f = ScalarField::custom(
        [](Vec2) { return std::numeric_limits<double>::quiet_NaN(); },
        [](Vec2) { return Vec2{0, 0}; });
    const Discretization d = Discretization::build(dom, 5);
    CHECK_THROWS_AS(assemble(d, {}), AssemblyError);
    try {
        assemble(d, {});
    } catch (const AssemblyError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("triangle") != std::string::npos);
        CHECK(msg.find("bulk load") != std::string::npos);
    }
}
