#include "cutfrac/driver.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cutfrac/domain_io.hpp"
#include "cutfrac/errors.hpp"

#ifndef CUTFRAC_PRESET_DIR
#define CUTFRAC_PRESET_DIR "presets"
#endif

namespace cutfrac {

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "example1", "example2", "example3", "example3_beta01", "example3_beta02",
        "example4", "example4_diff", "example5"};
    return names;
}

bool is_preset(const std::string& name) {
    for (const std::string& n : preset_names())
        if (n == name) return true;
    return false;
}

std::string preset_path(const std::string& name) {
    const char* env = std::getenv("CUTFRAC_PRESET_DIR");
    const std::string dir = env ? env : CUTFRAC_PRESET_DIR;
    return dir + "/" + name + ".json";
}

FracturedDomain load_domain_source(const std::string& source) {
    if (is_preset(source)) return load_domain_file(preset_path(source));
    if (std::filesystem::exists(source)) return load_domain_file(source);
    throw ParamError("unknown preset or missing domain file: '" + source +
                     "' (presets: example1..example5 plus variants)");
}

void RunConfig::validate() const {
    if (domain_source.empty()) throw ParamError("config: no domain source given");
    if (!(tau1 > 0.0)) throw ParamError("config: tau1 must be > 0");
    if (tau2 < 0.0) throw ParamError("config: tau2 must be >= 0");
    if (nx.empty()) throw ParamError("config: at least one nx level required");
    for (int n : nx)
        if (n < 2) throw ParamError("config: nx must be >= 2");
}

RunConfig parse_config_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParamError(std::string("config JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ParamError("config: expected a JSON object");
    RunConfig cfg;
    for (const auto& item : j.items()) {
        const std::string& k = item.key();
        const nlohmann::json& v = item.value();
        if (k == "domain")
            cfg.domain_source = v.get<std::string>();
        else if (k == "nx") {
            cfg.nx.clear();
            if (v.is_array())
                for (const auto& n : v) cfg.nx.push_back(n.get<int>());
            else
                cfg.nx.push_back(v.get<int>());
        } else if (k == "tau1")
            cfg.tau1 = v.get<double>();
        else if (k == "tau2")
            cfg.tau2 = v.get<double>();
        else if (k == "out")
            cfg.out_dir = v.get<std::string>();
        else if (k == "vtk")
            cfg.emit_vtk = v.get<bool>();
        else if (k == "csv")
            cfg.emit_csv = v.get<bool>();
        else if (k == "check_identities")
            cfg.check_identities = v.get<bool>();
        else if (k == "deterministic")
            cfg.deterministic = v.get<bool>();
        else if (k == "enforce")
            cfg.enforce = v.get<bool>();
        else
            throw ParamError("config: unknown key '" + k + "'");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str());
}

SolveCase solve_case(FracturedDomain dom, int nx, const AssemblyParams& params) {
    SolveCase c;
    c.dom = std::make_unique<FracturedDomain>(std::move(dom));
    c.disc = std::make_unique<Discretization>(Discretization::build(*c.dom, nx));
    c.sys = assemble(*c.disc, params);
    std::vector<double> x = solve_lu(c.sys.A, c.sys.b);
    const std::vector<double> Ax = c.sys.A.matvec(x);
    double res = 0.0;
    for (std::size_t i = 0; i < Ax.size(); ++i)
        res = std::max(res, std::abs(Ax[i] - c.sys.b[i]));
    c.solve_residual = res;
    c.u = std::make_unique<SolutionField>(*c.disc, std::move(x));
    return c;
}

namespace {

std::string output_dir(const RunConfig& cfg) {
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    const char* env = std::getenv("CUTFRAC_OUT");
    return env ? env : ".";
}

std::string run_tag(const RunConfig& cfg, int nx) {
    std::string base = std::filesystem::path(cfg.domain_source).stem().string();
    if (base.empty()) base = "run";
    return base + "_nx" + std::to_string(nx);
}

AssemblyParams params_of(const RunConfig& cfg) {
    AssemblyParams p;
    p.tau1 = cfg.tau1;
    p.tau2 = cfg.tau2;
    p.deterministic = cfg.deterministic;
    return p;
}

void print_point_balances(const SolveCase& c, std::ostream& log) {
    const FracturedDomain& dom = c.disc->domain();
    for (int pi = 0; pi < dom.component_count(0); ++pi) {
        const PointBalance pb = point_balance(*c.u, pi);
        log << "point '" << dom.points[static_cast<std::size_t>(pi)].name
            << "': flux balance " << pb.discrete << " (strong-form residual " << pb.strong
            << ", scale " << pb.scale << ")\n";
    }
}

} // namespace

int run_solve(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const int nx = cfg.nx.front();
    FracturedDomain dom = load_domain_source(cfg.domain_source);
    const AssemblyParams params = params_of(cfg);
    SolveCase c = solve_case(std::move(dom), nx, params);

    log << "domain: " << cfg.domain_source << ", nx=" << nx << ", h=" << c.disc->h()
        << ", tau1=" << cfg.tau1 << ", tau2=" << cfg.tau2 << "\n";
    log << "dofs: " << c.disc->dofs.total() << " (pinned " << c.sys.pinned.size() << ")\n";
    log << "solve residual (inf-norm): " << c.solve_residual << "\n";
    log << "coercivity indicator min(2a+Div b): "
        << coercivity_indicator(c.disc->domain(), 64) << "\n";
    print_point_balances(c, log);

    const std::optional<AnalyticField> exact = exact_solution(c.disc->domain());
    std::vector<std::vector<double>> err_rows;
    if (exact) {
        for (const ComponentId cid : c.disc->domain().all_components()) {
            const double e = l2_error(*c.u, *exact, cid);
            log << "L2 error d=" << cid.dim << " i=" << cid.index << ": " << e << "\n";
            err_rows.push_back({static_cast<double>(cid.dim), static_cast<double>(cid.index),
                                e});
        }
        const ErrorReport rep = energy_error(*c.u, *exact, params);
        log << "L2 error total: " << rep.l2() << "\n";
        log << "energy error total: " << rep.energy() << "\n";
    }

    if (cfg.check_identities) {
        std::mt19937 rng(20240811);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> v(c.disc->dofs.total());
            for (double& x : v) x = dist(rng);
            const SolutionField vf(*c.disc, std::move(v));
            const CoercivityIdentity id = coercivity_identity(c.sys, vf, params);
            worst = std::max(worst, id.residual() / id.scale);
        }
        log << "coercivity identity max relative residual (20 trials): " << worst << "\n";
    }

    const std::string dir = output_dir(cfg);
    std::filesystem::create_directories(dir);
    const std::string base = dir + "/" + run_tag(cfg, nx);
    if (cfg.emit_vtk) {
        for (const std::string& f : export_vtk(*c.u, base)) log << "wrote " << f << "\n";
    }
    if (cfg.emit_csv) {
        const std::string path = base + "_errors.csv";
        if (!err_rows.empty()) {
            export_csv_file({"dim", "index", "l2_error"}, err_rows, path);
        } else {
            std::vector<std::vector<double>> rows;
            for (const ComponentId cid : c.disc->domain().all_components())
                rows.push_back({static_cast<double>(cid.dim),
                                static_cast<double>(cid.index),
                                static_cast<double>(c.disc->dofs.dof_count(cid))});
            export_csv_file({"dim", "index", "dofs"}, rows, path);
        }
        log << "wrote " << path << "\n";
    }
    return 0;
}

int run_convergence(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    if (cfg.nx.size() < 3)
        throw ParamError("convergence study needs at least 3 nx levels");
    const AssemblyParams params = params_of(cfg);

    std::vector<std::pair<double, double>> l2_points, energy_points;
    for (int nx : cfg.nx) {
        SolveCase c = solve_case(load_domain_source(cfg.domain_source), nx, params);
        const std::optional<AnalyticField> exact = exact_solution(c.disc->domain());
        if (!exact)
            throw ParamError("convergence study requires exact solutions in the domain");
        const ErrorReport rep = energy_error(*c.u, *exact, params);
        l2_points.push_back({c.disc->h(), rep.l2()});
        energy_points.push_back({c.disc->h(), rep.energy()});
        log << "nx=" << nx << " h=" << c.disc->h() << " dofs=" << c.disc->dofs.total()
            << " L2=" << rep.l2() << " energy=" << rep.energy() << "\n";
    }
    const ConvergenceRates l2r = convergence_rates(l2_points);
    const ConvergenceRates enr = convergence_rates(energy_points);
    log << "L2 slope: " << l2r.slope << ", energy slope: " << enr.slope << "\n";
    for (std::size_t k = 0; k < enr.pairwise.size(); ++k)
        log << "  level " << k << "->" << k + 1 << ": L2 rate " << l2r.pairwise[k]
            << ", energy rate " << enr.pairwise[k] << "\n";

    {
        // The rates table is the study's primary artifact; always written.
        const std::string dir = output_dir(cfg);
        std::filesystem::create_directories(dir);
        const std::string path =
            dir + "/" + std::filesystem::path(cfg.domain_source).stem().string() +
            "_convergence.csv";
        std::vector<std::vector<double>> rows;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = 0; k < l2_points.size(); ++k)
            rows.push_back({l2_points[k].first, l2_points[k].second, energy_points[k].second,
                            k == 0 ? nan : l2r.pairwise[k - 1],
                            k == 0 ? nan : enr.pairwise[k - 1]});
        export_csv_file({"h", "l2", "energy", "l2_rate", "energy_rate"}, rows, path);
        log << "wrote " << path << "\n";
    }
    if (cfg.enforce && !(enr.slope >= 1.4)) {
        log << "energy slope below 1.4 with --enforce\n";
        return 1;
    }
    return 0;
}

int run_check(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const int nx = cfg.nx.front();
    const AssemblyParams params = params_of(cfg);
    int failures = 0;
    auto report = [&](const std::string& name, bool ok, double value, double bound) {
        log << (ok ? "[PASS] " : "[FAIL] ") << name << " (" << value
            << (ok ? " within " : " exceeds ") << bound << ")\n";
        if (!ok) ++failures;
    };

    FracturedDomain dom = load_domain_source(cfg.domain_source);

    // Measure partition per component on the requested mesh.
    {
        const BackgroundMesh bg(nx);
        for (const ComponentId cid : dom.all_components()) {
            const ActiveMesh am = extract_active_mesh(dom, cid, bg);
            double exact_measure = 1.0;
            if (cid.dim == 2)
                exact_measure = dom.bulks[static_cast<std::size_t>(cid.index)].area();
            else if (cid.dim == 1)
                exact_measure = dom.cracks[static_cast<std::size_t>(cid.index)].length();
            const double rel =
                std::abs(am.measure() - exact_measure) / std::max(exact_measure, 1e-300);
            report("measure partition d=" + std::to_string(cid.dim) + " i=" +
                       std::to_string(cid.index),
                   rel <= 1e-12, rel, 1e-12);
        }
    }

    // Partial integration identity with polynomial data.
    {
        const AnalyticField v = AnalyticField::global(
            [](Vec2 p) { return p.x + p.y; }, [](Vec2) { return Vec2{1.0, 1.0}; });
        const AnalyticField w = AnalyticField::global(
            [](Vec2 p) { return p.x * p.y; }, [](Vec2 p) { return Vec2{p.y, p.x}; });
        const double res = verify_partial_integration(dom, v, w, 5);
        report("partial integration residual", res <= 1e-10, res, 1e-10);
    }

    // Coercivity indicator is informational.
    log << "coercivity indicator min(2a+Div b): " << coercivity_indicator(dom, 64) << "\n";

    SolveCase c = solve_case(std::move(dom), nx, params);
    report("solver residual", c.solve_residual <= 1e-9 * (1.0 + max_abs(c.sys.b)),
           c.solve_residual, 1e-9 * (1.0 + max_abs(c.sys.b)));

    {
        std::mt19937 rng(20240811);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> v(c.disc->dofs.total());
            for (double& x : v) x = dist(rng);
            const SolutionField vf(*c.disc, std::move(v));
            const CoercivityIdentity id = coercivity_identity(c.sys, vf, params);
            worst = std::max(worst, id.residual() / id.scale);
        }
        report("coercivity identity (20 random vectors)", worst <= 1e-8, worst, 1e-8);
    }

    for (int pi = 0; pi < c.disc->domain().component_count(0); ++pi) {
        const PointBalance pb = point_balance(*c.u, pi);
        const double bound = 1e-6 * std::max(pb.scale, 1e-300);
        report("flux balance at point '" +
                   c.disc->domain().points[static_cast<std::size_t>(pi)].name + "'",
               pb.discrete <= bound, pb.discrete, bound);
        log << "  strong-form residual: " << pb.strong << "\n";
    }
    return failures == 0 ? 0 : 1;
}

} // namespace cutfrac
