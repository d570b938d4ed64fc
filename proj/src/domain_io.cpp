#include "cutfrac/domain_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cutfrac/errors.hpp"

namespace cutfrac {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::set<std::string>& required, const std::string& where) {
    if (!j.is_object()) throw ParamError(where + ": expected a JSON object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ParamError(where + ": unknown key '" + item.key() + "'");
    for (const std::string& k : required)
        if (!j.contains(k)) throw ParamError(where + ": missing key '" + k + "'");
}

Vec2 parse_vec2(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw ParamError(where + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

ScalarField parse_scalar_field(const json& j, const std::string& where) {
    if (j.is_number()) return ScalarField::constant(j.get<double>());
    require_keys(j, {"const", "affine", "builtin"}, {}, where);
    if (j.contains("const")) return ScalarField::constant(j["const"].get<double>());
    if (j.contains("affine")) {
        const json& a = j["affine"];
        require_keys(a, {"c", "x", "y"}, {}, where + ".affine");
        return ScalarField::affine(a.value("c", 0.0), a.value("x", 0.0), a.value("y", 0.0));
    }
    if (j.contains("builtin")) return ScalarField::builtin(j["builtin"].get<std::string>());
    throw ParamError(where + ": empty field spec");
}

VectorField parse_vector_field(const json& j, const std::string& where) {
    if (j.is_array()) return VectorField::constant(parse_vec2(j, where));
    require_keys(j, {"const", "affine"}, {}, where);
    if (j.contains("const")) return VectorField::constant(parse_vec2(j["const"], where));
    if (j.contains("affine")) {
        const json& a = j["affine"];
        require_keys(a, {"c", "jac"}, {"c", "jac"}, where + ".affine");
        const json& m = a["jac"];
        if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 ||
            !m[1].is_array() || m[1].size() != 2)
            throw ParamError(where + ".affine.jac: expected a 2x2 matrix");
        return VectorField::affine(parse_vec2(a["c"], where),
                                   {{{m[0][0].get<double>(), m[0][1].get<double>()},
                                     {m[1][0].get<double>(), m[1][1].get<double>()}}});
    }
    throw ParamError(where + ": empty field spec");
}

} // namespace

FracturedDomain load_domain_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParamError(std::string("domain JSON parse error: ") + e.what());
    }
    require_keys(root, {"bounding_box", "bulks", "cracks", "points"}, {"bounding_box"},
                 "domain");

    FracturedDomain dom;
    dom.box_lo = parse_vec2(root["bounding_box"][0], "bounding_box");
    dom.box_hi = parse_vec2(root["bounding_box"][1], "bounding_box");

    std::map<std::string, int> bulk_ids, crack_ids, point_ids;

    if (root.contains("points")) {
        for (const json& jp : root["points"]) {
            require_keys(jp, {"name", "x", "alpha", "f", "exact"}, {"name", "x"}, "point");
            PointComponent p;
            p.name = jp["name"].get<std::string>();
            p.x = parse_vec2(jp["x"], "point.x");
            p.alpha = jp.value("alpha", 0.0);
            p.f = jp.value("f", 0.0);
            if (jp.contains("exact")) p.exact = jp["exact"].get<double>();
            if (point_ids.count(p.name)) throw ParamError("duplicate point name " + p.name);
            point_ids[p.name] = static_cast<int>(dom.points.size());
            dom.points.push_back(std::move(p));
        }
    }

    // First pass over bulks to register names (cracks refer to them by name).
    if (root.contains("bulks"))
        for (const json& jb : root["bulks"]) {
            if (!jb.contains("name")) throw ParamError("bulk: missing key 'name'");
            const std::string name = jb["name"].get<std::string>();
            if (bulk_ids.count(name)) throw ParamError("duplicate bulk name " + name);
            bulk_ids[name] = static_cast<int>(bulk_ids.size());
        }
    if (root.contains("cracks"))
        for (const json& jc : root["cracks"]) {
            if (!jc.contains("name")) throw ParamError("crack: missing key 'name'");
            const std::string name = jc["name"].get<std::string>();
            if (crack_ids.count(name)) throw ParamError("duplicate crack name " + name);
            crack_ids[name] = static_cast<int>(crack_ids.size());
        }

    auto parse_end = [&](const json& je, const std::string& where) {
        CrackEnd end;
        if (je.is_string()) {
            if (je.get<std::string>() != "outer")
                throw ParamError(where + ": expected \"outer\" or {\"point\": name}");
            return end;
        }
        require_keys(je, {"point"}, {"point"}, where);
        const std::string pname = je["point"].get<std::string>();
        if (!point_ids.count(pname)) throw ParamError(where + ": unknown point " + pname);
        end.outer = false;
        end.point = point_ids[pname];
        return end;
    };

    if (root.contains("cracks")) {
        for (const json& jc : root["cracks"]) {
            require_keys(jc,
                         {"name", "polyline", "speed", "alpha", "f", "g", "exact", "left",
                          "right", "start", "end"},
                         {"name", "polyline", "speed", "start", "end"}, "crack");
            CrackComponent c;
            c.name = jc["name"].get<std::string>();
            for (const json& jv : jc["polyline"])
                c.polyline.push_back(parse_vec2(jv, "crack.polyline"));
            c.speed = parse_scalar_field(jc["speed"], "crack.speed");
            if (jc.contains("alpha")) c.alpha = parse_scalar_field(jc["alpha"], "crack.alpha");
            if (jc.contains("f")) c.f = parse_scalar_field(jc["f"], "crack.f");
            if (jc.contains("g")) c.g = parse_scalar_field(jc["g"], "crack.g");
            if (jc.contains("exact"))
                c.exact = parse_scalar_field(jc["exact"], "crack.exact");
            auto side_id = [&](const char* key) {
                if (!jc.contains(key) || jc[key].is_null()) return -1;
                const std::string n = jc[key].get<std::string>();
                if (!bulk_ids.count(n))
                    throw ParamError("crack '" + c.name + "': unknown bulk '" + n + "'");
                return bulk_ids[n];
            };
            c.left_bulk = side_id("left");
            c.right_bulk = side_id("right");
            c.start = parse_end(jc["start"], "crack.start");
            c.end = parse_end(jc["end"], "crack.end");
            dom.cracks.push_back(std::move(c));
        }
    }

    if (root.contains("bulks")) {
        for (const json& jb : root["bulks"]) {
            require_keys(jb,
                         {"name", "polygon", "edges", "beta", "alpha", "f", "g", "exact"},
                         {"name", "polygon", "edges", "beta"}, "bulk");
            BulkComponent b;
            b.name = jb["name"].get<std::string>();
            for (const json& jv : jb["polygon"])
                b.polygon.push_back(parse_vec2(jv, "bulk.polygon"));
            for (const json& je : jb["edges"]) {
                EdgeTag tag;
                if (je.is_string()) {
                    if (je.get<std::string>() != "outer")
                        throw ParamError("bulk '" + b.name + "': bad edge tag");
                } else {
                    require_keys(je, {"crack"}, {"crack"}, "bulk.edges");
                    const std::string cname = je["crack"].get<std::string>();
                    if (!crack_ids.count(cname))
                        throw ParamError("bulk '" + b.name + "': unknown crack '" + cname +
                                         "'");
                    tag.outer = false;
                    tag.crack = crack_ids[cname];
                }
                b.edges.push_back(tag);
            }
            b.beta = parse_vector_field(jb["beta"], "bulk.beta");
            if (jb.contains("alpha")) b.alpha = parse_scalar_field(jb["alpha"], "bulk.alpha");
            if (jb.contains("f")) b.f = parse_scalar_field(jb["f"], "bulk.f");
            if (jb.contains("g")) b.g = parse_scalar_field(jb["g"], "bulk.g");
            if (jb.contains("exact"))
                b.exact = parse_scalar_field(jb["exact"], "bulk.exact");
            b.convex_pieces.clear();
            for (const Triangle& t : triangulate_polygon(b.polygon))
                b.convex_pieces.push_back({t.v[0], t.v[1], t.v[2]});
            dom.bulks.push_back(std::move(b));
        }
    }

    // Derive point adjacency from crack endpoint tags.
    for (int ci = 0; ci < static_cast<int>(dom.cracks.size()); ++ci) {
        const CrackComponent& c = dom.cracks[ci];
        if (!c.start.outer) dom.points[c.start.point].cracks.push_back({ci, 0});
        if (!c.end.outer) dom.points[c.end.point].cracks.push_back({ci, 1});
    }

    dom.validate();
    return dom;
}

FracturedDomain load_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("cannot open domain file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_domain_json(ss.str());
}

} // namespace cutfrac
