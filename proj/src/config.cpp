#include "percond/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "percond/errors.hpp"

namespace percond {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  const std::set<std::string>& allowed,
                  const std::set<std::string>& required = {}) {
    if (!obj.is_object()) throw config_error(where + ": object expected");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw config_error(where + ": unknown key '" + item.key() + "'");
    }
    for (const std::string& k : required) {
        if (!obj.contains(k)) throw config_error(where + ": missing key '" + k + "'");
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.at(key).is_number())
        throw config_error(where + "." + key + ": number expected");
    return obj.at(key).get<double>();
}

std::vector<double> get_number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw config_error(where + ": array expected");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw config_error(where + ": numeric entries expected");
        out.push_back(e.get<double>());
    }
    return out;
}

TrigPoly parse_trig(const json& v, const std::string& where) {
    TrigPoly p;
    if (v.is_string()) {
        if (v.get<std::string>() != "zero")
            throw config_error(where + ": expected \"zero\" or a coefficient object");
        return p;
    }
    require_keys(v, where, {"const", "cos", "sin"});
    if (v.contains("const")) p.c0 = get_number(v, where, "const");
    if (v.contains("cos")) p.ccos = get_number_list(v.at("cos"), where + ".cos");
    if (v.contains("sin")) p.csin = get_number_list(v.at("sin"), where + ".sin");
    return p;
}

ShapeSpec parse_geometry(const json& v, std::size_t& N) {
    require_keys(v, "geometry", {"shape", "a", "b", "r0", "amp", "lobes", "N"},
                 {"shape", "N"});
    if (!v.at("N").is_number_unsigned())
        throw config_error("geometry.N: positive integer expected");
    N = v.at("N").get<std::size_t>();
    const std::string shape = v.at("shape").get<std::string>();
    ShapeSpec s;
    if (shape == "ellipse") {
        require_keys(v, "geometry(ellipse)", {"shape", "a", "b", "N"}, {"a", "b"});
        s.kind = ShapeSpec::Kind::Ellipse;
        s.a = get_number(v, "geometry", "a");
        s.b = get_number(v, "geometry", "b");
    } else if (shape == "star") {
        require_keys(v, "geometry(star)", {"shape", "r0", "amp", "lobes", "N"},
                     {"r0", "amp", "lobes"});
        s.kind = ShapeSpec::Kind::Star;
        s.r0 = get_number(v, "geometry", "r0");
        s.amp = get_number(v, "geometry", "amp");
        s.lobes = v.at("lobes").get<int>();
    } else {
        throw config_error("geometry.shape: expected \"ellipse\" or \"star\"");
    }
    return s;
}

RhoLaw parse_rho(const json& v) {
    require_keys(v, "rho_law", {"type", "c", "a", "eps", "rho", "r_star"}, {"type"});
    const std::string type = v.at("type").get<std::string>();
    if (type == "power") {
        require_keys(v, "rho_law(power)", {"type", "c", "a"}, {"c", "a"});
        return make_power_law(get_number(v, "rho_law", "c"), get_number(v, "rho_law", "a"));
    }
    if (type == "table") {
        require_keys(v, "rho_law(table)", {"type", "eps", "rho", "r_star"},
                     {"eps", "rho", "r_star"});
        return make_table_law(get_number_list(v.at("eps"), "rho_law.eps"),
                              get_number_list(v.at("rho"), "rho_law.rho"),
                              get_number(v, "rho_law", "r_star"));
    }
    throw config_error("rho_law.type: expected \"power\" or \"table\"");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const std::exception& e) {
        throw config_error(std::string("config: JSON parse failure: ") + e.what());
    }
    require_keys(doc, "config",
                 {"geometry", "cell", "materials", "boundary_data", "rho_law", "p",
                  "directions", "eps", "eps_grid", "fit_degree", "tolerances", "seed",
                  "out_dir", "debug"},
                 {"geometry", "cell", "materials", "rho_law"});

    RunConfig cfg;
    cfg.shape = parse_geometry(doc.at("geometry"), cfg.N);
    cfg.cell_edges = get_number_list(doc.at("cell"), "cell");

    const json& mat = doc.at("materials");
    require_keys(mat, "materials", {"lambda_plus", "lambda_minus"},
                 {"lambda_plus", "lambda_minus"});
    cfg.lambda_plus = get_number(mat, "materials", "lambda_plus");
    cfg.lambda_minus = get_number(mat, "materials", "lambda_minus");

    if (doc.contains("boundary_data")) {
        const json& bd = doc.at("boundary_data");
        require_keys(bd, "boundary_data", {"f", "g"});
        if (bd.contains("f")) cfg.f = parse_trig(bd.at("f"), "boundary_data.f");
        if (bd.contains("g")) cfg.g = parse_trig(bd.at("g"), "boundary_data.g");
    }

    cfg.rho_law = parse_rho(doc.at("rho_law"));

    if (doc.contains("p")) {
        const auto pv = get_number_list(doc.at("p"), "p");
        if (pv.size() != 2) throw config_error("p: two coordinates expected");
        cfg.p = Vec2{pv[0], pv[1]};
    }
    if (doc.contains("directions")) {
        cfg.directions.clear();
        for (const auto& e : doc.at("directions")) {
            const int j = e.get<int>();
            if (j < 1 || j > 2) throw config_error("directions: entries must be 1 or 2");
            cfg.directions.push_back(j);
        }
        if (cfg.directions.empty()) throw config_error("directions: at least one entry");
    }
    if (doc.contains("eps")) cfg.eps = get_number(doc, "config", "eps");
    if (doc.contains("eps_grid"))
        cfg.eps_grid = get_number_list(doc.at("eps_grid"), "eps_grid");
    if (doc.contains("fit_degree")) cfg.fit_degree = doc.at("fit_degree").get<int>();
    if (doc.contains("tolerances")) {
        const json& tol = doc.at("tolerances");
        require_keys(tol, "tolerances", {"greens_tol", "ewald_eta"});
        if (tol.contains("greens_tol")) cfg.greens_tol = get_number(tol, "tolerances", "greens_tol");
        if (tol.contains("ewald_eta")) cfg.ewald_eta = get_number(tol, "tolerances", "ewald_eta");
    }
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("out_dir")) cfg.out_dir = doc.at("out_dir").get<std::string>();
    if (doc.contains("debug")) {
        const json& dbg = doc.at("debug");
        require_keys(dbg, "debug", {"perturb_w_diag"});
        if (dbg.contains("perturb_w_diag"))
            cfg.perturb_w_diag = get_number(dbg, "debug", "perturb_w_diag");
    }

    std::ostringstream fp;
    fp << std::hex << std::hash<std::string>{}(doc.dump());
    cfg.fingerprint = fp.str();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

Instance make_instance(const RunConfig& cfg) {
    BoundaryGeometry geom = make_geometry(cfg.shape, cfg.N);
    PeriodicCell cell = make_cell(cfg.cell_edges);
    GreensEvaluator ev(cell, cfg.greens_tol, cfg.ewald_eta);
    const Eigen::VectorXd fv = cfg.f.sample(geom);
    const Eigen::VectorXd gv = cfg.g.sample(geom);
    ProblemData pd = make_problem(geom, cell, cfg.lambda_plus, cfg.lambda_minus, fv, gv,
                                  cfg.rho_law, cfg.directions.front());
    return Instance{std::move(geom), std::move(cell), std::move(ev), std::move(pd)};
}

} // namespace percond
