#include "obl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "obl/errors.hpp"
#include "obl/version.hpp"

namespace obl::io {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw validation_error(std::string("malformed JSON: ") + e.what());
    }
}

/// Fetch a required field, naming the offending path on failure.
template <typename T>
T need(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key))
        throw validation_error("missing field '" + where + "." + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw validation_error("field '" + where + "." + key + "' has the wrong type");
    }
}

json stamp(json j) {
    j["format"] = kFormatTag;
    j["version"] = kVersion;
    return j;
}

json spec_to_json_obj(const OvalSpec& spec) {
    json j;
    if (spec.is_fourier()) {
        const auto& f = std::get<FourierRadius>(spec.shape);
        j["kind"] = "fourier";
        j["a0"] = f.a0;
        j["harmonics"] = json::array();
        for (const auto& h : f.harmonics) j["harmonics"].push_back({{"k", h.k}, {"a", h.a}, {"b", h.b}});
    } else if (spec.is_ellipse()) {
        const auto& e = std::get<EllipseAxes>(spec.shape);
        j["kind"] = "ellipse";
        j["a"] = e.a;
        j["b"] = e.b;
    } else {
        const auto& p = std::get<PerturbedSpec>(spec.shape);
        j["kind"] = "perturbed";
        j["base"] = spec_to_json_obj(*p.base);
        j["bumps"] = json::array();
        for (const auto& b : p.bumps)
            j["bumps"].push_back({{"center", b.center},
                                  {"half_width", b.half_width},
                                  {"second_deriv", b.second_deriv}});
    }
    return j;
}

OvalSpec spec_from_json_obj(const json& j, const std::string& where) {
    std::string kind = need<std::string>(j, "kind", where);
    if (kind == "fourier") {
        FourierRadius f;
        f.a0 = need<double>(j, "a0", where);
        if (j.contains("harmonics")) {
            if (!j["harmonics"].is_array())
                throw validation_error("field '" + where + ".harmonics' must be an array");
            int idx = 0;
            for (const auto& h : j["harmonics"]) {
                std::string hw = where + ".harmonics[" + std::to_string(idx++) + "]";
                FourierRadius::Harmonic harm;
                harm.k = need<int>(h, "k", hw);
                harm.a = h.value("a", 0.0);
                harm.b = h.value("b", 0.0);
                f.harmonics.push_back(harm);
            }
        }
        return OvalSpec{f};
    }
    if (kind == "ellipse") {
        EllipseAxes e;
        e.a = need<double>(j, "a", where);
        e.b = need<double>(j, "b", where);
        return OvalSpec{e};
    }
    if (kind == "perturbed") {
        if (!j.contains("base")) throw validation_error("missing field '" + where + ".base'");
        OvalSpec base = spec_from_json_obj(j["base"], where + ".base");
        std::vector<NormalBump> bumps;
        if (j.contains("bumps")) {
            int idx = 0;
            for (const auto& b : j["bumps"]) {
                std::string bw = where + ".bumps[" + std::to_string(idx++) + "]";
                NormalBump nb;
                nb.center = need<double>(b, "center", bw);
                nb.half_width = need<double>(b, "half_width", bw);
                nb.second_deriv = need<double>(b, "second_deriv", bw);
                bumps.push_back(nb);
            }
        }
        return OvalSpec::perturbed(std::move(base), std::move(bumps));
    }
    throw validation_error("field '" + where + ".kind' must be fourier|ellipse|perturbed, got '" +
                           kind + "'");
}

json orbit_to_json_obj(const PeriodicOrbit& o) {
    json j;
    j["m"] = o.m;
    j["n"] = o.n;
    j["psi"] = o.psi;
    j["action"] = o.action;
    j["trace"] = o.trace;
    j["class"] = to_string(o.cls);
    j["repetition"] = o.repetition;
    json th = json::array();
    for (const auto& p : o.points) th.push_back(p.theta);
    j["theta"] = th;
    return j;
}

}  // namespace

std::string spec_to_json(const OvalSpec& spec) { return stamp(spec_to_json_obj(spec)).dump(2) + "\n"; }

OvalSpec spec_from_json(const std::string& text) {
    json j = parse(text);
    return spec_from_json_obj(j, "curve");
}

OvalSpec load_spec(const std::string& path) { return spec_from_json(read_file(path)); }

void save_spec(const OvalSpec& spec, const std::string& path) { write_file(path, spec_to_json(spec)); }

ToleranceConfig config_from_json(const std::string& text, ToleranceConfig cfg) {
    json j = parse(text);
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("theta_margin", cfg.theta_margin);
    get("impact_tol", cfg.impact_tol);
    get("impact_max_iter", cfg.impact_max_iter);
    get("curvature_grid", cfg.curvature_grid);
    get("closure_tol", cfg.closure_tol);
    get("quad_panels_min", cfg.quad_panels_min);
    get("grad_tol", cfg.grad_tol);
    get("newton_max_iter", cfg.newton_max_iter);
    get("dedup_tol", cfg.dedup_tol);
    get("hessian_fd_step", cfg.hessian_fd_step);
    get("hessian_zero_tol", cfg.hessian_zero_tol);
    get("min_vertex_gap", cfg.min_vertex_gap);
    get("degeneracy_tol", cfg.degeneracy_tol);
    get("affinity_tol", cfg.affinity_tol);
    get("b_scan_threshold", cfg.b_scan_threshold);
    get("break_accept_tol", cfg.break_accept_tol);
    get("bump_halfwidth_factor", cfg.bump_halfwidth_factor);
    get("h_cap", cfg.h_cap);
    get("seed_offset_rel", cfg.seed_offset_rel);
    get("max_step", cfg.max_step);
    get("max_turn", cfg.max_turn);
    get("tangency_angle_threshold", cfg.tangency_angle_threshold);
    get("intersection_tol", cfg.intersection_tol);
    get("region_bins", cfg.region_bins);
    get("region_theta_cells", cfg.region_theta_cells);
    get("island_min_cells", cfg.island_min_cells);
    get("island_max_period", cfg.island_max_period);
    get("ric_gap", cfg.ric_gap);
    get("ric_min_bin_count", cfg.ric_min_bin_count);
    get("boundary_degenerate_theta", cfg.boundary_degenerate_theta);
    get("c1_grid_phi", cfg.c1_grid_phi);
    get("c1_grid_theta", cfg.c1_grid_theta);
    return cfg;
}

ToleranceConfig load_config(const std::string& path, ToleranceConfig base) {
    return config_from_json(read_file(path), base);
}

std::string config_to_json(const ToleranceConfig& c) {
    json j{{"theta_margin", c.theta_margin},
           {"impact_tol", c.impact_tol},
           {"impact_max_iter", c.impact_max_iter},
           {"curvature_grid", c.curvature_grid},
           {"closure_tol", c.closure_tol},
           {"quad_panels_min", c.quad_panels_min},
           {"grad_tol", c.grad_tol},
           {"newton_max_iter", c.newton_max_iter},
           {"dedup_tol", c.dedup_tol},
           {"hessian_fd_step", c.hessian_fd_step},
           {"hessian_zero_tol", c.hessian_zero_tol},
           {"min_vertex_gap", c.min_vertex_gap},
           {"degeneracy_tol", c.degeneracy_tol},
           {"affinity_tol", c.affinity_tol},
           {"b_scan_threshold", c.b_scan_threshold},
           {"break_accept_tol", c.break_accept_tol},
           {"bump_halfwidth_factor", c.bump_halfwidth_factor},
           {"h_cap", c.h_cap},
           {"seed_offset_rel", c.seed_offset_rel},
           {"max_step", c.max_step},
           {"max_turn", c.max_turn},
           {"tangency_angle_threshold", c.tangency_angle_threshold},
           {"intersection_tol", c.intersection_tol},
           {"region_bins", c.region_bins},
           {"region_theta_cells", c.region_theta_cells},
           {"island_min_cells", c.island_min_cells},
           {"island_max_period", c.island_max_period},
           {"ric_gap", c.ric_gap},
           {"ric_min_bin_count", c.ric_min_bin_count},
           {"boundary_degenerate_theta", c.boundary_degenerate_theta},
           {"c1_grid_phi", c.c1_grid_phi},
           {"c1_grid_theta", c.c1_grid_theta}};
    return stamp(j).dump(2) + "\n";
}

std::string orbits_to_json(const OrbitLibrary& lib) {
    json j;
    j["orbits"] = json::array();
    for (size_t i = 0; i < lib.orbits.size(); ++i) {
        json o = orbit_to_json_obj(lib.orbits[i]);
        o["id"] = i;
        if (i < lib.hessian_signatures.size())
            o["hessian_signature"] = lib.hessian_signatures[i];
        if (i < lib.nondegenerate.size()) o["nondegenerate"] = static_cast<bool>(lib.nondegenerate[i]);
        j["orbits"].push_back(o);
    }
    j["warnings"] = lib.warnings;
    return stamp(j).dump(2) + "\n";
}

OrbitLibrary orbits_from_json(const std::string& text) {
    json j = parse(text);
    if (!j.contains("orbits") || !j["orbits"].is_array())
        throw validation_error("missing field 'orbits' (array)");
    OrbitLibrary lib;
    int idx = 0;
    for (const auto& o : j["orbits"]) {
        std::string where = "orbits[" + std::to_string(idx++) + "]";
        PeriodicOrbit orbit;
        orbit.m = need<int>(o, "m", where);
        orbit.n = need<int>(o, "n", where);
        orbit.psi = need<std::vector<double>>(o, "psi", where);
        if (static_cast<int>(orbit.psi.size()) != orbit.n)
            throw validation_error("field '" + where + ".psi' must have n entries");
        lib.hessian_signatures.push_back(
            o.contains("hessian_signature")
                ? std::array<int, 3>{o["hessian_signature"][0], o["hessian_signature"][1],
                                     o["hessian_signature"][2]}
                : std::array<int, 3>{0, 0, 0});
        lib.nondegenerate.push_back(o.value("nondegenerate", true));
        lib.orbits.push_back(std::move(orbit));
    }
    if (j.contains("warnings")) lib.warnings = j["warnings"].get<std::vector<std::string>>();
    return lib;
}

OrbitLibrary load_orbits(const std::string& path) { return orbits_from_json(read_file(path)); }

void save_orbits(const OrbitLibrary& lib, const std::string& path) {
    write_file(path, orbits_to_json(lib));
}

std::string classification_report_json(const OrbitLibrary& lib) {
    json j;
    j["orbits"] = json::array();
    for (size_t i = 0; i < lib.orbits.size(); ++i) {
        const PeriodicOrbit& o = lib.orbits[i];
        json r;
        r["id"] = i;
        r["m"] = o.m;
        r["n"] = o.n;
        r["trace"] = o.trace;
        r["class"] = to_string(o.cls);
        json dec = json::array();
        for (int s = 0; s < o.n; ++s) {
            TraceDecomposition td = trace_decomposition(o, s);
            dec.push_back({{"i", s}, {"b", td.b}, {"c", td.c}});
        }
        r["decomposition"] = dec;
        j["orbits"].push_back(r);
    }
    return stamp(j).dump(2) + "\n";
}

std::string break_experiment_json(const BreakExperiment& exp) {
    json j;
    j["site"] = exp.result.site.site;
    j["b"] = exp.result.site.b;
    j["c"] = exp.result.site.c;
    j["fallback"] = exp.result.site.fallback;
    j["h"] = exp.result.h;
    j["bump_center"] = exp.result.bump_center;
    j["bump_half_width"] = exp.result.bump_half_width;
    j["trace_before"] = exp.result.trace_before;
    j["trace_predicted"] = exp.result.trace_predicted;
    j["trace_predicted_exact"] = exp.result.trace_predicted_exact;
    j["trace_measured"] = exp.measurement.trace_measured;
    j["closure_error"] = exp.measurement.closure_error;
    return stamp(j).dump(2) + "\n";
}

std::string split_report_json(const SplitTangencyResult& res) {
    json j;
    j["h"] = res.h;
    j["bump_center"] = res.bump_center;
    j["bump_half_width"] = res.bump_half_width;
    j["radius"] = res.radius;
    j["slope_u"] = res.prediction.slope_u;
    j["slope_s"] = res.prediction.slope_s;
    j["gap"] = res.prediction.gap;
    return stamp(j).dump(2) + "\n";
}

std::string intersections_json(const std::vector<HeteroclinicPoint>& pts) {
    json j;
    j["points"] = json::array();
    for (const auto& p : pts) {
        j["points"].push_back({{"phi", p.location.phi},
                               {"theta", p.location.theta},
                               {"crossing_angle", p.crossing_angle},
                               {"transversal", p.transversal},
                               {"kind", p.homoclinic ? "homoclinic" : "heteroclinic"},
                               {"sigma_a", p.sigma_a},
                               {"sigma_b", p.sigma_b},
                               {"residual", p.refine_residual}});
    }
    return stamp(j).dump(2) + "\n";
}

std::string region_report_json(const InstabilityRegion& region) {
    json j;
    j["bins"] = region.bins;
    j["theta_cells"] = region.theta_cells;
    j["lower"] = region.lower;
    j["upper"] = region.upper;
    j["lower_is_boundary"] = region.lower_is_boundary;
    j["upper_is_boundary"] = region.upper_is_boundary;
    j["arclength_budget"] = region.arclength_budget;
    j["manifold_points"] = region.manifold_points;
    j["islands"] = json::array();
    for (const auto& isl : region.islands) {
        json ji;
        ji["cells"] = isl.cells.size();
        ji["period"] = isl.period;
        ji["rotation_m"] = isl.rotation_m;
        ji["rotation_consistent"] = isl.rotation_consistent;
        ji["phi_center"] = isl.phi_center;
        ji["theta_center"] = isl.theta_center;
        ji["diagnostics"] = isl.diagnostics;
        if (isl.center_orbit) ji["center_orbit"] = orbit_to_json_obj(*isl.center_orbit);
        j["islands"].push_back(ji);
    }
    return stamp(j).dump(2) + "\n";
}

std::string validation_report_json(const ValidationReport& rep, const OvalSpec& spec) {
    json j;
    j["valid"] = rep.valid;
    j["issues"] = rep.issues;
    j["min_curvature_radius"] = rep.min_curvature_radius;
    j["min_curvature_param"] = rep.min_curvature_param;
    j["closure_defect"] = {rep.closure_defect.x(), rep.closure_defect.y()};
    j["normalized"] = spec_to_json_obj(spec);
    return stamp(j).dump(2) + "\n";
}

std::string tangency_to_json(const TangencyRecord& t) {
    json j;
    j["phi"] = t.location.phi;
    j["theta"] = t.location.theta;
    j["slope"] = t.slope;
    j["orbit"] = orbit_to_json_obj(t.orbit);
    return stamp(j).dump(2) + "\n";
}

TangencyRecord tangency_from_json(const std::string& text) {
    json j = parse(text);
    TangencyRecord t;
    t.location.phi = need<double>(j, "phi", "tangle");
    t.location.theta = need<double>(j, "theta", "tangle");
    t.slope = need<double>(j, "slope", "tangle");
    if (!j.contains("orbit")) throw validation_error("missing field 'tangle.orbit'");
    const json& o = j["orbit"];
    t.orbit.m = need<int>(o, "m", "tangle.orbit");
    t.orbit.n = need<int>(o, "n", "tangle.orbit");
    t.orbit.psi = need<std::vector<double>>(o, "psi", "tangle.orbit");
    return t;
}

std::string orbit_csv(const std::vector<LiftedPhasePoint>& pts) {
    std::ostringstream os;
    os << "step,phi_lifted,phi_mod,theta\n";
    for (size_t i = 0; i < pts.size(); ++i)
        os << i << ',' << fmt17(pts[i].phi_lift) << ',' << fmt17(mod_2pi(pts[i].phi_lift)) << ','
           << fmt17(pts[i].theta) << '\n';
    return os.str();
}

std::string branch_csv(const ManifoldBranch& b) {
    std::ostringstream os;
    os << "arc,phi_lifted,theta\n";
    for (size_t i = 0; i < b.polyline.size(); ++i)
        os << fmt17(b.arc[i]) << ',' << fmt17(b.polyline[i].phi_lift) << ','
           << fmt17(b.polyline[i].theta) << '\n';
    return os.str();
}

std::string branch_manifest_json(const ManifoldBranch& b) {
    json j;
    j["kind"] = to_string(b.kind);
    j["point_index"] = b.point_index;
    j["eigenvalue"] = b.eigenvalue;
    j["map_power"] = b.map_power;
    j["seed_dir"] = {b.seed_dir.x(), b.seed_dir.y()};
    j["seed_offset"] = b.seed_offset;
    j["base"] = {b.base.phi_lift, b.base.theta};
    j["complete"] = b.complete;
    j["orbit"] = orbit_to_json_obj(b.orbit);
    j["sigma"] = b.sigma;
    json poly = json::array();
    for (const auto& p : b.polyline) poly.push_back({p.phi_lift, p.theta});
    j["polyline"] = poly;
    return stamp(j).dump() + "\n";
}

ManifoldBranch branch_from_manifest(const std::string& text) {
    json j = parse(text);
    ManifoldBranch b;
    auto kind = branch_kind_from_string(need<std::string>(j, "kind", "branch"));
    if (!kind) throw validation_error("field 'branch.kind' is not a branch kind");
    b.kind = *kind;
    b.point_index = need<int>(j, "point_index", "branch");
    b.eigenvalue = need<double>(j, "eigenvalue", "branch");
    b.map_power = need<int>(j, "map_power", "branch");
    b.seed_dir = Vec2(j["seed_dir"][0], j["seed_dir"][1]);
    b.seed_offset = need<double>(j, "seed_offset", "branch");
    b.base = {j["base"][0], j["base"][1]};
    b.complete = j.value("complete", true);
    b.sigma = need<std::vector<double>>(j, "sigma", "branch");
    const json& o = j["orbit"];
    b.orbit.m = need<int>(o, "m", "branch.orbit");
    b.orbit.n = need<int>(o, "n", "branch.orbit");
    b.orbit.psi = need<std::vector<double>>(o, "psi", "branch.orbit");
    for (const auto& p : j["polyline"]) b.polyline.push_back({p[0], p[1]});
    b.arc.resize(b.polyline.size(), 0.0);
    for (size_t i = 1; i < b.polyline.size(); ++i)
        b.arc[i] = b.arc[i - 1] + std::hypot(b.polyline[i].phi_lift - b.polyline[i - 1].phi_lift,
                                             b.polyline[i].theta - b.polyline[i - 1].theta);
    return b;
}

std::string portrait_csv(const std::vector<std::vector<LiftedPhasePoint>>& trajectories) {
    std::ostringstream os;
    os << "sample,step,phi,theta\n";
    for (size_t s = 0; s < trajectories.size(); ++s)
        for (size_t k = 0; k < trajectories[s].size(); ++k)
            os << s << ',' << k << ',' << fmt17(mod_2pi(trajectories[s][k].phi_lift)) << ','
               << fmt17(trajectories[s][k].theta) << '\n';
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw validation_error("cannot write file: " + path);
    out << content;
}

}  // namespace obl::io
