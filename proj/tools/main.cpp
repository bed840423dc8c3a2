// obl: oval billiards laboratory command line.
//
// Every subcommand reads a curve spec JSON (--curve), honors --config for
// tolerances and --seed where randomness is involved, and writes its outputs
// to explicit paths. Exit codes: 0 success, 2 validation failure, 3 numerical
// failure (the failing operation is named on stderr).

#include <CLI11.hpp>
#include <iostream>
#include <random>

#include "obl/billiard.hpp"
#include "obl/genericity.hpp"
#include "obl/io.hpp"
#include "obl/manifolds.hpp"
#include "obl/regions.hpp"
#include "obl/stability.hpp"
#include "obl/svg.hpp"
#include "obl/variational.hpp"
#include "obl/version.hpp"

using namespace obl;

namespace {

struct Common {
    std::string curve_path;
    std::string config_path;
    std::uint64_t seed = 1;

    ToleranceConfig config() const {
        ToleranceConfig cfg;
        if (!config_path.empty()) cfg = io::load_config(config_path, cfg);
        return cfg;
    }
    Oval oval() const { return Oval::compile(io::load_spec(curve_path), config()); }
};

void add_common(CLI::App* cmd, Common& c, bool need_curve = true) {
    auto* opt = cmd->add_option("--curve", c.curve_path, "curve spec JSON");
    if (need_curve) opt->required();
    cmd->add_option("--config", c.config_path, "tolerance config JSON");
    cmd->add_option("--seed", c.seed, "random seed")->capture_default_str();
}

io::OrbitLibrary rebuild_library(const Oval& oval, const std::string& path) {
    io::OrbitLibrary lib = io::load_orbits(path);
    BilliardMap map(oval);
    for (auto& orbit : lib.orbits)
        orbit = orbit_from_polygon(map, orbit.m, orbit.psi, 1e-7);
    return lib;
}

const PeriodicOrbit& pick_orbit(const io::OrbitLibrary& lib, int id) {
    if (id < 0 || id >= static_cast<int>(lib.orbits.size()))
        throw validation_error("--orbit " + std::to_string(id) + " out of range (library has " +
                               std::to_string(lib.orbits.size()) + " orbits)");
    return lib.orbits[id];
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oval billiards laboratory (format " + std::string(kFormatTag) + ")"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // ---- oval check ----
    auto* oval_cmd = app.add_subcommand("oval", "curve spec operations");
    oval_cmd->require_subcommand(1);
    auto* check = oval_cmd->add_subcommand("check", "validate a curve spec");
    Common check_c;
    std::string check_out;
    add_common(check, check_c);
    check->add_option("--out", check_out, "report JSON path");
    check->callback([&] {
        OvalSpec spec = io::load_spec(check_c.curve_path);
        ValidationReport rep = Oval::check(spec, check_c.config());
        std::string report = io::validation_report_json(rep, spec);
        if (!check_out.empty()) io::write_file(check_out, report);
        std::cout << report;
        if (!rep.valid) throw validation_error("curve spec failed validation");
    });

    // ---- map iterate ----
    auto* map_cmd = app.add_subcommand("map", "billiard map operations");
    map_cmd->require_subcommand(1);
    auto* iterate = map_cmd->add_subcommand("iterate", "iterate the map, write an orbit CSV");
    Common it_c;
    double it_phi = 0.0, it_theta = kPi / 2;
    long it_n = 100;
    std::string it_out;
    add_common(iterate, it_c);
    iterate->add_option("--phi", it_phi, "initial tangent angle")->required();
    iterate->add_option("--theta", it_theta, "initial direction angle")->required();
    iterate->add_option("--n", it_n, "iteration count (negative = backward)")->required();
    iterate->add_option("--out", it_out, "orbit CSV path")->required();
    iterate->callback([&] {
        Oval ov = it_c.oval();
        BilliardMap map(ov);
        auto orbit = map.iterate({it_phi, it_theta}, it_n);
        io::write_file(it_out, io::orbit_csv(orbit));
    });

    // ---- portrait ----
    auto* portrait = app.add_subcommand("portrait", "phase portrait SVG + points CSV");
    Common po_c;
    int po_samples = 40;
    long po_iters = 500;
    std::string po_out, po_csv;
    add_common(portrait, po_c);
    portrait->add_option("--samples", po_samples, "number of random initial conditions")->capture_default_str();
    portrait->add_option("--iters", po_iters, "iterations per sample")->capture_default_str();
    portrait->add_option("--out", po_out, "portrait SVG path")->required();
    portrait->add_option("--csv", po_csv, "points CSV path");
    portrait->callback([&] {
        Oval ov = po_c.oval();
        BilliardMap map(ov);
        std::mt19937_64 rng(po_c.seed);
        std::uniform_real_distribution<double> uphi(0.0, kTwoPi), uth(0.05, kPi - 0.05);
        std::vector<std::vector<LiftedPhasePoint>> trajectories;
        for (int s = 0; s < po_samples; ++s)
            trajectories.push_back(map.iterate({uphi(rng), uth(rng)}, po_iters));
        io::write_file(po_out, svg::phase_portrait(trajectories));
        if (!po_csv.empty()) io::write_file(po_csv, io::portrait_csv(trajectories));
    });

    // ---- orbits find / classify ----
    auto* orbits_cmd = app.add_subcommand("orbits", "periodic orbit search and classification");
    orbits_cmd->require_subcommand(1);

    auto* find = orbits_cmd->add_subcommand("find", "variational (m,n) orbit search");
    Common fi_c;
    int fi_m = 1, fi_n = 2, fi_starts = 0;
    std::string fi_out;
    add_common(find, fi_c);
    find->add_option("--m", fi_m, "winding count")->required();
    find->add_option("--n", fi_n, "vertex count")->required();
    find->add_option("--starts", fi_starts, "multistart count (0 = 50 n)")->capture_default_str();
    find->add_option("--out", fi_out, "orbit library JSON path")->required();
    find->callback([&] {
        Oval ov = fi_c.oval();
        FindOrbitsResult res = find_orbits(ov, fi_m, fi_n, {fi_starts, fi_c.seed});
        io::OrbitLibrary lib;
        for (const auto& cp : res.points) {
            lib.orbits.push_back(config_to_orbit(ov, cp.config));
            lib.hessian_signatures.push_back(cp.hessian_signature);
            lib.nondegenerate.push_back(cp.nondegenerate);
        }
        lib.warnings = res.warnings;
        io::save_orbits(lib, fi_out);
        for (const auto& w : lib.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << lib.orbits.size() << " orbit(s) -> " << fi_out << "\n";
    });

    auto* classify_cmd = orbits_cmd->add_subcommand("classify", "traces, classes, decompositions");
    Common cl_c;
    std::string cl_orbits, cl_out;
    add_common(classify_cmd, cl_c);
    classify_cmd->add_option("--orbits", cl_orbits, "orbit library JSON")->required();
    classify_cmd->add_option("--out", cl_out, "classification report JSON path")->required();
    classify_cmd->callback([&] {
        Oval ov = cl_c.oval();
        io::OrbitLibrary lib = rebuild_library(ov, cl_orbits);
        io::write_file(cl_out, io::classification_report_json(lib));
    });

    // ---- perturb break-degeneracy / split-tangency ----
    auto* perturb = app.add_subcommand("perturb", "constructive curve perturbations");
    perturb->require_subcommand(1);

    auto* brk = perturb->add_subcommand("break-degeneracy", "bump a degenerate orbit nondegenerate");
    Common br_c;
    std::string br_orbits, br_out_curve, br_out_report;
    int br_id = 0;
    double br_h = 0.0;
    add_common(brk, br_c);
    brk->add_option("--orbits", br_orbits, "orbit library JSON")->required();
    brk->add_option("--orbit", br_id, "orbit id in the library")->required();
    brk->add_option("--h", br_h, "bump second derivative (0 = automatic)")->capture_default_str();
    brk->add_option("--out-curve", br_out_curve, "perturbed curve JSON path")->required();
    brk->add_option("--out-report", br_out_report, "experiment report JSON path")->required();
    brk->callback([&] {
        Oval ov = br_c.oval();
        io::OrbitLibrary lib = rebuild_library(ov, br_orbits);
        const PeriodicOrbit& orbit = pick_orbit(lib, br_id);
        io::BreakExperiment exp;
        exp.result = break_degeneracy(ov, orbit, br_h);
        Oval pert = Oval::compile(exp.result.perturbed_spec, br_c.config());
        exp.measurement = measure_on_perturbed(pert, orbit);
        io::save_spec(exp.result.perturbed_spec, br_out_curve);
        io::write_file(br_out_report, io::break_experiment_json(exp));
        std::cout << "trace " << exp.result.trace_before << " -> " << exp.measurement.trace_measured
                  << " (predicted " << exp.result.trace_predicted << ")\n";
    });

    auto* split = perturb->add_subcommand("split-tangency", "split a tangential connection");
    Common sp_c;
    std::string sp_tangle, sp_out_curve, sp_out_report;
    double sp_h = 1e-3;
    add_common(split, sp_c);
    split->add_option("--tangle", sp_tangle, "tangency record JSON")->required();
    split->add_option("--h", sp_h, "bump second derivative")->capture_default_str();
    split->add_option("--out-curve", sp_out_curve, "perturbed curve JSON path")->required();
    split->add_option("--out-report", sp_out_report, "predicted slopes JSON path")->required();
    split->callback([&] {
        Oval ov = sp_c.oval();
        TangencyRecord t = io::tangency_from_json(io::read_file(sp_tangle));
        BilliardMap map(ov);
        t.orbit = orbit_from_polygon(map, t.orbit.m, t.orbit.psi, 1e-7);
        SplitTangencyResult res = split_tangency(ov, t, sp_h);
        io::save_spec(res.perturbed_spec, sp_out_curve);
        io::write_file(sp_out_report, io::split_report_json(res));
    });

    // ---- manifold grow ----
    auto* manifold = app.add_subcommand("manifold", "invariant manifold operations");
    manifold->require_subcommand(1);
    auto* grow = manifold->add_subcommand("grow", "globalize one branch, write CSV + manifest");
    Common gr_c;
    std::string gr_orbits, gr_kind = "unstable+", gr_out;
    int gr_id = 0, gr_point = 0, gr_max_points = 20000;
    double gr_arclength = 50.0;
    add_common(grow, gr_c);
    grow->add_option("--orbits", gr_orbits, "orbit library JSON")->required();
    grow->add_option("--orbit", gr_id, "orbit id")->required();
    grow->add_option("--point", gr_point, "orbit point index")->capture_default_str();
    grow->add_option("--kind", gr_kind, "unstable+|unstable-|stable+|stable-")->capture_default_str();
    grow->add_option("--budget-arclength", gr_arclength, "max branch arclength")->capture_default_str();
    grow->add_option("--budget-points", gr_max_points, "max polyline points")->capture_default_str();
    grow->add_option("--out", gr_out, "branch CSV path (manifest written alongside)")->required();
    grow->callback([&] {
        Oval ov = gr_c.oval();
        BilliardMap map(ov);
        io::OrbitLibrary lib = rebuild_library(ov, gr_orbits);
        const PeriodicOrbit& orbit = pick_orbit(lib, gr_id);
        auto kind = branch_kind_from_string(gr_kind);
        if (!kind) throw validation_error("--kind must be unstable+|unstable-|stable+|stable-");
        ManifoldBranch br =
            grow_branch(map, orbit, gr_point, *kind, BranchBudget{gr_max_points, gr_arclength});
        io::write_file(gr_out, io::branch_csv(br));
        io::write_file(gr_out + ".manifest.json", io::branch_manifest_json(br));
        std::cout << br.polyline.size() << " points, arclength " << br.arc.back()
                  << (br.complete ? "" : " (budget exhausted, incomplete)") << "\n";
    });

    // ---- tangle intersections ----
    auto* tangle = app.add_subcommand("tangle", "hetero/homoclinic structure");
    tangle->require_subcommand(1);
    auto* inter = tangle->add_subcommand("intersections", "crossings of two branches");
    Common in_c;
    std::string in_a, in_b, in_out;
    add_common(inter, in_c);
    inter->add_option("--a", in_a, "first branch manifest JSON")->required();
    inter->add_option("--b", in_b, "second branch manifest JSON")->required();
    inter->add_option("--out", in_out, "intersections JSON path")->required();
    inter->callback([&] {
        Oval ov = in_c.oval();
        BilliardMap map(ov);
        ManifoldBranch a = io::branch_from_manifest(io::read_file(in_a));
        ManifoldBranch b = io::branch_from_manifest(io::read_file(in_b));
        auto pts = find_intersections(map, a, b, in_c.config().tangency_angle_threshold);
        io::write_file(in_out, io::intersections_json(pts));
        std::cout << pts.size() << " intersection(s) -> " << in_out << "\n";
    });

    // ---- region build ----
    auto* region_cmd = app.add_subcommand("region", "instability regions");
    region_cmd->require_subcommand(1);
    auto* build = region_cmd->add_subcommand("build", "smallest cylinder over the manifold closure");
    Common re_c;
    std::string re_orbits, re_out, re_svg;
    int re_id = 0, re_bins = 0, re_samples = 8;
    double re_arclength = 120.0;
    int re_max_points = 60000;
    add_common(build, re_c);
    build->add_option("--orbits", re_orbits, "orbit library JSON")->required();
    build->add_option("--orbit", re_id, "hyperbolic orbit id")->required();
    build->add_option("--budget", re_arclength, "manifold arclength budget")->capture_default_str();
    build->add_option("--max-points", re_max_points, "manifold point budget")->capture_default_str();
    build->add_option("--bins", re_bins, "phi bins (0 = config default)")->capture_default_str();
    build->add_option("--samples", re_samples, "samples per island")->capture_default_str();
    build->add_option("--out", re_out, "region report JSON path")->required();
    build->add_option("--svg", re_svg, "region portrait SVG path");
    build->callback([&] {
        Oval ov = re_c.oval();
        BilliardMap map(ov);
        io::OrbitLibrary lib = rebuild_library(ov, re_orbits);
        const PeriodicOrbit& orbit = pick_orbit(lib, re_id);
        InstabilityRegion region =
            build_instability_region(map, orbit, RegionBudget{re_arclength, re_max_points}, re_bins);
        analyze_islands(map, region, re_samples, re_c.seed);
        io::write_file(re_out, io::region_report_json(region));
        if (!re_svg.empty()) io::write_file(re_svg, svg::region_portrait(region));
        std::cout << region.islands.size() << " island(s) -> " << re_out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error in " << e.operation() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
