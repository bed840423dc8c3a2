#include "obl/genericity.hpp"

#include <algorithm>
#include <cmath>

#include "obl/errors.hpp"

namespace obl {
namespace {

/// Native parameters of the orbit vertices on the oval.
std::vector<double> vertex_native_params(const Oval& oval, const PeriodicOrbit& orbit) {
    std::vector<double> u(orbit.n);
    for (int i = 0; i < orbit.n; ++i) u[i] = oval.native_from_tangent_angle(orbit.points[i].phi);
    return u;
}

double min_cyclic_gap(double center, const std::vector<double>& others) {
    double best = kPi;
    for (double o : others) {
        double d = std::abs(wrap_pm_pi(center - o));
        if (d > 1e-15) best = std::min(best, d);
    }
    return best;
}

/// Append a bump to a spec, merging into an existing perturbed spec when the
/// supports stay disjoint (displacements then add along the same base normal).
OvalSpec spec_with_bump(const OvalSpec& spec, const NormalBump& bump) {
    if (!spec.is_perturbed()) return OvalSpec::perturbed(spec, {bump});
    const auto& ps = std::get<PerturbedSpec>(spec.shape);
    for (const auto& old : ps.bumps) {
        double dist = std::abs(wrap_pm_pi(old.center - bump.center));
        if (dist < old.half_width + bump.half_width)
            throw validation_error(
                "spec_with_bump: new bump support overlaps an existing bump; displacements would "
                "no longer follow the base normal field");
    }
    PerturbedSpec merged = ps;
    merged.bumps.push_back(bump);
    return OvalSpec{merged};
}

}  // namespace

SiteReport select_perturbation_site(const PeriodicOrbit& orbit, double threshold) {
    SiteReport rep;
    for (int i = 1; i < orbit.n; ++i) {
        TraceDecomposition td = trace_decomposition(orbit, i);
        if (std::abs(td.b) > threshold) {
            rep.site = i;
            rep.b = td.b;
            rep.c = td.c;
            return rep;
        }
    }
    rep.site = 0;
    rep.fallback = true;
    double L = orbit.perimeter();
    double sign = (orbit.n % 2 == 1) ? 1.0 : -1.0;  // (-1)^(n-1)
    rep.fallback_trace = sign * 2.0 * (L / orbit.x[0] - 1.0);
    // in the fallback form the trace is still affine in 1/x_0
    rep.b = sign * 2.0 * L;
    rep.c = -sign * 2.0;
    return rep;
}

BreakDegeneracyResult break_degeneracy(const Oval& oval, const PeriodicOrbit& orbit, double h_in) {
    const ToleranceConfig& cfg = oval.config();
    double dg = std::min(std::abs(orbit.trace - 2.0), std::abs(orbit.trace + 2.0));
    if (dg > cfg.break_accept_tol)
        throw validation_error("break_degeneracy: orbit is not degenerate (|tr| - 2 = " +
                               std::to_string(dg) + ")");

    SiteReport site = select_perturbation_site(orbit, cfg.b_scan_threshold);
    int i = site.site;
    auto natives = vertex_native_params(oval, orbit);
    double center = natives[i];

    std::vector<double> others;
    for (int j = 0; j < orbit.n; ++j)
        if (j != i) others.push_back(natives[j]);
    double gap = min_cyclic_gap(center, others);
    double half_width = cfg.bump_halfwidth_factor * gap;
    if (half_width <= 0.0)
        throw numerical_error("break_degeneracy", "no room for a bump support: coincident vertices");

    // sign moves the trace away from the nearest degenerate value; the exact
    // update is trace(h) = b/x * (1 + h/R) + c + O(h^2)
    double nearest = (std::abs(orbit.trace - 2.0) <= std::abs(orbit.trace + 2.0)) ? 2.0 : -2.0;
    double slope = site.b / orbit.x[i] / orbit.radius[i];  // d(trace)/dh at h=0
    double away = (nearest > 0) ? 1.0 : -1.0;              // push |trace| beyond |2|
    double sign_h = (slope * away > 0) ? 1.0 : -1.0;

    double h;
    if (h_in != 0.0) {
        h = sign_h * std::abs(h_in);
    } else {
        // largest amplitude保持 positive curvature, with a 50% margin, capped
        double probe = cfg.h_cap / 0.5;
        for (int tries = 0; tries < 40; ++tries) {
            NormalBump bump{center, half_width, sign_h * probe};
            if (Oval::check(spec_with_bump(oval.spec(), bump), cfg).valid) break;
            probe *= 0.5;
        }
        h = sign_h * std::min(0.5 * probe, cfg.h_cap);
    }

    NormalBump bump{center, half_width, h};
    // support hygiene: exactly one vertex inside
    for (int j = 0; j < orbit.n; ++j) {
        if (j == i) continue;
        if (std::abs(wrap_pm_pi(natives[j] - center)) < half_width)
            throw numerical_error("break_degeneracy", "bump support captures vertex " +
                                                          std::to_string(j) + " as well as " +
                                                          std::to_string(i));
    }
    OvalSpec pspec = spec_with_bump(oval.spec(), bump);
    ValidationReport vr = Oval::check(pspec, cfg);
    if (!vr.valid)
        throw numerical_error("break_degeneracy",
                              "perturbation h=" + std::to_string(h) + " violates curvature positivity");

    BreakDegeneracyResult out;
    out.perturbed_spec = std::move(pspec);
    out.site = site;
    out.h = h;
    out.bump_center = center;
    out.bump_half_width = half_width;
    out.trace_before = orbit.trace;
    double sin_th = std::sin(orbit.points[i].theta);
    double R = orbit.radius[i];
    double x_fo = (R - h) * sin_th;                                  // paper's first-order update
    double x_exact = perturbed_radius_at_center(R, h) * sin_th;      // R^2/(R+h)
    out.trace_predicted = site.b / x_fo + site.c;
    out.trace_predicted_exact = site.b / x_exact + site.c;
    return out;
}

PerturbedMeasurement measure_on_perturbed(const Oval& perturbed, const PeriodicOrbit& orbit) {
    BilliardMap map(perturbed);
    // the polygon is preserved point-by-point: same tangent angles, same thetas
    LiftedPhasePoint z{orbit.psi[0], orbit.points[0].theta};
    for (int i = 0; i < orbit.n; ++i) z = map.forward_lifted(z);
    double err = std::hypot(z.phi_lift - (orbit.psi[0] + kTwoPi * orbit.m),
                            z.theta - orbit.points[0].theta);

    PerturbedMeasurement pm;
    pm.closure_error = err;
    pm.orbit = orbit_from_polygon(map, orbit.m, orbit.psi, std::max(1e-8, 10 * err));
    pm.trace_measured = pm.orbit.trace;
    return pm;
}

SplitTangencyResult split_tangency(const Oval& oval, const TangencyRecord& tangency, double h,
                                   int footprint_iterations) {
    if (h == 0.0) {
        SplitTangencyResult out;
        out.perturbed_spec = oval.spec();
        out.radius = oval.radius_at_tangent_angle(tangency.location.phi);
        out.prediction = tangency_splitting_prediction(out.radius, tangency.location.theta,
                                                       tangency.slope, 0.0);
        return out;
    }
    const ToleranceConfig& cfg = oval.config();
    BilliardMap map(oval);
    double center = oval.native_from_tangent_angle(tangency.location.phi);

    // collect the native footprints of the tangency trajectory (both time
    // directions) and the periodic orbit's vertices
    std::vector<double> footprints;
    auto natives = vertex_native_params(oval, tangency.orbit);
    footprints.insert(footprints.end(), natives.begin(), natives.end());
    LiftedPhasePoint fwd{tangency.location.phi, tangency.location.theta};
    LiftedPhasePoint bwd = fwd;
    for (int k = 0; k < footprint_iterations; ++k) {
        fwd = map.forward_lifted(fwd);
        bwd = map.inverse_lifted(bwd);
        footprints.push_back(oval.native_from_tangent_angle(mod_2pi(fwd.phi_lift)));
        footprints.push_back(oval.native_from_tangent_angle(mod_2pi(bwd.phi_lift)));
    }
    double gap = min_cyclic_gap(center, footprints);
    if (gap < 1e-6) {
        std::string msg = "split_tangency: trajectory footprints collide with the tangency point "
                          "(closest approach " + std::to_string(gap) + ")";
        throw numerical_error("split_tangency", msg);
    }
    double half_width = cfg.bump_halfwidth_factor * gap;

    NormalBump bump{center, half_width, h};
    OvalSpec pspec = spec_with_bump(oval.spec(), bump);
    ValidationReport vr = Oval::check(pspec, cfg);
    if (!vr.valid)
        throw numerical_error("split_tangency",
                              "perturbation h=" + std::to_string(h) + " violates curvature positivity");

    SplitTangencyResult out;
    out.perturbed_spec = std::move(pspec);
    out.h = h;
    out.bump_center = center;
    out.bump_half_width = half_width;
    out.radius = oval.radius_at_tangent_angle(tangency.location.phi);
    out.prediction =
        tangency_splitting_prediction(out.radius, tangency.location.theta, tangency.slope, h);
    return out;
}

double c1_distance(const Oval& a, const Oval& b, int grid_phi, int grid_theta) {
    BilliardMap ma(a), mb(b);
    double worst = 0.0;
    for (int i = 0; i < grid_phi; ++i) {
        double phi = kTwoPi * i / grid_phi;
        for (int j = 1; j <= grid_theta; ++j) {
            double theta = kPi * j / (grid_theta + 1);
            PhasePoint p{phi, theta};
            PhasePoint qa = ma.forward(p), qb = mb.forward(p);
            TangentMap ja = ma.tangent_map(p), jb = mb.tangent_map(p);
            double dmap = cylinder_dist(qa.phi, qa.theta, qb.phi, qb.theta);
            double djac = (ja.m - jb.m).cwiseAbs().maxCoeff();
            worst = std::max(worst, dmap + djac);
        }
    }
    return worst;
}

}  // namespace obl
