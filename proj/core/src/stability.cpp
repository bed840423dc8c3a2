#include "obl/stability.hpp"

#include <cmath>

#include "obl/errors.hpp"

namespace obl {

const char* to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::elliptic: return "elliptic";
        case StabilityClass::hyperbolic: return "hyperbolic";
        case StabilityClass::inverse_hyperbolic: return "inverse_hyperbolic";
        case StabilityClass::degenerate: return "degenerate";
    }
    return "?";
}

std::optional<StabilityClass> stability_class_from_string(const std::string& s) {
    if (s == "elliptic") return StabilityClass::elliptic;
    if (s == "hyperbolic") return StabilityClass::hyperbolic;
    if (s == "inverse_hyperbolic") return StabilityClass::inverse_hyperbolic;
    if (s == "degenerate") return StabilityClass::degenerate;
    return std::nullopt;
}

StabilityClass classify(double trace, double tol) {
    if (std::abs(trace - 2.0) <= tol || std::abs(trace + 2.0) <= tol) return StabilityClass::degenerate;
    if (trace > 2.0) return StabilityClass::hyperbolic;
    if (trace < -2.0) return StabilityClass::inverse_hyperbolic;
    return StabilityClass::elliptic;
}

Mat2 monodromy_from_orbit(const PeriodicOrbit& orbit, int start) {
    int n = orbit.n;
    Mat2 M = Mat2::Identity();
    for (int j = 0; j < n; ++j) {
        int i = (start + j) % n;
        int ip = (i + 1) % n;
        TangentMap tm = tangent_map_from_geometry(orbit.x[i], orbit.x[ip], orbit.chord[i]);
        M = tm.m * M;
    }
    return M;
}

double monodromy_trace_from_data(const std::vector<double>& chord, const std::vector<double>& x,
                                 int override_site, double override_value) {
    int n = static_cast<int>(chord.size());
    auto xv = [&](int i) {
        i = ((i % n) + n) % n;
        return (i == override_site) ? override_value : x[i];
    };
    Mat2 M = Mat2::Identity();
    for (int i = 0; i < n; ++i) {
        TangentMap tm = tangent_map_from_geometry(xv(i), xv(i + 1), chord[i]);
        M = tm.m * M;
    }
    return M.trace();
}

TraceDecomposition trace_decomposition_from_data(const std::vector<double>& chord,
                                                 const std::vector<double>& x, int site,
                                                 double affinity_tol) {
    int n = static_cast<int>(chord.size());
    if (site < 0 || site >= n) throw validation_error("trace_decomposition: site out of range");
    double xs = x[site];
    double v1 = 1.5 * xs, v2 = 0.75 * xs, v3 = 2.0 * xs;
    double t1 = monodromy_trace_from_data(chord, x, site, v1);
    double t2 = monodromy_trace_from_data(chord, x, site, v2);
    double t3 = monodromy_trace_from_data(chord, x, site, v3);
    double b = (t1 - t2) / (1.0 / v1 - 1.0 / v2);
    double c = t1 - b / v1;
    double resid = std::abs(t3 - (b / v3 + c));
    double scale = std::max({1.0, std::abs(t1), std::abs(t2), std::abs(t3)});
    if (resid > affinity_tol * scale)
        throw numerical_error("trace_decomposition",
                              "trace is not affine in 1/x_" + std::to_string(site) +
                                  " (residual " + std::to_string(resid) + "); this is exact algebra, "
                                  "so the monodromy assembly is broken");
    TraceDecomposition td;
    td.site = site;
    td.b = b;
    td.c = c;
    return td;
}

TraceDecomposition trace_decomposition(const PeriodicOrbit& orbit, int site, double affinity_tol) {
    return trace_decomposition_from_data(orbit.chord, orbit.x, site, affinity_tol);
}

void refresh_stability(PeriodicOrbit& orbit, double degeneracy_tol) {
    orbit.monodromy = monodromy_from_orbit(orbit, 0);
    orbit.trace = orbit.monodromy.trace();
    orbit.cls = classify(orbit.trace, degeneracy_tol);
}

PeriodicOrbit orbit_from_polygon(const BilliardMap& map, int m, const std::vector<double>& psi,
                                 double closure_tol) {
    const Oval& oval = map.oval();
    int n = static_cast<int>(psi.size());
    if (n < 2) throw validation_error("orbit_from_polygon: need at least 2 vertices");

    PeriodicOrbit orbit;
    orbit.m = m;
    orbit.n = n;
    orbit.psi = psi;
    orbit.points.resize(n);
    orbit.radius.resize(n);
    orbit.x.resize(n);
    orbit.chord.resize(n);

    std::vector<Vec2> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = oval.position_at_tangent_angle(mod_2pi(psi[i]));
    double perim = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec2 d = pos[(i + 1) % n] - pos[i];
        orbit.chord[i] = d.norm();
        if (orbit.chord[i] == 0.0)
            throw numerical_error("orbit_from_polygon", "coincident consecutive vertices");
        perim += orbit.chord[i];
    }
    orbit.action = -perim;

    for (int i = 0; i < n; ++i) {
        Vec2 out_dir = (pos[(i + 1) % n] - pos[i]) / orbit.chord[i];
        Vec2 tangent = unit_from_angle(mod_2pi(psi[i]));
        double theta = std::atan2(cross2(tangent, out_dir), tangent.dot(out_dir));
        orbit.points[i] = {mod_2pi(psi[i]), theta};
        orbit.radius[i] = oval.radius_at_tangent_angle(mod_2pi(psi[i]));
        orbit.x[i] = orbit.radius[i] * std::sin(theta);
    }

    // closure under the actual forward map
    LiftedPhasePoint z{psi[0], orbit.points[0].theta};
    for (int i = 0; i < n; ++i) z = map.forward_lifted(z);
    double err = std::hypot(z.phi_lift - (psi[0] + kTwoPi * m), z.theta - orbit.points[0].theta);
    if (err > closure_tol)
        throw numerical_error("orbit_from_polygon",
                              "orbit failed to close under the forward map (error " +
                                  std::to_string(err) + "); false critical point");

    refresh_stability(orbit, map.oval().config().degeneracy_tol);
    return orbit;
}

}  // namespace obl
