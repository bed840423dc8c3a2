#include "obl/billiard.hpp"

#include <cmath>
#include <string>

#include "obl/errors.hpp"

namespace obl {

TangentMap tangent_map_from_geometry(double x0, double x1, double chord) {
    TangentMap tm;
    tm.x0 = x0;
    tm.x1 = x1;
    tm.chord = chord;
    tm.m << (chord - x0) / x1, chord / x1, (chord - x0 - x1) / x1, (chord - x1) / x1;
    return tm;
}

void BilliardMap::require_admissible(PhasePoint p, const char* op) const {
    if (!(p.theta >= cfg_.theta_margin && p.theta <= kPi - cfg_.theta_margin))
        throw validation_error(std::string(op) + ": theta " + std::to_string(p.theta) +
                               " outside the admissible range [" + std::to_string(cfg_.theta_margin) +
                               ", pi - " + std::to_string(cfg_.theta_margin) + "]");
}

BilliardMap::Bounce BilliardMap::bounce(PhasePoint p) const {
    require_admissible(p, "forward_map");
    double phi0 = mod_2pi(p.phi);
    double u0 = oval_.native_from_tangent_angle(phi0);
    Vec2 p0 = oval_.position(u0);
    Vec2 dir = unit_from_angle(phi0 + p.theta);

    // f(du) = cross(dir, position(u0 + du) - p0) has exactly one sign change on
    // (0, 2pi): negative before the second intersection of the ray line,
    // positive after (strict convexity). Safeguarded Newton against that
    // bracket; the bracket endpoints 0 and 2pi are virtual roots never touched.
    auto f = [&](double du) { return cross2(dir, oval_.position(u0 + du) - p0); };
    auto fprime = [&](double du) {
        Vec2 d1, d2;
        oval_.derivatives(u0 + du, d1, d2);
        return cross2(dir, d1);
    };

    double lo = 0.0, hi = kTwoPi;
    double du = 2.0 * p.theta;  // exact on a circle, decent elsewhere
    if (!(du > 0.0 && du < kTwoPi)) du = kPi;
    bool converged = false;
    double fv = 0.0;
    for (int it = 0; it < cfg_.impact_max_iter; ++it) {
        fv = f(du);
        if (fv < 0.0)
            lo = du;
        else
            hi = du;
        double fp = fprime(du);
        double step = (fp != 0.0) ? fv / fp : 0.0;
        double next = du - step;
        if (!(next > lo && next < hi) || fp == 0.0) {
            next = 0.5 * (lo + hi);
            step = next - du;
        }
        du = next;
        if (std::abs(step) < cfg_.impact_tol || hi - lo < cfg_.impact_tol) {
            converged = true;
            break;
        }
    }
    if (!converged && hi - lo > 1e3 * cfg_.impact_tol)
        throw numerical_error("forward_map",
                              "next-impact solver failed to bracket the second intersection "
                              "(phi=" + std::to_string(p.phi) + ", theta=" + std::to_string(p.theta) +
                              ", bracket width " + std::to_string(hi - lo) + ")");

    Bounce b;
    b.u0 = u0;
    b.u1 = u0 + du;  // may exceed 2pi; position/eval reduce internally
    b.p0 = p0;
    CurvePoint cp1 = oval_.eval_point(b.u1);
    b.p1 = cp1.position;
    Vec2 chord_vec = b.p1 - p0;
    b.chord = chord_vec.norm();
    // outgoing angle from the chord and the tangent at the new point
    double theta1 = std::atan2(cross2(dir, cp1.tangent), dir.dot(cp1.tangent));
    b.next.phi = cp1.tangent_angle;
    b.next.theta = theta1;
    b.phi_increment = oval_.tangent_angle_lift(b.u1) - oval_.tangent_angle_lift(u0);
    CurvePoint cp0 = oval_.eval_point(u0);
    b.x0 = cp0.radius * std::sin(p.theta);
    b.x1 = cp1.radius * std::sin(theta1);
    b.u1 = mod_2pi(b.u1);
    return b;
}

PhasePoint BilliardMap::forward(PhasePoint p) const { return bounce(p).next; }

PhasePoint BilliardMap::inverse(PhasePoint p) const {
    require_admissible(p, "inverse_map");
    return reversal(forward(reversal(p)));
}

LiftedPhasePoint BilliardMap::forward_lifted(LiftedPhasePoint p) const {
    Bounce b = bounce(p.project());
    return {p.phi_lift + b.phi_increment, b.next.theta};
}

LiftedPhasePoint BilliardMap::inverse_lifted(LiftedPhasePoint p) const {
    // H-conjugation: the forward step from H(p) advances by 2pi minus the
    // backward decrement of T^{-1} at p
    Bounce b = bounce(reversal(p.project()));
    return {p.phi_lift + b.phi_increment - kTwoPi, kPi - b.next.theta};
}

std::vector<LiftedPhasePoint> BilliardMap::iterate(LiftedPhasePoint p, long n) const {
    std::vector<LiftedPhasePoint> out;
    out.reserve(static_cast<size_t>(std::abs(n)) + 1);
    out.push_back(p);
    for (long i = 0; i < std::labs(n); ++i) {
        try {
            p = (n > 0) ? forward_lifted(p) : inverse_lifted(p);
        } catch (const numerical_error& e) {
            throw numerical_error("iterate", "step " + std::to_string(i + 1) + ": " + e.what());
        }
        out.push_back(p);
    }
    return out;
}

TangentMap BilliardMap::tangent_map(PhasePoint p) const {
    Bounce b = bounce(p);
    return tangent_map_from_geometry(b.x0, b.x1, b.chord);
}

double BilliardMap::measure_weight(PhasePoint p) const {
    return oval_.radius_at_tangent_angle(p.phi) * std::sin(p.theta);
}

}  // namespace obl
