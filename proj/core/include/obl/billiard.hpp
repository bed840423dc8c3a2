#pragma once

#include <vector>

#include "obl/config.hpp"
#include "obl/geom.hpp"
#include "obl/oval.hpp"

namespace obl {

/// Point of the billiard phase space: phi is the tangent angle of the impact
/// point in [0, 2pi), theta the outgoing direction angle measured from the
/// oriented tangent, strictly inside (0, pi).
struct PhasePoint {
    double phi = 0.0;
    double theta = kPi / 2;
};

/// Phase point on the universal cover: phi unreduced.
struct LiftedPhasePoint {
    double phi_lift = 0.0;
    double theta = kPi / 2;

    PhasePoint project() const { return {mod_2pi(phi_lift), theta}; }
};

/// The reversing symmetry H(phi, theta) = (phi, pi - theta).
inline PhasePoint reversal(PhasePoint p) { return {p.phi, kPi - p.theta}; }

/// Per-bounce derivative of the map in (phi, theta) coordinates, built from
/// x_j = R(phi_j) sin(theta_j) and the chord length l:
///   DT = (1/x1) [[l - x0, l], [l - x0 - x1, l - x1]].
/// det = x0/x1 and the (1,2) entry l/x1 is the (positive) twist.
struct TangentMap {
    Mat2 m = Mat2::Identity();
    double x0 = 0.0;
    double x1 = 0.0;
    double chord = 0.0;
};

TangentMap tangent_map_from_geometry(double x0, double x1, double chord);

/// The billiard map on a compiled oval. Pure const methods, thread-safe.
class BilliardMap {
public:
    explicit BilliardMap(const Oval& oval) : BilliardMap(oval, oval.config()) {}
    BilliardMap(const Oval& oval, const ToleranceConfig& cfg) : oval_(oval), cfg_(cfg) {}

    const Oval& oval() const { return oval_; }

    PhasePoint forward(PhasePoint p) const;
    PhasePoint inverse(PhasePoint p) const;

    /// Forward step with the lifted tangent-angle increment (in (0, 2pi)).
    LiftedPhasePoint forward_lifted(LiftedPhasePoint p) const;
    LiftedPhasePoint inverse_lifted(LiftedPhasePoint p) const;

    /// n >= 0 forward, n < 0 backward. Returns n+1 points including the input.
    std::vector<LiftedPhasePoint> iterate(LiftedPhasePoint p, long n) const;

    TangentMap tangent_map(PhasePoint p) const;

    /// Invariant density in (phi, theta) coordinates: R(phi) sin(theta).
    double measure_weight(PhasePoint p) const;

    /// Full bounce record used by stability/manifold code.
    struct Bounce {
        PhasePoint next;
        double phi_increment = 0.0;  // lifted tangent-angle advance, in (0, 2pi)
        double u0 = 0.0, u1 = 0.0;   // native parameters of the two impact points
        Vec2 p0{0, 0}, p1{0, 0};
        double chord = 0.0;
        double x0 = 0.0, x1 = 0.0;
    };
    Bounce bounce(PhasePoint p) const;

private:
    const Oval& oval_;
    ToleranceConfig cfg_;

    void require_admissible(PhasePoint p, const char* op) const;
};

}  // namespace obl
