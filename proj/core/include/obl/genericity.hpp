#pragma once

#include <optional>
#include <vector>

#include "obl/manifolds.hpp"
#include "obl/stability.hpp"
#include "obl/variational.hpp"

namespace obl {

/// Result of scanning b_1, b_2, ... for the first usable perturbation site.
struct SiteReport {
    int site = 0;          // vertex index; 0 with fallback set means the perimeter route
    double b = 0.0;        // affine coefficients of trace = b/x + c at the site
    double c = 0.0;
    bool fallback = false; // every b_i (i=1..n-1) vanished below threshold
    double fallback_trace = 0.0;  // (-1)^(n-1) 2 (perimeter/x_0 - 1) when fallback
};

/// Scan sites i = 1..n-1 for |b_i| > threshold; fall back to the perimeter
/// form at vertex 0 when all vanish. Deterministic.
SiteReport select_perturbation_site(const PeriodicOrbit& orbit, double threshold);

/// Output of the degeneracy-breaking construction (Lemma-5 style bump).
struct BreakDegeneracyResult {
    OvalSpec perturbed_spec;
    SiteReport site;
    double h = 0.0;              // applied bump second derivative (signed)
    double bump_center = 0.0;    // native parameter of the bump
    double bump_half_width = 0.0;
    double trace_before = 0.0;
    /// First-order prediction: affine model with the linearized curvature
    /// update R -> R - h. This is the constructive estimate whose error
    /// shrinks quadratically in h.
    double trace_predicted = 0.0;
    /// Affine model with the exactly recomputed perturbed curvature
    /// R -> R^2/(R+h); matches the measured trace to numerical precision.
    double trace_predicted_exact = 0.0;
};

/// Bump one vertex of a degenerate orbit so the orbit persists (contact of
/// order one) but its trace leaves +-2. If h is nonzero its magnitude is used
/// and the sign is chosen to move the trace away from the degenerate value;
/// h = 0 asks for an automatic amplitude (largest safe value, 50% margin,
/// capped). Hard errors: orbit not degenerate, bump support capturing a
/// second vertex, curvature turning non-positive.
BreakDegeneracyResult break_degeneracy(const Oval& oval, const PeriodicOrbit& orbit, double h);

/// Measured follow-up: transplant the (unchanged) polygon onto the perturbed
/// oval, verify closure under its map, and recompute the monodromy trace.
struct PerturbedMeasurement {
    double closure_error = 0.0;
    double trace_measured = 0.0;
    PeriodicOrbit orbit;  // the orbit as realized on the perturbed oval
};
PerturbedMeasurement measure_on_perturbed(const Oval& perturbed, const PeriodicOrbit& orbit);

/// Tangency data for split_tangency: the phase point, the common slope
/// d theta / d phi of the two invariant curves there, and the hyperbolic
/// orbit whose curves meet.
struct TangencyRecord {
    PhasePoint location;
    double slope = 0.0;
    PeriodicOrbit orbit;
};

struct SplitTangencyResult {
    OvalSpec perturbed_spec;
    double h = 0.0;
    double bump_center = 0.0;
    double bump_half_width = 0.0;
    double radius = 0.0;  // R0 at the tangency footpoint
    SplitSlopes prediction;
};

/// Bump the tangency footpoint (Lemma-6 style): the heteroclinic trajectory is
/// preserved, the two invariant curves' slopes split by exactly 2h/R0 to first
/// order. The bump support must avoid every other footprint of the tangency
/// trajectory and all periodic-orbit vertices; hard error otherwise.
SplitTangencyResult split_tangency(const Oval& oval, const TangencyRecord& tangency, double h,
                                   int footprint_iterations = 200);

/// sup over a phase grid of map-image distance plus tangent-map entry
/// distance; the C1-closeness diagnostic between two ovals.
double c1_distance(const Oval& a, const Oval& b, int grid_phi = 48, int grid_theta = 24);

}  // namespace obl
