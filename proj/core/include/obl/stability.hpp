#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obl/billiard.hpp"

namespace obl {

enum class StabilityClass { elliptic, hyperbolic, inverse_hyperbolic, degenerate };

const char* to_string(StabilityClass c);
std::optional<StabilityClass> stability_class_from_string(const std::string& s);

/// Classify a monodromy trace: |tr| < 2 elliptic, tr > 2 hyperbolic,
/// tr < -2 inverse hyperbolic, |tr -+ 2| <= tol degenerate.
StabilityClass classify(double trace, double tol = 1e-8);

/// An (m,n)-periodic orbit with its per-vertex geometry and monodromy.
struct PeriodicOrbit {
    int m = 1;
    int n = 2;
    std::vector<double> psi;          // n lifted tangent angles, strictly increasing
    std::vector<PhasePoint> points;   // phase points (psi mod 2pi, theta)
    std::vector<double> radius;       // R_i at each vertex
    std::vector<double> x;            // x_i = R_i sin theta_i
    std::vector<double> chord;        // l_i from vertex i to i+1 (cyclic)
    Mat2 monodromy = Mat2::Identity();
    double trace = 2.0;
    StabilityClass cls = StabilityClass::degenerate;
    double action = 0.0;              // G_{m,n} value = -perimeter
    bool repetition = false;          // primitive period strictly divides n

    double perimeter() const {
        double s = 0.0;
        for (double l : chord) s += l;
        return s;
    }
};

/// Ordered product of per-bounce tangent maps around the cycle, starting at
/// vertex `start`: DT(p_{start+n-1}) ... DT(p_start). Different starting
/// vertices give conjugate matrices with the same trace.
Mat2 monodromy_from_orbit(const PeriodicOrbit& orbit, int start = 0);

/// Trace of the monodromy product built from raw per-vertex data, optionally
/// overriding one x_i with a synthetic value. Exposed so that synthetic
/// vertex chains (not realizable on any curve) can be analyzed in tests.
double monodromy_trace_from_data(const std::vector<double>& chord, const std::vector<double>& x,
                                 int override_site = -1, double override_value = 0.0);

/// tr(DT^n) as a function of x_i is exactly affine in 1/x_i:
/// tr = b_i / x_i + c_i with b_i, c_i independent of x_i.
struct TraceDecomposition {
    int site = 0;
    double b = 0.0;
    double c = 0.0;
    /// Set when every b_i (i = 1..n-1) vanishes; the trace then collapses to
    /// (-1)^(n-1) * 2 * (perimeter / x_0 - 1).
    std::optional<double> perimeter_fallback;
};

/// Compute (b_i, c_i) by evaluating the cycle trace at two synthetic values of
/// x_i and verifying affinity at a third (hard error on failure: the affinity
/// is exact algebra, so a violation indicates a bug).
TraceDecomposition trace_decomposition(const PeriodicOrbit& orbit, int site,
                                       double affinity_tol = 1e-10);

/// Same, from raw vertex data.
TraceDecomposition trace_decomposition_from_data(const std::vector<double>& chord,
                                                 const std::vector<double>& x, int site,
                                                 double affinity_tol = 1e-10);

/// Recompute monodromy/trace/class of an orbit in place (used after building
/// the vertex data or after transplanting the polygon onto a perturbed oval).
void refresh_stability(PeriodicOrbit& orbit, double degeneracy_tol);

/// Build the full orbit record from its polygon (lifted tangent angles) on an
/// oval. Verifies the forward-map closure to `closure_tol` and throws
/// numerical_error on failure (a false critical point).
PeriodicOrbit orbit_from_polygon(const BilliardMap& map, int m, const std::vector<double>& psi,
                                 double closure_tol);

}  // namespace obl
