#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "obl/stability.hpp"

namespace obl {

/// Inscribed polygon candidate for an (m,n) orbit: n lifted tangent angles,
/// strictly increasing, with psi_n := psi_0 + 2 pi m implied.
struct PolygonConfig {
    int m = 1;
    int n = 2;
    std::vector<double> psi;
};

/// Critical point of G_{m,n} as returned by the search.
struct CriticalPoint {
    PolygonConfig config;
    double action = 0.0;
    double gradient_norm = 0.0;
    std::array<int, 3> hessian_signature{0, 0, 0};  // (negative, zero, positive)
    bool nondegenerate = true;
};

struct SearchOptions {
    int starts = 0;  // 0 -> 50 * n
    std::uint64_t seed = 1;
    double tol = 1e-10;  // ||grad||_inf at convergence
};

/// G_{m,n}(psi) = - sum of chord lengths (the paper's sign: its minima are
/// perimeter maxima).
double action(const Oval& oval, const PolygonConfig& config);

inline double perimeter_of(const Oval& oval, const PolygonConfig& config) {
    return -action(oval, config);
}

/// Analytic gradient: component i is -R(psi_i) (cos theta_in,i - cos theta_out,i).
Eigen::VectorXd action_gradient(const Oval& oval, const PolygonConfig& config);

/// Central finite differences of the analytic gradient (symmetrized).
Eigen::MatrixXd action_hessian(const Oval& oval, const PolygonConfig& config, double step = 1e-6);

struct FindOrbitsResult {
    std::vector<CriticalPoint> points;
    std::vector<std::string> warnings;
};

/// Multistart damped Newton on the action gradient over the ordered simplex
/// psi_0 < ... < psi_{n-1} < psi_0 + 2 pi m. Results are deduplicated modulo
/// cyclic shift, rejected unless at least one vertex angle lies in the band
/// [pi/n, (n-1) pi/n], and sorted by action.
FindOrbitsResult find_orbits(const Oval& oval, int m, int n, const SearchOptions& opts = {});

/// Convert a critical configuration into a full phase-space orbit; hard error
/// if the configuration does not close under the forward map.
PeriodicOrbit config_to_orbit(const Oval& oval, const PolygonConfig& config);

/// Newton refinement from a single seed; returns true on convergence.
bool refine_config(const Oval& oval, PolygonConfig& config, double tol, int max_iter);

}  // namespace obl
