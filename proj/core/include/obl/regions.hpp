#pragma once

#include <optional>
#include <vector>

#include "obl/manifolds.hpp"

namespace obl {

/// Truncated-limit rotation number estimate, normalized to [0, 1).
struct RotationEstimate {
    double value = 0.0;
    long iterations = 0;
    double error_bound = 0.0;  // tail-fluctuation based
};

RotationEstimate rotation_number(const BilliardMap& map, PhasePoint p, long iterations);

/// Rotational-invariant-curve candidate: a single-valued binned graph theta(phi).
struct RICCandidate {
    std::vector<double> theta_mean;  // per phi bin
    std::vector<double> theta_min;
    std::vector<double> theta_max;
    double lipschitz_estimate = 0.0;
    RotationEstimate rotation;
    bool crosses_midline = false;  // some bin straddles theta = pi/2 (suspect, Lemma-7 sense)
};

struct RICDetection {
    std::optional<RICCandidate> candidate;
    int underfilled_bins = 0;   // bins with fewer than the minimum sample count
    double max_bin_spread = 0.0;
};

RICDetection detect_ric(const BilliardMap& map, PhasePoint p, long iterations, int bins);

/// One island of stability: a connected component of the complement of the
/// manifold closure inside the region, permuted cyclically by the map.
struct Island {
    std::vector<std::pair<int, int>> cells;  // (phi bin, theta cell)
    int period = 0;                          // n_i >= 2; 0 if undetermined
    int rotation_m = 0;                      // rotation type m / period
    bool rotation_consistent = false;        // all samples agree
    std::optional<PeriodicOrbit> center_orbit;
    std::vector<std::string> diagnostics;
    double phi_center = 0.0, theta_center = 0.0;
};

/// Instability region: envelopes of the unstable-manifold closure plus islands.
struct InstabilityRegion {
    int bins = 0;
    int theta_cells = 0;
    std::vector<double> lower;   // c1 per bin (theta inf over manifold points)
    std::vector<double> upper;   // c2 per bin
    bool lower_is_boundary = false;  // degenerated to B_0
    bool upper_is_boundary = false;  // degenerated to B_pi
    std::vector<Island> islands;
    double arclength_budget = 0.0;
    long manifold_points = 0;
    std::vector<uint8_t> covered;  // bins x theta_cells occupancy of the manifold
    int cell_index(int b, int t) const { return b * theta_cells + t; }
};

struct RegionBudget {
    double arclength = 120.0;
    int max_points = 60000;
};

/// Build the smallest-cylinder approximation from the closure of W^u of a
/// hyperbolic orbit; typed error when the manifold fails to project onto every
/// phi bin within the budget (raise the budget).
InstabilityRegion build_instability_region(const BilliardMap& map, const PeriodicOrbit& orbit,
                                           const RegionBudget& budget, int bins, int theta_cells = 0);

/// Fill in island periods, rotation types and (when the variational search
/// succeeds) the interior periodic orbit. Non-fatal diagnostics on failure.
void analyze_islands(const BilliardMap& map, InstabilityRegion& region, int samples_per_island,
                     std::uint64_t seed = 1);

}  // namespace obl
