#pragma once

#include <optional>
#include <string>
#include <vector>

#include "obl/stability.hpp"

namespace obl {

enum class BranchKind { unstable_plus, unstable_minus, stable_plus, stable_minus };

const char* to_string(BranchKind k);
std::optional<BranchKind> branch_kind_from_string(const std::string& s);

inline bool is_unstable(BranchKind k) {
    return k == BranchKind::unstable_plus || k == BranchKind::unstable_minus;
}

struct EigenDirections {
    Vec2 unstable{1, 0};
    Vec2 stable{0, 1};
    double lambda_u = 0.0;
    double lambda_s = 0.0;
};

/// Eigen-decomposition of a 2x2 monodromy with |trace| > 2 (typed error
/// otherwise). lambda_u lambda_s = 1; directions are unit eigenvectors.
EigenDirections eigen_directions(const Mat2& monodromy);

/// One branch of W^u or W^s of a hyperbolic periodic point, globalized from a
/// fundamental segment along the eigendirection. The polyline stores lifted
/// phi; eval() reconstructs any intermediate point exactly from the seed.
struct ManifoldBranch {
    PeriodicOrbit orbit;
    int point_index = 0;
    BranchKind kind = BranchKind::unstable_plus;
    double eigenvalue = 0.0;   // expansion rate along the branch under its map
    int map_power = 1;         // n (or 2n for inverse hyperbolic orbits)
    Vec2 seed_dir{1, 0};       // unit eigendirection, sign per kind
    double seed_offset = 0.0;  // epsilon
    LiftedPhasePoint base{0, 0};
    std::vector<LiftedPhasePoint> polyline;
    std::vector<double> arc;    // cumulative cylinder arclength
    std::vector<double> sigma;  // seed parameter of each polyline point
    bool complete = true;

    bool same_identity(const ManifoldBranch& o) const {
        return point_index == o.point_index && kind == o.kind && orbit.n == o.orbit.n &&
               orbit.m == o.orbit.m && std::abs(base.phi_lift - o.base.phi_lift) < 1e-12 &&
               std::abs(base.theta - o.base.theta) < 1e-12;
    }
};

struct BranchBudget {
    int max_points = 20000;
    double max_arclength = 50.0;
    double max_step_override = 0.0;  // 0: use the config's max_step
};

/// Globalize one branch. The seed parameter sigma >= epsilon indexes the
/// branch: point(sigma) = M^k(base + s * dir) with sigma = s * lambda^k.
ManifoldBranch grow_branch(const BilliardMap& map, const PeriodicOrbit& orbit, int point_index,
                           BranchKind kind, const BranchBudget& budget = {});

/// Evaluate a branch at an arbitrary seed parameter (sigma >= seed_offset).
LiftedPhasePoint branch_eval(const BilliardMap& map, const ManifoldBranch& b, double sigma);

struct HeteroclinicPoint {
    PhasePoint location;
    double sigma_a = 0.0;       // branch parameters at the crossing
    double sigma_b = 0.0;
    double crossing_angle = 0.0;  // |angle| between the local tangent directions
    bool transversal = true;
    bool homoclinic = false;     // same periodic point on both branches
    double refine_residual = 0.0;
};

/// All transversal/tangential crossings of two branch polylines, refined by
/// re-evaluating the exact branch parameterizations. A branch never reports
/// crossings with itself.
std::vector<HeteroclinicPoint> find_intersections(const BilliardMap& map, const ManifoldBranch& a,
                                                  const ManifoldBranch& b, double angle_threshold);

/// Focusing distances d+- = R0 sin(theta0) / (1 +- slope) of the ray pencil of
/// a phase-space graph theta(phi) with theta'(phi0) = slope.
struct PencilSlopes {
    double radius = 1.0;
    double theta0 = kPi / 2;
    double slope = 0.0;
    double d_plus = 0.0;
    double d_minus = 0.0;
    bool plus_infinite = false;
    bool minus_infinite = false;
};
PencilSlopes focusing_distances(double radius, double theta0, double slope);

/// Perturbed-slope prediction at a tangency with common slope theta'_0 after a
/// normal bump of second derivative h at the tangency footpoint:
///   slope_u = theta'_0 + h (1 - theta'_0) / R0,
///   slope_s = theta'_0 - h (1 + theta'_0) / R0, gap exactly 2h/R0.
struct SplitSlopes {
    double slope_u = 0.0;
    double slope_s = 0.0;
    double gap = 0.0;
};
SplitSlopes tangency_splitting_prediction(double radius, double theta0, double slope, double h);

}  // namespace obl
