#include "obl/manifolds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "obl/errors.hpp"

namespace obl {

const char* to_string(BranchKind k) {
    switch (k) {
        case BranchKind::unstable_plus: return "unstable+";
        case BranchKind::unstable_minus: return "unstable-";
        case BranchKind::stable_plus: return "stable+";
        case BranchKind::stable_minus: return "stable-";
    }
    return "?";
}

std::optional<BranchKind> branch_kind_from_string(const std::string& s) {
    if (s == "unstable+" || s == "unstable_plus") return BranchKind::unstable_plus;
    if (s == "unstable-" || s == "unstable_minus") return BranchKind::unstable_minus;
    if (s == "stable+" || s == "stable_plus") return BranchKind::stable_plus;
    if (s == "stable-" || s == "stable_minus") return BranchKind::stable_minus;
    return std::nullopt;
}

EigenDirections eigen_directions(const Mat2& M) {
    double tr = M.trace();
    if (!(std::abs(tr) > 2.0))
        throw numerical_error("eigen_directions",
                              "matrix is not hyperbolic (trace " + std::to_string(tr) + ")");
    double disc = std::sqrt(tr * tr - 4.0);
    double lu = (tr > 0) ? 0.5 * (tr + disc) : 0.5 * (tr - disc);
    double ls = 1.0 / lu;  // det = 1
    auto eigvec = [&](double lam) {
        Vec2 v(M(0, 1), lam - M(0, 0));
        if (v.norm() < 1e-13 * std::abs(lam)) v = Vec2(lam - M(1, 1), M(1, 0));
        v.normalize();
        if (v.x() < 0 || (v.x() == 0 && v.y() < 0)) v = -v;
        return v;
    };
    EigenDirections e;
    e.lambda_u = lu;
    e.lambda_s = ls;
    e.unstable = eigvec(lu);
    e.stable = eigvec(ls);
    double ru = (M * e.unstable - lu * e.unstable).norm();
    double rs = (M * e.stable - ls * e.stable).norm();
    if (ru > 1e-10 * std::max(1.0, std::abs(lu)) || rs > 1e-10)
        throw numerical_error("eigen_directions", "eigenvector residual too large");
    return e;
}

namespace {

LiftedPhasePoint apply_power(const BilliardMap& map, LiftedPhasePoint z, int steps, bool fwd) {
    for (int i = 0; i < steps; ++i) z = fwd ? map.forward_lifted(z) : map.inverse_lifted(z);
    return z;
}

}  // namespace

LiftedPhasePoint branch_eval(const BilliardMap& map, const ManifoldBranch& b, double sigma) {
    double lam = b.eigenvalue;
    int k = 0;
    double s = sigma;
    while (s >= b.seed_offset * lam) {
        s /= lam;
        ++k;
    }
    LiftedPhasePoint z{b.base.phi_lift + s * b.seed_dir.x(), b.base.theta + s * b.seed_dir.y()};
    z = apply_power(map, z, k * b.map_power, is_unstable(b.kind));
    // each application of T^{+-map_power} near the orbit shifts the lift by
    // +-2 pi m (map_power / n); remove it so the lifted polyline is continuous
    double shift = (is_unstable(b.kind) ? 1.0 : -1.0) * kTwoPi * b.orbit.m *
                   (b.map_power / std::max(1, b.orbit.n));
    z.phi_lift -= k * shift;
    return z;
}

ManifoldBranch grow_branch(const BilliardMap& map, const PeriodicOrbit& orbit, int point_index,
                           BranchKind kind, const BranchBudget& budget) {
    const ToleranceConfig& cfg = map.oval().config();
    if (orbit.cls != StabilityClass::hyperbolic && orbit.cls != StabilityClass::inverse_hyperbolic)
        throw numerical_error("grow_branch", "orbit is not hyperbolic (trace " +
                                                 std::to_string(orbit.trace) + ")");

    Mat2 M = monodromy_from_orbit(orbit, point_index);
    EigenDirections eig = eigen_directions(M);

    ManifoldBranch b;
    b.orbit = orbit;
    b.point_index = point_index;
    b.kind = kind;
    b.map_power = orbit.n;
    double lam_grow;  // expansion along the branch under the branch's own map
    Vec2 dir;
    if (is_unstable(kind)) {
        dir = eig.unstable;
        lam_grow = eig.lambda_u;
    } else {
        dir = eig.stable;
        lam_grow = 1.0 / eig.lambda_s;  // expansion under the inverse map
    }
    if (lam_grow < 0) {  // inverse hyperbolic: work with the doubled map
        b.map_power = 2 * orbit.n;
        lam_grow = lam_grow * lam_grow;
    }
    b.eigenvalue = std::abs(lam_grow);
    b.seed_dir = (kind == BranchKind::unstable_minus || kind == BranchKind::stable_minus) ? -dir : dir;

    const double diam = std::hypot(kTwoPi, kPi);
    b.seed_offset = cfg.seed_offset_rel * diam;
    const auto& p = orbit.points[point_index];
    b.base = {p.phi, p.theta};

    // adaptive march in the seed parameter sigma
    const double max_step = budget.max_step_override > 0 ? budget.max_step_override : cfg.max_step;
    double sigma = b.seed_offset;
    LiftedPhasePoint prev = branch_eval(map, b, sigma);
    b.polyline.push_back(prev);
    b.arc.push_back(0.0);
    b.sigma.push_back(sigma);
    double dsigma = b.seed_offset * 0.1;
    b.complete = false;
    while (static_cast<int>(b.polyline.size()) < budget.max_points) {
        if (b.arc.back() >= budget.max_arclength) break;
        bool accepted = false;
        LiftedPhasePoint cand{};
        double step_len = 0.0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            double s_try = sigma + dsigma;
            cand = branch_eval(map, b, s_try);
            step_len = std::hypot(cand.phi_lift - prev.phi_lift, cand.theta - prev.theta);
            bool ok = step_len <= max_step;
            if (ok && b.polyline.size() >= 2) {
                const auto& pp = b.polyline[b.polyline.size() - 2];
                Vec2 v1(prev.phi_lift - pp.phi_lift, prev.theta - pp.theta);
                Vec2 v2(cand.phi_lift - prev.phi_lift, cand.theta - prev.theta);
                if (v1.norm() > 0 && v2.norm() > 0 && std::abs(angle_between(v1, v2)) > cfg.max_turn)
                    ok = false;
            }
            if (ok && step_len >= 0.25 * max_step) {
                sigma = s_try;
                accepted = true;
                break;
            }
            if (ok)
                dsigma *= 2.0;  // too short: stretch
            else
                dsigma *= 0.5;  // too long or too curved: shrink
            if (dsigma < 1e-16 * sigma) {
                sigma = s_try;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            // could not satisfy the spacing constraints; take the small step
            sigma += dsigma;
            cand = branch_eval(map, b, sigma);
            step_len = std::hypot(cand.phi_lift - prev.phi_lift, cand.theta - prev.theta);
        }
        if (cand.theta < cfg.theta_margin * 2 || cand.theta > kPi - cfg.theta_margin * 2) break;
        b.arc.push_back(b.arc.back() + step_len);
        b.polyline.push_back(cand);
        b.sigma.push_back(sigma);
        prev = cand;
        // aim the next step at ~70% of the spacing bound
        if (step_len > 0) dsigma *= std::clamp(0.7 * max_step / step_len, 0.5, 2.0);
    }
    if (b.arc.back() >= budget.max_arclength) b.complete = true;
    return b;
}

namespace {

struct SegRef {
    const ManifoldBranch* branch;
    int index;  // segment [index, index+1]
};

// Crossing of two segments on the cylinder; endpoints of b are shifted by a
// multiple of 2pi into a's window before the test.
bool segment_crossing(const LiftedPhasePoint& a0, const LiftedPhasePoint& a1, LiftedPhasePoint b0,
                      LiftedPhasePoint b1, double& ta, double& tb) {
    double mid = 0.5 * (a0.phi_lift + a1.phi_lift);
    double shift = kTwoPi * std::round((mid - 0.5 * (b0.phi_lift + b1.phi_lift)) / kTwoPi);
    b0.phi_lift += shift;
    b1.phi_lift += shift;
    Vec2 p(a0.phi_lift, a0.theta), r(a1.phi_lift - a0.phi_lift, a1.theta - a0.theta);
    Vec2 q(b0.phi_lift, b0.theta), s(b1.phi_lift - b0.phi_lift, b1.theta - b0.theta);
    double denom = cross2(r, s);
    if (denom == 0.0) return false;
    Vec2 d = q - p;
    ta = cross2(d, s) / denom;
    tb = cross2(d, r) / denom;
    return ta >= 0.0 && ta <= 1.0 && tb >= 0.0 && tb <= 1.0;
}

// Newton on F(sa, sb) = eval_a(sa) - eval_b(sb) with the phi difference
// wrapped; finite-difference Jacobian. Fills location, angle and residual.
void refine_crossing(const BilliardMap& map, const ManifoldBranch& a, const ManifoldBranch& b,
                     HeteroclinicPoint& hp, double tol) {
    auto eval_a = [&](double s) { return branch_eval(map, a, s); };
    auto eval_b = [&](double s) { return branch_eval(map, b, s); };
    double sa = hp.sigma_a, sb = hp.sigma_b;
    auto F = [&](double xa, double xb) {
        LiftedPhasePoint pa = eval_a(xa), pb = eval_b(xb);
        return Vec2(wrap_pm_pi(pa.phi_lift - pb.phi_lift), pa.theta - pb.theta);
    };
    Vec2 f = F(sa, sb);
    int stale = 0;
    for (int it = 0; it < 15 && f.norm() > tol && stale < 3; ++it) {
        double ha = std::max(1e-8 * sa, 1e-14), hb = std::max(1e-8 * sb, 1e-14);
        Vec2 fa = (F(sa + ha, sb) - F(sa - ha, sb)) / (2 * ha);
        Vec2 fb = (F(sa, sb + hb) - F(sa, sb - hb)) / (2 * hb);
        Mat2 J;
        J << fa.x(), fb.x(), fa.y(), fb.y();
        Vec2 step = J.fullPivLu().solve(-f);
        if (!step.allFinite()) break;
        bool improved = false;
        double damp = 1.0;
        for (int half = 0; half < 12; ++half) {
            double na = sa + damp * step.x(), nb = sb + damp * step.y();
            if (na > a.seed_offset && nb > b.seed_offset) {
                Vec2 fn = F(na, nb);
                if (fn.norm() < f.norm()) {
                    sa = na;
                    sb = nb;
                    f = fn;
                    improved = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        stale = improved ? 0 : stale + 1;
    }
    hp.sigma_a = sa;
    hp.sigma_b = sb;
    hp.refine_residual = f.norm();
    LiftedPhasePoint loc = eval_a(sa);
    hp.location = loc.project();
    // local tangent directions from central differences in sigma
    double ha = std::max(1e-6 * sa, 1e-12), hb = std::max(1e-6 * sb, 1e-12);
    LiftedPhasePoint ap = eval_a(sa + ha), am = eval_a(sa - ha);
    LiftedPhasePoint bp = eval_b(sb + hb), bm = eval_b(sb - hb);
    Vec2 ta(ap.phi_lift - am.phi_lift, ap.theta - am.theta);
    Vec2 tb(bp.phi_lift - bm.phi_lift, bp.theta - bm.theta);
    double ang = angle_between(ta, tb);
    // angle between unoriented lines, in [0, pi/2]
    ang = std::abs(wrap_pm_pi(ang));
    if (ang > kPi / 2) ang = kPi - ang;
    hp.crossing_angle = ang;
}

}  // namespace

std::vector<HeteroclinicPoint> find_intersections(const BilliardMap& map, const ManifoldBranch& a,
                                                  const ManifoldBranch& b, double angle_threshold) {
    std::vector<HeteroclinicPoint> out;
    if (a.same_identity(b)) return out;
    if (a.polyline.size() < 2 || b.polyline.size() < 2) return out;

    // hash b's segments by phi cell (mod 2pi) for near-linear pairing
    const double cell = 0.05;
    const long ncells = static_cast<long>(std::ceil(kTwoPi / cell));
    std::unordered_multimap<long, int> grid;
    auto cell_of = [&](double phi) {
        long c = static_cast<long>(std::floor(mod_2pi(phi) / cell));
        return std::min(c, ncells - 1);
    };
    for (size_t j = 0; j + 1 < b.polyline.size(); ++j) {
        long c0 = cell_of(b.polyline[j].phi_lift);
        long c1 = cell_of(b.polyline[j + 1].phi_lift);
        grid.emplace(c0, static_cast<int>(j));
        if (c1 != c0) grid.emplace(c1, static_cast<int>(j));
    }

    const ToleranceConfig& cfg = map.oval().config();
    for (size_t i = 0; i + 1 < a.polyline.size(); ++i) {
        long c0 = cell_of(a.polyline[i].phi_lift);
        long c1 = cell_of(a.polyline[i + 1].phi_lift);
        std::vector<long> cells{c0 - 1, c0, c0 + 1};
        if (c1 != c0) {
            cells.push_back(c1 - 1);
            cells.push_back(c1);
            cells.push_back(c1 + 1);
        }
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        std::vector<int> candidates;
        for (long c : cells) {
            long cc = ((c % ncells) + ncells) % ncells;
            auto range = grid.equal_range(cc);
            for (auto it = range.first; it != range.second; ++it) candidates.push_back(it->second);
        }
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        for (int j : candidates) {
            double ta, tb;
            if (!segment_crossing(a.polyline[i], a.polyline[i + 1], b.polyline[j], b.polyline[j + 1],
                                  ta, tb))
                continue;
            HeteroclinicPoint hp;
            hp.sigma_a = a.sigma[i] + ta * (a.sigma[i + 1] - a.sigma[i]);
            hp.sigma_b = b.sigma[j] + tb * (b.sigma[j + 1] - b.sigma[j]);
            refine_crossing(map, a, b, hp, cfg.intersection_tol);
            // a candidate whose refinement stalls above tolerance is a
            // discretization near-miss, not a crossing of the true curves
            if (hp.refine_residual > cfg.intersection_tol) continue;
            hp.transversal = std::abs(hp.crossing_angle) > angle_threshold;
            hp.homoclinic = (a.point_index == b.point_index);
            bool dup = false;
            for (const auto& q : out)
                if (cylinder_dist(q.location.phi, q.location.theta, hp.location.phi,
                                  hp.location.theta) < 1e-7)
                    dup = true;
            if (!dup) out.push_back(hp);
        }
    }
    std::sort(out.begin(), out.end(), [](const HeteroclinicPoint& x, const HeteroclinicPoint& y) {
        return x.sigma_a < y.sigma_a;
    });
    return out;
}

PencilSlopes focusing_distances(double radius, double theta0, double slope) {
    PencilSlopes ps;
    ps.radius = radius;
    ps.theta0 = theta0;
    ps.slope = slope;
    double num = radius * std::sin(theta0);
    double dp = 1.0 + slope, dm = 1.0 - slope;
    if (std::abs(dp) < 1e-12)
        ps.plus_infinite = true;
    else
        ps.d_plus = num / dp;
    if (std::abs(dm) < 1e-12)
        ps.minus_infinite = true;
    else
        ps.d_minus = num / dm;
    return ps;
}

SplitSlopes tangency_splitting_prediction(double radius, double /*theta0*/, double slope, double h) {
    SplitSlopes s;
    s.slope_u = slope + h * (1.0 - slope) / radius;
    s.slope_s = slope - h * (1.0 + slope) / radius;
    s.gap = 2.0 * h / radius;
    return s;
}

}  // namespace obl
