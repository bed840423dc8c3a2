#include "obl/regions.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "obl/errors.hpp"
#include "obl/variational.hpp"

namespace obl {

RotationEstimate rotation_number(const BilliardMap& map, PhasePoint p, long iterations) {
    if (iterations < 100) throw validation_error("rotation_number: need at least 100 iterations");
    LiftedPhasePoint z{p.phi, p.theta};
    double phi0 = z.phi_lift;
    double inc_min = kTwoPi, inc_max = 0.0;
    double value_half = 0.0;
    long half = iterations / 2;
    for (long k = 1; k <= iterations; ++k) {
        double before = z.phi_lift;
        z = map.forward_lifted(z);
        double inc = z.phi_lift - before;
        inc_min = std::min(inc_min, inc);
        inc_max = std::max(inc_max, inc);
        if (k == half) value_half = (z.phi_lift - phi0) / (kTwoPi * half);
    }
    RotationEstimate est;
    est.iterations = iterations;
    est.value = (z.phi_lift - phi0) / (kTwoPi * iterations);
    est.error_bound = std::abs(est.value - value_half) + (inc_max - inc_min) / (kTwoPi * iterations);
    est.value -= std::floor(est.value);
    return est;
}

RICDetection detect_ric(const BilliardMap& map, PhasePoint p, long iterations, int bins) {
    const ToleranceConfig& cfg = map.oval().config();
    RICDetection det;
    std::vector<int> count(bins, 0);
    std::vector<double> tmin(bins, std::numeric_limits<double>::infinity());
    std::vector<double> tmax(bins, -std::numeric_limits<double>::infinity());
    std::vector<double> tsum(bins, 0.0);

    LiftedPhasePoint z{p.phi, p.theta};
    double phi0 = z.phi_lift;
    for (long k = 0; k < iterations; ++k) {
        int b = std::min(static_cast<int>(mod_2pi(z.phi_lift) / kTwoPi * bins), bins - 1);
        count[b]++;
        tmin[b] = std::min(tmin[b], z.theta);
        tmax[b] = std::max(tmax[b], z.theta);
        tsum[b] += z.theta;
        z = map.forward_lifted(z);
    }
    double rotation_raw = (z.phi_lift - phi0) / (kTwoPi * iterations);

    for (int b = 0; b < bins; ++b)
        if (count[b] < cfg.ric_min_bin_count) det.underfilled_bins++;
    for (int b = 0; b < bins; ++b)
        if (count[b] > 0) det.max_bin_spread = std::max(det.max_bin_spread, tmax[b] - tmin[b]);
    if (det.underfilled_bins > 0) return det;
    if (det.max_bin_spread > cfg.ric_gap) return det;

    RICCandidate cand;
    cand.theta_mean.resize(bins);
    cand.theta_min = tmin;
    cand.theta_max = tmax;
    for (int b = 0; b < bins; ++b) cand.theta_mean[b] = tsum[b] / count[b];
    double binw = kTwoPi / bins;
    for (int b = 0; b < bins; ++b) {
        double d = std::abs(cand.theta_mean[(b + 1) % bins] - cand.theta_mean[b]);
        cand.lipschitz_estimate = std::max(cand.lipschitz_estimate, d / binw);
    }
    for (int b = 0; b < bins; ++b)
        if (tmin[b] - 1e-12 <= kPi / 2 && tmax[b] + 1e-12 >= kPi / 2) cand.crosses_midline = true;
    cand.rotation.value = rotation_raw - std::floor(rotation_raw);
    cand.rotation.iterations = iterations;
    det.candidate = std::move(cand);
    return det;
}

namespace {

struct SampleSink {
    int bins, cells;
    std::vector<double>& lower;
    std::vector<double>& upper;
    std::vector<uint8_t>& covered;
    std::vector<long>& bin_points;
    long count = 0;

    void point(double phi, double theta) {
        double pm = mod_2pi(phi);
        int b = std::min(static_cast<int>(pm / kTwoPi * bins), bins - 1);
        lower[b] = std::min(lower[b], theta);
        upper[b] = std::max(upper[b], theta);
        double t = std::clamp(theta / kPi, 0.0, 1.0 - 1e-12);
        covered[b * cells + static_cast<int>(t * cells)] = 1;
        bin_points[b]++;
        ++count;
    }

    // rasterize a short segment so the flood fill sees a solid wall
    void segment(const LiftedPhasePoint& a, const LiftedPhasePoint& c, double max_len) {
        double len = std::hypot(c.phi_lift - a.phi_lift, c.theta - a.theta);
        if (len > max_len) {
            point(a.phi_lift, a.theta);
            point(c.phi_lift, c.theta);
            return;
        }
        int steps = std::max(1, static_cast<int>(len / (kPi / cells) * 2));
        for (int s = 0; s <= steps; ++s) {
            double t = static_cast<double>(s) / steps;
            point(a.phi_lift + t * (c.phi_lift - a.phi_lift), a.theta + t * (c.theta - a.theta));
        }
    }
};

}  // namespace

InstabilityRegion build_instability_region(const BilliardMap& map, const PeriodicOrbit& orbit,
                                           const RegionBudget& budget, int bins, int theta_cells) {
    const ToleranceConfig& cfg = map.oval().config();
    if (bins <= 0) bins = cfg.region_bins;
    if (theta_cells <= 0) theta_cells = cfg.region_theta_cells;
    if (orbit.cls != StabilityClass::hyperbolic)
        throw numerical_error("build_instability_region",
                              "orbit is not hyperbolic (class " + std::string(to_string(orbit.cls)) + ")");

    InstabilityRegion region;
    region.bins = bins;
    region.theta_cells = theta_cells;
    region.arclength_budget = budget.arclength;
    region.lower.assign(bins, std::numeric_limits<double>::infinity());
    region.upper.assign(bins, -std::numeric_limits<double>::infinity());
    region.covered.assign(static_cast<size_t>(bins) * theta_cells, 0);
    std::vector<long> bin_points(bins, 0);
    SampleSink sink{bins, theta_cells, region.lower, region.upper, region.covered, bin_points};

    BranchBudget bb;
    bb.max_arclength = budget.arclength;
    bb.max_points = budget.max_points;
    const double raster_max = 3.0 * kTwoPi / bins;
    for (BranchKind kind : {BranchKind::unstable_plus, BranchKind::unstable_minus}) {
        ManifoldBranch br = grow_branch(map, orbit, 0, kind, bb);
        // the branch itself, then its images under T^j: the unstable manifolds
        // of the other orbit points, obtained by mapping rather than regrowth
        std::vector<LiftedPhasePoint> pts = br.polyline;
        for (int j = 0; j < orbit.n; ++j) {
            for (size_t i = 0; i + 1 < pts.size(); ++i) sink.segment(pts[i], pts[i + 1], raster_max);
            if (!pts.empty()) sink.point(pts.back().phi_lift, pts.back().theta);
            if (j + 1 < orbit.n)
                for (auto& z : pts) z = map.forward_lifted(z);
        }
    }
    region.manifold_points = sink.count;

    int empty = 0;
    for (int b = 0; b < bins; ++b)
        if (bin_points[b] == 0) ++empty;
    if (empty > 0)
        throw numerical_error("build_instability_region",
                              std::to_string(empty) + " of " + std::to_string(bins) +
                                  " phi bins received no unstable-manifold points; raise the "
                                  "arclength budget");

    // boundary degeneration per the theorem's B_0 / B_pi cases
    double lo = *std::min_element(region.lower.begin(), region.lower.end());
    double hi = *std::max_element(region.upper.begin(), region.upper.end());
    if (lo < cfg.boundary_degenerate_theta) {
        region.lower_is_boundary = true;
        std::fill(region.lower.begin(), region.lower.end(), 0.0);
    }
    if (hi > kPi - cfg.boundary_degenerate_theta) {
        region.upper_is_boundary = true;
        std::fill(region.upper.begin(), region.upper.end(), kPi);
    }

    // flood fill the uncovered cells between the envelopes (phi wraps)
    const int NB = bins, NT = theta_cells;
    std::vector<int> label(static_cast<size_t>(NB) * NT, -1);
    auto inside = [&](int b, int t) {
        double theta_lo = kPi * t / NT, theta_hi = kPi * (t + 1) / NT;
        return theta_hi > region.lower[b] && theta_lo < region.upper[b];
    };
    int next_label = 0;
    for (int b0 = 0; b0 < NB; ++b0) {
        for (int t0 = 0; t0 < NT; ++t0) {
            int idx0 = b0 * NT + t0;
            if (label[idx0] != -1 || region.covered[idx0] || !inside(b0, t0)) continue;
            std::vector<std::pair<int, int>> cells;
            std::deque<std::pair<int, int>> queue{{b0, t0}};
            label[idx0] = next_label;
            while (!queue.empty()) {
                auto [b, t] = queue.front();
                queue.pop_front();
                cells.emplace_back(b, t);
                const int nb[4] = {(b + 1) % NB, (b + NB - 1) % NB, b, b};
                const int nt[4] = {t, t, t + 1, t - 1};
                for (int k = 0; k < 4; ++k) {
                    if (nt[k] < 0 || nt[k] >= NT) continue;
                    int idx = nb[k] * NT + nt[k];
                    if (label[idx] != -1 || region.covered[idx] || !inside(nb[k], nt[k])) continue;
                    label[idx] = next_label;
                    queue.emplace_back(nb[k], nt[k]);
                }
            }
            ++next_label;
            if (static_cast<int>(cells.size()) < cfg.island_min_cells) continue;  // speckle
            Island isl;
            isl.cells = std::move(cells);
            double sp = 0, st = 0;  // phi mean via circular average
            double cx = 0, cy = 0;
            for (auto& [b, t] : isl.cells) {
                double phi = kTwoPi * (b + 0.5) / NB;
                cx += std::cos(phi);
                cy += std::sin(phi);
                st += kPi * (t + 0.5) / NT;
            }
            sp = mod_2pi(std::atan2(cy, cx));
            isl.phi_center = sp;
            isl.theta_center = st / isl.cells.size();
            region.islands.push_back(std::move(isl));
        }
    }
    return region;
}

void analyze_islands(const BilliardMap& map, InstabilityRegion& region, int samples_per_island,
                     std::uint64_t seed) {
    const ToleranceConfig& cfg = map.oval().config();
    const int NB = region.bins, NT = region.theta_cells;
    std::mt19937_64 rng(seed);

    for (Island& isl : region.islands) {
        // membership set for the period test
        std::vector<uint8_t> member(static_cast<size_t>(NB) * NT, 0);
        for (auto& [b, t] : isl.cells) member[b * NT + t] = 1;
        auto contains = [&](double phi, double theta) {
            int b = std::min(static_cast<int>(mod_2pi(phi) / kTwoPi * NB), NB - 1);
            int t = std::clamp(static_cast<int>(theta / kPi * NT), 0, NT - 1);
            return member[b * NT + t] != 0;
        };

        // spread samples over the island cells
        std::vector<LiftedPhasePoint> samples;
        int stride = std::max<size_t>(1, isl.cells.size() / samples_per_island);
        for (size_t i = 0; i < isl.cells.size() && static_cast<int>(samples.size()) < samples_per_island;
             i += stride) {
            auto [b, t] = isl.cells[i];
            samples.push_back({kTwoPi * (b + 0.5) / NB, kPi * (t + 0.5) / NT});
        }
        if (samples.empty()) continue;

        // period: least k with T^k mapping the samples back onto the component
        std::vector<LiftedPhasePoint> iter = samples;
        int period = 0;
        for (int k = 1; k <= cfg.island_max_period && period == 0; ++k) {
            int in_count = 0;
            bool fail = false;
            for (auto& z : iter) {
                try {
                    z = map.forward_lifted(z);
                } catch (const std::exception&) {
                    fail = true;
                    break;
                }
                if (contains(z.phi_lift, z.theta)) ++in_count;
            }
            if (fail) break;
            if (2 * in_count > static_cast<int>(iter.size())) period = k;
        }
        if (period == 0) {
            isl.diagnostics.push_back("period undetermined within " +
                                      std::to_string(cfg.island_max_period) + " iterations");
            continue;
        }
        isl.period = period;

        // rotation type m / period from the lift over many island periods
        const int reps = 60;
        bool consistent = true;
        int m_type = 0;
        for (size_t s = 0; s < samples.size(); ++s) {
            LiftedPhasePoint z = samples[s];
            double phi0 = z.phi_lift;
            long steps = static_cast<long>(period) * reps;
            for (long k = 0; k < steps; ++k) z = map.forward_lifted(z);
            double rho = (z.phi_lift - phi0) / (kTwoPi * reps * period);
            int m_est = static_cast<int>(std::lround(rho * period));
            if (s == 0) m_type = m_est;
            if (m_est != m_type || std::abs(rho - static_cast<double>(m_est) / period) >
                                       1.0 / (static_cast<double>(reps) * period))
                consistent = false;
        }
        isl.rotation_m = m_type;
        isl.rotation_consistent = consistent;
        if (!consistent) isl.diagnostics.push_back("rotation estimates disagree across samples");

        // try to locate the interior periodic orbit promised by the translation
        // theorem, Newton-refining configs seeded from island trajectories
        if (isl.period >= 2 && m_type >= 1 && m_type < isl.period) {
            bool found = false;
            for (size_t s = 0; s < samples.size() && !found; ++s) {
                LiftedPhasePoint z = samples[s];
                PolygonConfig c{m_type, isl.period, {}};
                c.psi.push_back(z.phi_lift);
                for (int k = 1; k < isl.period; ++k) {
                    z = map.forward_lifted(z);
                    c.psi.push_back(z.phi_lift);
                }
                if (!std::is_sorted(c.psi.begin(), c.psi.end())) continue;
                if (!refine_config(map.oval(), c, cfg.grad_tol, cfg.newton_max_iter)) continue;
                try {
                    PeriodicOrbit orb = config_to_orbit(map.oval(), c);
                    bool interior = false;
                    for (auto& p : orb.points)
                        if (contains(p.phi, p.theta)) interior = true;
                    if (interior) {
                        if (orb.n % isl.period != 0)
                            isl.diagnostics.push_back("interior orbit period " + std::to_string(orb.n) +
                                                      " is not a multiple of the island period");
                        isl.center_orbit = std::move(orb);
                        found = true;
                    }
                } catch (const std::exception&) {
                    continue;
                }
            }
            if (!found)
                isl.diagnostics.push_back("no interior periodic orbit located from the island seeds");
        }
        (void)rng;
    }
}

}  // namespace obl
