#include "obl/variational.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "obl/errors.hpp"

namespace obl {
namespace {

std::vector<Vec2> vertex_positions(const Oval& oval, const PolygonConfig& c) {
    std::vector<Vec2> pos(c.n);
    for (int i = 0; i < c.n; ++i) pos[i] = oval.position_at_tangent_angle(mod_2pi(c.psi[i]));
    return pos;
}

bool strictly_ordered(const PolygonConfig& c, double min_gap) {
    // every per-step advance must stay inside (0, 2pi): a gap at 2pi is a
    // coincident footpoint, beyond it the twist orientation is violated
    auto gap_ok = [&](double g) { return g >= min_gap && g <= kTwoPi - min_gap; };
    for (int i = 0; i + 1 < c.n; ++i)
        if (!gap_ok(c.psi[i + 1] - c.psi[i])) return false;
    return gap_ok((c.psi[0] + kTwoPi * c.m) - c.psi[c.n - 1]);
}

/// Map in-place to the canonical representative: psi_0 in [0, 2pi), preserving gaps.
void canonicalize(PolygonConfig& c) {
    double shift = mod_2pi(c.psi[0]) - c.psi[0];
    for (double& v : c.psi) v += shift;
}

/// Distance between two configs modulo cyclic shift (both canonical).
double config_distance(const PolygonConfig& a, const PolygonConfig& b) {
    if (a.n != b.n || a.m != b.m) return std::numeric_limits<double>::infinity();
    int n = a.n;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n; ++r) {
        // rotate b by r: vertex (r+i), lifted past the wrap by 2 pi m
        double base = b.psi[r];
        double off = mod_2pi(base) - base;
        double d = 0.0;
        for (int i = 0; i < n; ++i) {
            int j = r + i;
            double v = (j < n) ? b.psi[j] : b.psi[j - n] + kTwoPi * b.m;
            double w = v + off - a.psi[i];
            // compare on the circle of full configurations (2 pi translations identified)
            w = std::remainder(w, kTwoPi);
            d = std::max(d, std::abs(w));
        }
        best = std::min(best, d);
    }
    return best;
}

}  // namespace

double action(const Oval& oval, const PolygonConfig& c) {
    auto pos = vertex_positions(oval, c);
    double total = 0.0;
    for (int i = 0; i < c.n; ++i) total += (pos[(i + 1) % c.n] - pos[i]).norm();
    return -total;
}

Eigen::VectorXd action_gradient(const Oval& oval, const PolygonConfig& c) {
    auto pos = vertex_positions(oval, c);
    int n = c.n;
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) {
        Vec2 to_prev = pos[i] - pos[(i + n - 1) % n];
        Vec2 to_next = pos[(i + 1) % n] - pos[i];
        double lp = to_prev.norm(), ln = to_next.norm();
        if (lp == 0.0 || ln == 0.0)
            throw numerical_error("action_gradient", "coincident consecutive vertices");
        Vec2 tangent = unit_from_angle(mod_2pi(c.psi[i]));
        double r = oval.radius_at_tangent_angle(mod_2pi(c.psi[i]));
        double cos_in = to_prev.dot(tangent) / lp;
        double cos_out = to_next.dot(tangent) / ln;
        g(i) = -r * (cos_in - cos_out);
    }
    return g;
}

Eigen::MatrixXd action_hessian(const Oval& oval, const PolygonConfig& c, double step) {
    int n = c.n;
    Eigen::MatrixXd H(n, n);
    PolygonConfig work = c;
    for (int j = 0; j < n; ++j) {
        work.psi[j] = c.psi[j] + step;
        Eigen::VectorXd gp = action_gradient(oval, work);
        work.psi[j] = c.psi[j] - step;
        Eigen::VectorXd gm = action_gradient(oval, work);
        work.psi[j] = c.psi[j];
        H.col(j) = (gp - gm) / (2.0 * step);
    }
    return 0.5 * (H + H.transpose());
}

bool refine_config(const Oval& oval, PolygonConfig& c, double tol, int max_iter) {
    const double min_gap = oval.config().min_vertex_gap;
    if (!strictly_ordered(c, min_gap)) return false;
    // converge past tol: the map-closure check amplifies gradient residuals
    // by the monodromy entries
    const double target = std::max(1e-14, 1e-3 * tol);
    double mu = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd g = action_gradient(oval, c);
        double gn = g.lpNorm<Eigen::Infinity>();
        if (gn <= target) return true;
        Eigen::MatrixXd H = action_hessian(oval, c, oval.config().hessian_fd_step);

        // damped Newton with a Levenberg fallback when the step is rejected
        bool advanced = false;
        for (int attempt = 0; attempt < 8 && !advanced; ++attempt) {
            Eigen::MatrixXd Hd = H + mu * Eigen::MatrixXd::Identity(c.n, c.n);
            Eigen::VectorXd delta = Hd.fullPivLu().solve(-g);
            if (!delta.allFinite()) {
                mu = (mu == 0.0) ? 1e-6 : mu * 10.0;
                continue;
            }
            double scale = 1.0;
            for (int half = 0; half < 30; ++half) {
                PolygonConfig trial = c;
                for (int i = 0; i < c.n; ++i) trial.psi[i] += scale * delta(i);
                if (strictly_ordered(trial, min_gap)) {
                    double gn_trial = action_gradient(oval, trial).lpNorm<Eigen::Infinity>();
                    if (gn_trial < gn || scale * delta.lpNorm<Eigen::Infinity>() < 1e-15) {
                        c = trial;
                        advanced = true;
                        mu *= 0.3;
                        break;
                    }
                }
                scale *= 0.5;
            }
            if (!advanced) mu = (mu == 0.0) ? 1e-6 : mu * 10.0;
        }
        if (!advanced) return false;
    }
    return action_gradient(oval, c).lpNorm<Eigen::Infinity>() <= tol;
}

FindOrbitsResult find_orbits(const Oval& oval, int m, int n, const SearchOptions& opts) {
    if (!(m >= 1 && m < n)) throw validation_error("find_orbits: need 1 <= m < n");
    const ToleranceConfig& cfg = oval.config();
    FindOrbitsResult out;

    int starts = opts.starts > 0 ? opts.starts : 50 * n;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    std::vector<PolygonConfig> found;
    int converged_count = 0;

    auto consider = [&](PolygonConfig c) {
        try {
            if (!refine_config(oval, c, opts.tol, cfg.newton_max_iter)) return;
        } catch (const numerical_error&) {
            return;  // degenerate seed; never fatal for the search
        }
        ++converged_count;
        canonicalize(c);
        if (!strictly_ordered(c, cfg.min_vertex_gap)) return;
        // every step's tangent-angle advance must stay inside (0, 2pi)
        for (int i = 0; i < n; ++i) {
            double gap = (i + 1 < n ? c.psi[i + 1] : c.psi[0] + kTwoPi * m) - c.psi[i];
            if (gap >= kTwoPi - cfg.min_vertex_gap) return;
        }
        // Prop-3 band: at least one vertex angle in [pi/n, (n-1) pi/n]
        PeriodicOrbit probe;
        try {
            probe = orbit_from_polygon(BilliardMap(oval), m, c.psi, 10.0 * std::max(opts.tol, 1e-12));
        } catch (const numerical_error&) {
            return;  // spurious: does not close under the map
        }
        bool in_band = false;
        for (const auto& p : probe.points)
            if (p.theta >= kPi / n - 1e-12 && p.theta <= (n - 1) * kPi / n + 1e-12) in_band = true;
        if (!in_band) return;
        for (const auto& f : found)
            if (config_distance(f, c) <= cfg.dedup_tol) return;
        found.push_back(std::move(c));
    };

    // a few aligned uniform polygons catch the symmetric orbits cheaply
    for (int k = 0; k < 4; ++k) {
        PolygonConfig c{m, n, {}};
        double base = 0.5 * kPi * k / n;
        for (int i = 0; i < n; ++i) c.psi.push_back(base + kTwoPi * m * i / n);
        consider(std::move(c));
    }

    for (int s = 0; s < starts; ++s) {
        PolygonConfig c{m, n, {}};
        double psi0 = kTwoPi * (s + u01(rng)) / starts;  // stratified in psi_0
        std::vector<double> gaps(n);
        double sum = 0.0;
        for (double& gv : gaps) {
            gv = -std::log(std::max(u01(rng), 1e-300));
            sum += gv;
        }
        double acc = psi0;
        for (int i = 0; i < n; ++i) {
            c.psi.push_back(acc);
            acc += gaps[i] / sum * kTwoPi * m;
        }
        consider(std::move(c));
    }

    if (found.empty()) {
        out.warnings.push_back("no critical point found after " + std::to_string(starts) +
                               " starts (" + std::to_string(converged_count) +
                               " converged but were rejected or duplicated)");
        return out;
    }

    for (auto& c : found) {
        CriticalPoint cp;
        cp.action = action(oval, c);
        cp.gradient_norm = action_gradient(oval, c).lpNorm<Eigen::Infinity>();
        Eigen::MatrixXd H = action_hessian(oval, c, cfg.hessian_fd_step);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        for (int i = 0; i < n; ++i) {
            double ev = es.eigenvalues()(i);
            if (std::abs(ev) <= cfg.hessian_zero_tol * scale)
                cp.hessian_signature[1]++;
            else if (ev < 0)
                cp.hessian_signature[0]++;
            else
                cp.hessian_signature[2]++;
        }
        cp.nondegenerate = (cp.hessian_signature[1] == 0);
        cp.config = std::move(c);
        out.points.push_back(std::move(cp));
    }
    std::sort(out.points.begin(), out.points.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.action < b.action; });
    return out;
}

PeriodicOrbit config_to_orbit(const Oval& oval, const PolygonConfig& c) {
    BilliardMap map(oval);
    double tol = 10.0 * std::max(oval.config().grad_tol, 1e-12);
    PeriodicOrbit orbit = orbit_from_polygon(map, c.m, c.psi, tol);
    orbit.action = action(oval, c);

    // sub-period closure: tag repetitions of shorter orbits
    for (int p = 1; p < c.n; ++p) {
        if (c.n % p != 0) continue;
        if ((static_cast<long>(p) * c.m) % c.n != 0) continue;
        double shift = kTwoPi * (static_cast<long>(p) * c.m / c.n);
        bool rep = true;
        for (int i = 0; i + p < c.n && rep; ++i)
            if (std::abs(c.psi[i + p] - c.psi[i] - shift) > 1e-8) rep = false;
        if (rep) {
            orbit.repetition = true;
            break;
        }
    }
    return orbit;
}

}  // namespace obl
