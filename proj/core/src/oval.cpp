#include "obl/oval.hpp"

#include <algorithm>
#include <cmath>

namespace obl {
namespace {

// 12-point Gauss-Legendre rule on [-1, 1].
constexpr int kGL = 12;
constexpr double kGLNode[kGL] = {
    -0.9815606342467192506905491, -0.9041172563704748566784659, -0.7699026741943046870368938,
    -0.5873179542866174472967024, -0.3678314989981801937526915, -0.1252334085114689154724414,
    0.1252334085114689154724414,  0.3678314989981801937526915,  0.5873179542866174472967024,
    0.7699026741943046870368938,  0.9041172563704748566784659,  0.9815606342467192506905491};
constexpr double kGLWeight[kGL] = {
    0.0471753363865118271946160, 0.1069393259953184309602547, 0.1600783285433462263346525,
    0.2031674267230659217490645, 0.2334925365383548087608499, 0.2491470458134027850005624,
    0.2491470458134027850005624, 0.2334925365383548087608499, 0.2031674267230659217490645,
    0.1600783285433462263346525, 0.1069393259953184309602547, 0.0471753363865118271946160};

// C2 cutoff B(u) = (1-u^2)^3 (1+3u^2): B(0)=1, B'(0)=B''(0)=0, triple zero at u=+-1.
inline double cutoff(double u) {
    double w = 1.0 - u * u;
    return w * w * w * (1.0 + 3.0 * u * u);
}
inline double cutoff_d1(double u) {
    double w = 1.0 - u * u;
    return -24.0 * u * u * u * w * w;
}
inline double cutoff_d2(double u) {
    double w = 1.0 - u * u;
    return 24.0 * u * u * w * (7.0 * u * u - 3.0);
}

double ellipse_speed(const EllipseAxes& e, double t) {
    double sx = -e.a * std::sin(t), sy = e.b * std::cos(t);
    return std::hypot(sx, sy);
}

}  // namespace

BumpDisplacement bump_displacement(const NormalBump& bump, double phi) {
    double d = wrap_pm_pi(phi - bump.center);
    double delta = bump.half_width;
    if (std::abs(d) >= delta) return {};
    double u = d / delta;
    double h = bump.second_deriv;
    double B = cutoff(u), B1 = cutoff_d1(u), B2 = cutoff_d2(u);
    BumpDisplacement out;
    out.value = 0.5 * h * d * d * B;
    out.d1 = h * d * B + 0.5 * h * d * d * B1 / delta;
    out.d2 = h * B + 2.0 * h * d * B1 / delta + 0.5 * h * d * d * B2 / (delta * delta);
    return out;
}

double perturbed_radius_at_center(double base_radius, double h) {
    // Local frame at the contact point: tangent (1,0), inward normal (0,1).
    // beta' = (R - lambda) t + lambda' n = (R, 0); beta'' = (R' - 2 lambda') t
    // + (R - lambda + lambda'') n, whose tangential part drops out of the cross
    // product. lambda = lambda' = 0, lambda'' = h at the center.
    Vec2 d1(base_radius, 0.0);
    Vec2 d2(0.0, base_radius + h);
    double cr = cross2(d1, d2);
    if (cr <= 0.0)
        throw numerical_error("perturbed_radius_at_center",
                              "curvature sign flip at bump center (R0=" + std::to_string(base_radius) +
                                  ", h=" + std::to_string(h) + ")");
    double speed = d1.norm();
    return speed * speed * speed / cr;
}

// ---------------------------------------------------------------------------
// fourier internals

double Oval::fourier_R(double phi) const {
    double r = fr_.a0;
    for (const auto& h : fr_.harmonics) r += h.a * std::cos(h.k * phi) + h.b * std::sin(h.k * phi);
    return r;
}

double Oval::fourier_R1(double phi) const {
    double r = 0.0;
    for (const auto& h : fr_.harmonics) r += h.k * (-h.a * std::sin(h.k * phi) + h.b * std::cos(h.k * phi));
    return r;
}

Vec2 Oval::panel_integral(double a, double b) const {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    Vec2 acc(0, 0);
    for (int i = 0; i < kGL; ++i) {
        double psi = mid + half * kGLNode[i];
        double r = fourier_R(psi);
        acc += kGLWeight[i] * r * unit_from_angle(psi);
    }
    return half * acc;
}

Vec2 Oval::fourier_position(double phi) const {
    double u = mod_2pi(phi);
    int j = std::min<int>(static_cast<int>(u / panel_width_), panels_ - 1);
    return prefix_[j] + panel_integral(j * panel_width_, u);
}

// ---------------------------------------------------------------------------
// bump sums and perturbed jets

BumpDisplacement Oval::total_bump(double u) const {
    BumpDisplacement s;
    for (const auto& b : bumps_) {
        BumpDisplacement d = bump_displacement(b, u);
        s.value += d.value;
        s.d1 += d.d1;
        s.d2 += d.d2;
    }
    return s;
}

void Oval::base_jet3(double u, Vec2& p, Vec2& d1, Vec2& d2, Vec2& d3) const {
    if (base_->kind_ == Kind::fourier) {
        double R = base_->fourier_R(u);
        double R1 = base_->fourier_R1(u);
        double R2 = 0.0;
        for (const auto& h : base_->fr_.harmonics)
            R2 -= h.k * h.k * (h.a * std::cos(h.k * u) + h.b * std::sin(h.k * u));
        Vec2 t = unit_from_angle(u), n = rot90(t);
        p = base_->fourier_position(u);
        d1 = R * t;
        d2 = R1 * t + R * n;
        d3 = (R2 - R) * t + 2.0 * R1 * n;
    } else {  // ellipse
        const EllipseAxes& e = base_->el_;
        double c = std::cos(u), s = std::sin(u);
        p = Vec2(e.a * c, e.b * s);
        d1 = Vec2(-e.a * s, e.b * c);
        d2 = Vec2(-e.a * c, -e.b * s);
        d3 = Vec2(e.a * s, -e.b * c);
    }
}

void Oval::perturbed_jet2(double u, Vec2& p, Vec2& d1, Vec2& d2) const {
    Vec2 bp, b1, b2, b3;
    base_jet3(u, bp, b1, b2, b3);
    BumpDisplacement lam = total_bump(u);

    double s = b1.norm();
    double s1 = b1.dot(b2) / s;
    double s2 = (b2.dot(b2) + b1.dot(b3) - s1 * s1) / s;
    Vec2 that = b1 / s;
    Vec2 that1 = (b2 - s1 * that) / s;
    Vec2 that2 = (b3 - 2.0 * s1 * that1 - s2 * that) / s;
    Vec2 n = rot90(that), n1 = rot90(that1), n2 = rot90(that2);

    p = bp + lam.value * n;
    d1 = b1 + lam.d1 * n + lam.value * n1;
    d2 = b2 + lam.d2 * n + 2.0 * lam.d1 * n1 + lam.value * n2;
}

// ---------------------------------------------------------------------------
// public evaluation

Vec2 Oval::position(double param) const {
    double u = mod_2pi(param);
    switch (kind_) {
        case Kind::fourier:
            return fourier_position(u);
        case Kind::ellipse:
            return Vec2(el_.a * std::cos(u), el_.b * std::sin(u));
        case Kind::perturbed: {
            Vec2 bp, b1, b2, b3;
            base_jet3(u, bp, b1, b2, b3);
            BumpDisplacement lam = total_bump(u);
            Vec2 n = rot90(b1 / b1.norm());
            return bp + lam.value * n;
        }
    }
    return Vec2(0, 0);
}

void Oval::derivatives(double param, Vec2& d1, Vec2& d2) const {
    double u = mod_2pi(param);
    switch (kind_) {
        case Kind::fourier: {
            double R = fourier_R(u), R1 = fourier_R1(u);
            Vec2 t = unit_from_angle(u), n = rot90(t);
            d1 = R * t;
            d2 = R1 * t + R * n;
            return;
        }
        case Kind::ellipse: {
            double c = std::cos(u), s = std::sin(u);
            d1 = Vec2(-el_.a * s, el_.b * c);
            d2 = Vec2(-el_.a * c, -el_.b * s);
            return;
        }
        case Kind::perturbed: {
            Vec2 p;
            perturbed_jet2(u, p, d1, d2);
            return;
        }
    }
}

double Oval::radius_of_curvature(double param) const {
    double u = mod_2pi(param);
    if (kind_ == Kind::fourier) return fourier_R(u);
    Vec2 d1, d2;
    derivatives(u, d1, d2);
    double cr = cross2(d1, d2);
    if (cr <= 0.0)
        throw numerical_error("radius_of_curvature",
                              "non-positive curvature at parameter " + std::to_string(u));
    double s = d1.norm();
    return s * s * s / cr;
}

double Oval::tangent_angle_lift(double param) const {
    if (kind_ == Kind::fourier) return param;
    double u = mod_2pi(param);
    double base_lift;  // a reference lift within pi of the true tangent angle
    if (kind_ == Kind::ellipse) {
        base_lift = param + kPi / 2.0;
    } else {
        base_lift = (base_->kind_ == Kind::ellipse) ? param + kPi / 2.0 : param;
    }
    Vec2 d1, d2;
    derivatives(u, d1, d2);
    double principal = angle_of(d1);
    return base_lift + wrap_pm_pi(principal - base_lift);
}

double Oval::native_from_tangent_angle(double phi) const {
    switch (kind_) {
        case Kind::fourier:
            return mod_2pi(phi);
        case Kind::ellipse: {
            double t = std::atan2(-std::cos(phi) / el_.a, std::sin(phi) / el_.b);
            return mod_2pi(t);
        }
        case Kind::perturbed: {
            // Newton on g(u) = tangent_angle(u) - phi (wrapped); the lift is
            // strictly monotone, so the root is unique mod 2pi.
            auto g = [&](double u) {
                Vec2 d1, d2;
                derivatives(u, d1, d2);
                return wrap_pm_pi(angle_of(d1) - phi);
            };
            double u = base_->native_from_tangent_angle(phi);
            bool ok = false;
            for (int it = 0; it < 60; ++it) {
                double f = g(u);
                if (std::abs(f) < 1e-14) {
                    ok = true;
                    break;
                }
                Vec2 d1, d2;
                derivatives(u, d1, d2);
                double dphi_du = cross2(d1, d2) / d1.squaredNorm();
                u -= f / dphi_du;
            }
            if (!ok && std::abs(g(u)) > 1e-10) {
                // scan for a sign change and bisect
                const int S = 512;
                double a = 0.0, fa = g(a), b = 0.0;
                bool found = false;
                for (int i = 1; i <= S; ++i) {
                    b = kTwoPi * i / S;
                    double fb = g(b);
                    if (fa <= 0.0 && fb >= 0.0 && std::abs(fa) < kPi / 2 && std::abs(fb) < kPi / 2) {
                        found = true;
                        break;
                    }
                    a = b;
                    fa = fb;
                }
                if (!found)
                    throw numerical_error("native_from_tangent_angle",
                                          "no parameter with tangent angle " + std::to_string(phi));
                for (int it = 0; it < 100; ++it) {
                    double m = 0.5 * (a + b);
                    if (g(m) < 0)
                        a = m;
                    else
                        b = m;
                }
                u = 0.5 * (a + b);
            }
            return mod_2pi(u);
        }
    }
    return mod_2pi(phi);
}

CurvePoint Oval::eval_point(double param) const {
    double u = mod_2pi(param);
    CurvePoint cp;
    cp.param = u;
    cp.position = position(u);
    Vec2 d1, d2;
    derivatives(u, d1, d2);
    double speed = d1.norm();
    cp.tangent = d1 / speed;
    cp.inward_normal = rot90(cp.tangent);
    cp.tangent_angle = mod_2pi(angle_of(d1));
    double cr = cross2(d1, d2);
    if (cr <= 0.0)
        throw numerical_error("eval_point", "non-positive curvature at parameter " + std::to_string(u));
    cp.radius = speed * speed * speed / cr;
    return cp;
}

Vec2 Oval::closure_defect() const {
    // integral of position'(u) over a period with the same panel rule
    int P = std::max(panels_, 64);
    double w = kTwoPi / P;
    Vec2 acc(0, 0);
    for (int j = 0; j < P; ++j) {
        double mid = (j + 0.5) * w, half = 0.5 * w;
        for (int i = 0; i < kGL; ++i) {
            double u = mid + half * kGLNode[i];
            Vec2 d1, d2;
            derivatives(u, d1, d2);
            acc += (half * kGLWeight[i]) * d1;
        }
    }
    return acc;
}

// ---------------------------------------------------------------------------
// validation and compilation

void Oval::validate_into(const OvalSpec& spec, const ToleranceConfig& cfg, ValidationReport& rep,
                         Oval* out) {
    Oval ov;
    ov.spec_ = spec;
    ov.cfg_ = cfg;
    bool usable = true;  // structurally evaluable, even if flagged invalid

    if (spec.is_fourier()) {
        ov.kind_ = Kind::fourier;
        ov.fr_ = std::get<FourierRadius>(spec.shape);
        int kmax = 1;
        for (const auto& h : ov.fr_.harmonics) {
            if (h.k == 1) {
                rep.valid = false;
                rep.issues.push_back("fourier spec contains a k=1 harmonic (curve does not close)");
            }
            if (h.k < 1) {
                rep.valid = false;
                rep.issues.push_back("fourier harmonic with k < 1");
            }
            kmax = std::max(kmax, h.k);
        }
        ov.panels_ = std::max(cfg.quad_panels_min, 4 * (kmax + 1));
        ov.panel_width_ = kTwoPi / ov.panels_;
        ov.prefix_.assign(ov.panels_, Vec2(0, 0));
        Vec2 acc(0, 0);
        for (int j = 0; j < ov.panels_; ++j) {
            ov.prefix_[j] = acc;
            acc += ov.panel_integral(j * ov.panel_width_, (j + 1) * ov.panel_width_);
        }
    } else if (spec.is_ellipse()) {
        ov.kind_ = Kind::ellipse;
        ov.el_ = std::get<EllipseAxes>(spec.shape);
        if (!(ov.el_.b > 0.0 && ov.el_.b <= ov.el_.a)) {
            rep.valid = false;
            usable = false;
            rep.issues.push_back("ellipse requires 0 < b <= a");
        }
    } else {
        ov.kind_ = Kind::perturbed;
        const auto& ps = std::get<PerturbedSpec>(spec.shape);
        if (!ps.base) {
            rep.valid = false;
            rep.issues.push_back("perturbed spec without a base");
            return;
        }
        if (ps.base->is_perturbed()) {
            rep.valid = false;
            rep.issues.push_back("perturbed base must be a fourier or ellipse spec (merge bump lists instead)");
            return;
        }
        ValidationReport base_rep;
        Oval base;
        validate_into(*ps.base, cfg, base_rep, &base);
        if (!base_rep.valid) {
            rep.valid = false;
            for (auto& s : base_rep.issues) rep.issues.push_back("base: " + s);
            return;
        }
        ov.base_ = std::make_shared<Oval>(std::move(base));
        ov.bumps_ = ps.bumps;
        for (const auto& b : ov.bumps_) {
            if (!(b.half_width > 0.0) || b.half_width > kPi) {
                rep.valid = false;
                usable = false;
                rep.issues.push_back("bump half_width must be in (0, pi]");
            }
            if (!std::isfinite(b.second_deriv)) {
                rep.valid = false;
                usable = false;
                rep.issues.push_back("bump second_deriv must be finite");
            }
        }
    }
    if (!usable) return;

    // curvature positivity on a grid, then a local refinement near the minimum
    int N = std::max(cfg.curvature_grid, 16);
    double best = std::numeric_limits<double>::infinity();
    double best_u = 0.0;
    auto kappa_inv = [&](double u) -> double {  // signed radius (negative = concave)
        // the fourier model's signed radius is the series itself; the
        // cross-product form only reports |R| there (the frame flips with R)
        if (ov.kind_ == Kind::fourier) return ov.fourier_R(u);
        Vec2 d1, d2;
        ov.derivatives(u, d1, d2);
        double cr = cross2(d1, d2);
        double s = d1.norm();
        if (cr <= 0.0) return -1.0;
        return s * s * s / cr;
    };
    for (int i = 0; i < N; ++i) {
        double u = kTwoPi * i / N;
        double r = kappa_inv(u);
        if (r < best) {
            best = r;
            best_u = u;
        }
    }
    // golden-section refinement in the bracketing cell
    double lo = best_u - kTwoPi / N, hi = best_u + kTwoPi / N;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = kappa_inv(x1), f2 = kappa_inv(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = kappa_inv(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = kappa_inv(x2);
        }
    }
    if (std::min(f1, f2) < best) {
        best = std::min(f1, f2);
        best_u = f1 < f2 ? x1 : x2;
    }
    rep.min_curvature_radius = best;
    rep.min_curvature_param = mod_2pi(best_u);
    if (best <= 0.0) {
        rep.valid = false;
        rep.issues.push_back("radius of curvature is not strictly positive (min at parameter " +
                             std::to_string(rep.min_curvature_param) + ")");
        return;
    }
    ov.min_radius_ = best;

    rep.closure_defect = ov.closure_defect();
    if (spec.is_fourier() && rep.closure_defect.norm() > cfg.closure_tol) {
        rep.valid = false;
        rep.issues.push_back("closure defect " + std::to_string(rep.closure_defect.norm()) +
                             " exceeds tolerance");
    }

    if (out && rep.valid) *out = std::move(ov);
}

Oval Oval::compile(const OvalSpec& spec, const ToleranceConfig& cfg) {
    ValidationReport rep;
    Oval ov;
    validate_into(spec, cfg, rep, &ov);
    if (!rep.valid) {
        std::string msg = "invalid oval spec";
        for (const auto& s : rep.issues) msg += "; " + s;
        throw validation_error(msg);
    }
    return ov;
}

ValidationReport Oval::check(const OvalSpec& spec, const ToleranceConfig& cfg) {
    ValidationReport rep;
    validate_into(spec, cfg, rep, nullptr);
    return rep;
}

}  // namespace obl
