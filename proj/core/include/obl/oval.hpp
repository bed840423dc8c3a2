#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "obl/config.hpp"
#include "obl/errors.hpp"
#include "obl/geom.hpp"

namespace obl {

/// Radius-of-curvature Fourier model: R(phi) = a0 + sum_k (a_k cos k phi + b_k sin k phi),
/// parameterized by the tangent angle phi. Harmonics with k = 1 are rejected:
/// without them the closure integral of R(phi) e^{i phi} vanishes identically.
struct FourierRadius {
    struct Harmonic {
        int k = 2;
        double a = 0.0;
        double b = 0.0;
    };
    double a0 = 1.0;
    std::vector<Harmonic> harmonics;
};

/// Axis-aligned ellipse (a cos t, b sin t), 0 < b <= a. The analytic oracle family.
struct EllipseAxes {
    double a = 1.0;
    double b = 1.0;
};

/// C2 normal bump: displacement lambda(phi) = (h/2) (phi-phi0)^2 B((phi-phi0)/delta)
/// along the inward normal of the base curve, with B a fixed polynomial cutoff.
/// lambda(phi0) = lambda'(phi0) = 0 and lambda''(phi0) = h by construction.
struct NormalBump {
    double center = 0.0;       // phi0 in the base curve's native parameter
    double half_width = 0.1;   // delta > 0
    double second_deriv = 0.0; // h = lambda''(phi0)
};

struct OvalSpec;

/// Base-plus-bumps model. The base must be fourier or ellipse; displacements of
/// several bumps add along the base normal field.
struct PerturbedSpec {
    std::shared_ptr<const OvalSpec> base;
    std::vector<NormalBump> bumps;
};

/// A convex curve model: one of the three shapes above. Plain data; compile()
/// an Oval to evaluate it.
struct OvalSpec {
    std::variant<FourierRadius, EllipseAxes, PerturbedSpec> shape;

    bool is_fourier() const { return std::holds_alternative<FourierRadius>(shape); }
    bool is_ellipse() const { return std::holds_alternative<EllipseAxes>(shape); }
    bool is_perturbed() const { return std::holds_alternative<PerturbedSpec>(shape); }

    static OvalSpec circle(double radius = 1.0) {
        return OvalSpec{FourierRadius{radius, {}}};
    }
    static OvalSpec fourier(double a0, std::vector<FourierRadius::Harmonic> h) {
        return OvalSpec{FourierRadius{a0, std::move(h)}};
    }
    static OvalSpec ellipse(double a, double b) { return OvalSpec{EllipseAxes{a, b}}; }
    static OvalSpec perturbed(OvalSpec base, std::vector<NormalBump> bumps) {
        return OvalSpec{PerturbedSpec{std::make_shared<OvalSpec>(std::move(base)), std::move(bumps)}};
    }
};

/// Pointwise differential geometry of the curve at one native parameter value.
struct CurvePoint {
    double param = 0.0;          // native parameter, reduced to [0, 2pi)
    Vec2 position{0, 0};
    Vec2 tangent{1, 0};          // unit
    Vec2 inward_normal{0, 1};    // unit, tangent rotated +90 deg (ccw curves)
    double tangent_angle = 0.0;  // in [0, 2pi)
    double radius = 1.0;         // radius of curvature, > 0
};

/// bump profile value and first two derivatives at phi; identically zero
/// outside (center - half_width, center + half_width). phi is compared to the
/// center modulo 2pi.
struct BumpDisplacement {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};
BumpDisplacement bump_displacement(const NormalBump& bump, double phi);

/// Exact radius of curvature of the bumped curve at the bump center, from the
/// cross product of the perturbed first/second parameter derivatives.
/// Equals R0^2/(R0 + h); hard error if the curvature changes sign.
double perturbed_radius_at_center(double base_radius, double h);

struct ValidationReport {
    bool valid = true;
    std::vector<std::string> issues;
    double min_curvature_radius = 0.0;
    double min_curvature_param = 0.0;
    Vec2 closure_defect{0, 0};
};

/// Compiled evaluator for an OvalSpec. Immutable after construction; all
/// methods are const and safe for concurrent use.
class Oval {
public:
    /// Validates and compiles; throws validation_error if the spec is invalid.
    static Oval compile(const OvalSpec& spec, const ToleranceConfig& cfg = {});

    /// Diagnostics without throwing (used by `oval check`).
    static ValidationReport check(const OvalSpec& spec, const ToleranceConfig& cfg = {});

    const OvalSpec& spec() const { return spec_; }
    const ToleranceConfig& config() const { return cfg_; }

    /// Full curve point at a native parameter (reduced modulo 2pi).
    CurvePoint eval_point(double param) const;

    Vec2 position(double param) const;
    /// First and second derivatives of position with respect to the native parameter.
    void derivatives(double param, Vec2& d1, Vec2& d2) const;
    double radius_of_curvature(double param) const;

    /// Tangent angle as a monotone lift: tangent_angle_lift(u + 2pi) = tangent_angle_lift(u) + 2pi.
    double tangent_angle_lift(double param) const;
    /// Inverse reparameterization: native parameter in [0, 2pi) whose tangent
    /// angle equals phi (mod 2pi). Exact for fourier and ellipse shapes.
    double native_from_tangent_angle(double phi) const;

    Vec2 position_at_tangent_angle(double phi) const {
        return position(native_from_tangent_angle(phi));
    }
    double radius_at_tangent_angle(double phi) const {
        return radius_of_curvature(native_from_tangent_angle(phi));
    }

    /// Integral of position'(u) du over one period; (0,0) up to quadrature
    /// error for any closed curve, nonzero if a k=1 harmonic sneaks in.
    Vec2 closure_defect() const;

    double min_curvature_radius() const { return min_radius_; }

private:
    Oval() = default;

    enum class Kind { fourier, ellipse, perturbed };
    Kind kind_ = Kind::fourier;
    OvalSpec spec_;
    ToleranceConfig cfg_;

    // fourier data
    FourierRadius fr_;
    int panels_ = 32;
    double panel_width_ = 0.0;
    std::vector<Vec2> prefix_;  // integral of R (cos, sin) at panel boundaries

    // ellipse data
    EllipseAxes el_;

    // perturbed data
    std::shared_ptr<const Oval> base_;
    std::vector<NormalBump> bumps_;

    double min_radius_ = 0.0;

    double fourier_R(double phi) const;
    double fourier_R1(double phi) const;  // dR/dphi
    Vec2 fourier_position(double phi) const;
    Vec2 panel_integral(double a, double b) const;

    // sum of bump displacements and derivatives at a native parameter
    BumpDisplacement total_bump(double u) const;
    // position and first three parameter derivatives of the base curve
    void base_jet3(double u, Vec2& p, Vec2& d1, Vec2& d2, Vec2& d3) const;
    void perturbed_jet2(double u, Vec2& p, Vec2& d1, Vec2& d2) const;

    static void validate_into(const OvalSpec& spec, const ToleranceConfig& cfg, ValidationReport& rep,
                              Oval* compiled);
};

}  // namespace obl
