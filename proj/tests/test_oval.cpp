#include <doctest.h>

#include <random>

#include "obl/oval.hpp"
#include "test_helpers.hpp"

using namespace obl;
using namespace obl::testing;

TEST_SUITE_BEGIN("oval");

TEST_CASE("circle: start point, tangent, radius") {
    Oval ov = Oval::compile(unit_circle());
    CurvePoint cp = ov.eval_point(0.0);
    CHECK(cp.position.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cp.position.y() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cp.tangent.x() == doctest::Approx(1.0));
    CHECK(cp.tangent.y() == doctest::Approx(0.0));
    CHECK(cp.radius == doctest::Approx(1.0));
    CHECK(cp.tangent_angle == doctest::Approx(0.0));
}

TEST_CASE("ellipse: curvature at the vertices matches the closed form") {
    Oval ov = Oval::compile(ellipse21());
    CurvePoint v0 = ov.eval_point(0.0);
    CHECK(v0.position.x() == doctest::Approx(2.0));
    CHECK(v0.position.y() == doctest::Approx(0.0));
    CHECK(v0.radius == doctest::Approx(0.5).epsilon(1e-12));  // b^2/a

    CurvePoint v1 = ov.eval_point(kPi / 2);
    CHECK(v1.position.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v1.position.y() == doctest::Approx(1.0));
    CHECK(v1.radius == doctest::Approx(4.0).epsilon(1e-12));  // a^2/b

    // cross-check by finite differences of the position
    for (double t : {0.0, kPi / 2, 0.7, 2.9}) {
        auto px = [&](double u) { return ov.position(u).x(); };
        auto py = [&](double u) { return ov.position(u).y(); };
        double h = 1e-4;
        Vec2 d1(fd_derivative(px, t, h), fd_derivative(py, t, h));
        Vec2 d2(fd_second(px, t, h), fd_second(py, t, h));
        double r_fd = std::pow(d1.norm(), 3) / cross2(d1, d2);
        CHECK(ov.radius_of_curvature(t) == doctest::Approx(r_fd).epsilon(1e-7));
    }
}

TEST_CASE("fourier: tangent angle equals the parameter, R matches the series") {
    Oval ov = Oval::compile(mixed());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int i = 0; i < 1024; ++i) {
        double phi = u(rng);
        auto px = [&](double v) { return ov.position(v).x(); };
        auto py = [&](double v) { return ov.position(v).y(); };
        double h = 1e-3;
        Vec2 d1(fd_derivative(px, phi, h), fd_derivative(py, phi, h));
        // tangent angle recomputed from positions
        double ang = mod_2pi(std::atan2(d1.y(), d1.x()));
        double diff = std::abs(wrap_pm_pi(ang - phi));
        CHECK(diff < 1e-9);
        // R from second derivatives of the position
        Vec2 d2(fd_second(px, phi, h), fd_second(py, phi, h));
        double r_fd = std::pow(d1.norm(), 3) / cross2(d1, d2);
        CHECK(std::abs(r_fd - ov.radius_of_curvature(phi)) < 1e-8);
    }
}

TEST_CASE("closure defect: circle and pure k=3 harmonic vanish, k=1 does not") {
    CHECK(Oval::compile(unit_circle()).closure_defect().norm() < 1e-12);
    CHECK(Oval::compile(OvalSpec::fourier(1.0, {{3, 0.2, 0.1}})).closure_defect().norm() < 1e-12);

    // hand-built invalid spec: k=1 harmonic
    OvalSpec bad = OvalSpec::fourier(1.0, {{1, 0.1, 0.0}});
    ValidationReport rep = Oval::check(bad);
    CHECK_FALSE(rep.valid);
    CHECK(rep.closure_defect.norm() > 1e-3);
    CHECK_THROWS_AS(Oval::compile(bad), validation_error);
}

TEST_CASE("non-convex spec is rejected naming the parameter") {
    // a0 = 1 with a huge k=2 harmonic drives R negative
    ValidationReport rep = Oval::check(OvalSpec::fourier(1.0, {{2, 1.2, 0.0}}));
    CHECK_FALSE(rep.valid);
    CHECK(rep.min_curvature_radius < 0.0);
}

TEST_CASE("bump profile: defining constraints and compact support") {
    NormalBump b{1.0, 0.3, 0.1};
    SUBCASE("outside support") {
        auto d = bump_displacement(b, 1.0 + 0.3);
        CHECK(d.value == 0.0);
        CHECK(d.d1 == 0.0);
        CHECK(d.d2 == 0.0);
        auto d2 = bump_displacement(b, 1.0 - 0.31);
        CHECK(d2.value == 0.0);
    }
    SUBCASE("at the center") {
        auto d = bump_displacement(b, 1.0);
        CHECK(d.value == 0.0);
        CHECK(d.d1 == 0.0);
        CHECK(d.d2 == doctest::Approx(0.1).epsilon(1e-14));
    }
    SUBCASE("positive inside the support for h > 0") {
        CHECK(bump_displacement(b, 1.0 + 0.15).value > 0.0);
        CHECK(bump_displacement(b, 1.0 - 0.15).value > 0.0);
    }
    SUBCASE("derivatives match finite differences; C2 across the boundary") {
        auto lam = [&](double phi) { return bump_displacement(b, phi).value; };
        // interior points (the profile is C-infinity inside the support, C2 at its edge)
        for (double phi : {0.85, 0.999, 1.12, 1.29}) {
            double d1_fd = fd_derivative(lam, phi, 1e-6);
            double d2_fd = fd_second(lam, phi, 2e-5);
            auto d = bump_displacement(b, phi);
            CHECK(std::abs(d.d1 - d1_fd) < 1e-6 * std::max(1.0, std::abs(d.d1)));
            CHECK(std::abs(d.d2 - d2_fd) < 2e-5);
        }
        // C2 continuity at the support edge: value and both derivatives vanish
        // in the limit from inside, matching the identical zero outside
        // the profile has a triple zero at the edge: lambda ~ eps^3, lambda' ~
        // eps^2, lambda'' ~ eps at distance eps inside
        for (double edge : {1.0 + 0.3, 1.0 - 0.3}) {
            for (double eps : {1e-4, 1e-6, 1e-8}) {
                double inside = edge + (edge > 1.0 ? -eps : eps);
                auto d = bump_displacement(b, inside);
                CHECK(std::abs(d.value) < 1e2 * eps * eps * eps);
                CHECK(std::abs(d.d1) < 1e2 * eps * eps);
                CHECK(std::abs(d.d2) < 1e2 * eps);
            }
        }
    }
    SUBCASE("bump near the 0/2pi seam") {
        NormalBump seam{0.05, 0.3, 0.1};
        CHECK(bump_displacement(seam, kTwoPi - 0.1).value > 0.0);  // wraps around
        CHECK(bump_displacement(seam, 0.2).value > 0.0);
    }
}

TEST_CASE("perturbed radius at center: exact value and paper first-order forms") {
    CHECK(perturbed_radius_at_center(1.0, 0.0) == doctest::Approx(1.0));
    CHECK(perturbed_radius_at_center(1.0, 0.1) == doctest::Approx(1.0 / 1.1).epsilon(1e-12));
    CHECK(perturbed_radius_at_center(1.0, -0.1) == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
    CHECK_THROWS_AS(perturbed_radius_at_center(1.0, -1.0), numerical_error);

    // oracle: numerical curvature of an explicitly bumped circle at the center
    OvalSpec spec = OvalSpec::perturbed(unit_circle(), {{2.0, 0.5, 0.1}});
    Oval ov = Oval::compile(spec);
    CHECK(ov.radius_of_curvature(2.0) == doctest::Approx(1.0 / 1.1).epsilon(1e-10));
    // ... which agrees with R0 - h only to first order
    CHECK(std::abs(ov.radius_of_curvature(2.0) - 0.9) > 1e-3);
}

TEST_CASE("perturbed spec with h = 0 evaluates identically to its base") {
    Oval base = Oval::compile(trefoil());
    Oval pert = Oval::compile(OvalSpec::perturbed(trefoil(), {{1.0, 0.4, 0.0}}));
    for (double u : {0.0, 0.9, 1.0, 1.1, 3.3, 6.1}) {
        Vec2 pb = base.position(u), pp = pert.position(u);
        CHECK(pb.x() == pp.x());
        CHECK(pb.y() == pp.y());
    }
}

TEST_CASE("base and perturbed coincide outside the bump support") {
    OvalSpec spec = OvalSpec::perturbed(trefoil(), {{1.0, 0.3, 0.05}, {4.0, 0.2, -0.03}});
    Oval base = Oval::compile(trefoil());
    Oval pert = Oval::compile(spec);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int i = 0; i < 400; ++i) {
        double phi = u(rng);
        bool inside = std::abs(wrap_pm_pi(phi - 1.0)) < 0.3 || std::abs(wrap_pm_pi(phi - 4.0)) < 0.2;
        double d = (base.position(phi) - pert.position(phi)).norm();
        if (!inside)
            CHECK(d < 1e-12);
        else if (std::abs(wrap_pm_pi(phi - 1.0)) < 0.2)
            CHECK(d >= 0.0);  // inside: displacement allowed
    }
}

TEST_CASE("perturbed spec keeps positive curvature or is rejected") {
    // second derivative too large against the base radius
    OvalSpec too_big = OvalSpec::perturbed(unit_circle(), {{0.0, 0.05, 3.0}});
    ValidationReport rep = Oval::check(too_big);
    CHECK_FALSE(rep.valid);
}

TEST_CASE("nested perturbed base is rejected") {
    OvalSpec inner = OvalSpec::perturbed(unit_circle(), {{0.0, 0.1, 0.01}});
    OvalSpec outer = OvalSpec::perturbed(inner, {{3.0, 0.1, 0.01}});
    CHECK_THROWS_AS(Oval::compile(outer), validation_error);
}

TEST_CASE("native_from_tangent_angle inverts tangent_angle_lift") {
    for (const OvalSpec& spec : sweep_specs()) {
        Oval ov = Oval::compile(spec);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, kTwoPi);
        for (int i = 0; i < 50; ++i) {
            double phi = u(rng);
            double native = ov.native_from_tangent_angle(phi);
            double phi_back = mod_2pi(ov.tangent_angle_lift(native));
            CHECK(std::abs(wrap_pm_pi(phi_back - phi)) < 1e-10);
        }
    }
}

TEST_CASE("parameter reduction modulo 2pi") {
    Oval ov = Oval::compile(trefoil());
    Vec2 a = ov.position(1.0), b = ov.position(1.0 + kTwoPi), c = ov.position(1.0 - kTwoPi);
    CHECK((a - b).norm() < 1e-15);
    CHECK((a - c).norm() < 1e-15);
}

TEST_SUITE_END();
