#include <doctest.h>

#include "obl/genericity.hpp"
#include "obl/variational.hpp"
#include "test_helpers.hpp"

using namespace obl;
using namespace obl::testing;

TEST_SUITE_BEGIN("genericity");

namespace {

PeriodicOrbit circle_triangle() {
    Oval circle = Oval::compile(unit_circle());
    PolygonConfig c{1, 3, {0.5, 0.5 + kTwoPi / 3, 0.5 + 2 * kTwoPi / 3}};
    return config_to_orbit(circle, c);
}

}  // namespace

TEST_CASE("select_perturbation_site: ellipse major axis picks site 1") {
    Oval el = Oval::compile(ellipse21());
    PeriodicOrbit major = config_to_orbit(el, {1, 2, {kPi / 2, 3 * kPi / 2}});
    SiteReport rep = select_perturbation_site(major, 1e-8);
    CHECK(rep.site == 1);
    CHECK_FALSE(rep.fallback);
    CHECK(rep.b / major.x[1] + rep.c == doctest::Approx(194.0).epsilon(1e-10));
}

TEST_CASE("select_perturbation_site: circle orbits have nonzero b and are deterministic") {
    Oval circle = Oval::compile(unit_circle());
    PeriodicOrbit diam = config_to_orbit(circle, {1, 2, {0.2, 0.2 + kPi}});
    SiteReport r1 = select_perturbation_site(diam, 1e-8);
    SiteReport r2 = select_perturbation_site(diam, 1e-8);
    CHECK(r1.site == r2.site);
    CHECK(r1.b == r2.b);
    CHECK((r1.fallback || std::abs(r1.b) > 1e-8));

    PeriodicOrbit tri = circle_triangle();
    SiteReport rt = select_perturbation_site(tri, 1e-8);
    CHECK(rt.site == 1);
    // closed form for the unit-circle triangle: trace(v) = 6 sqrt(3)/v - 10
    CHECK(rt.b == doctest::Approx(6 * std::sqrt(3.0)).epsilon(1e-10));
    CHECK(rt.c == doctest::Approx(-10.0).epsilon(1e-10));
}

TEST_CASE("select_perturbation_site: synthetic all-b-zero chain takes the fallback") {
    PeriodicOrbit fake;
    fake.m = 1;
    fake.n = 2;
    fake.chord = {1.0, 1.0};
    fake.x = {1.0, 0.7};
    fake.psi = {0.0, kPi};
    fake.points = {{0.0, 1.0}, {kPi, 1.0}};
    fake.radius = {1.0, 1.0};
    SiteReport rep = select_perturbation_site(fake, 1e-8);
    CHECK(rep.fallback);
    CHECK(rep.site == 0);
    CHECK(rep.fallback_trace == doctest::Approx(-2.0 * (2.0 / 1.0 - 1.0)).epsilon(1e-10));
    CHECK(rep.fallback_trace != 0.0);
}

TEST_CASE("break_degeneracy: h = 0 auto amplitude, circle triangle persists") {
    Oval circle = Oval::compile(unit_circle());
    PeriodicOrbit tri = circle_triangle();
    CHECK(tri.trace == doctest::Approx(2.0).epsilon(1e-10));

    BreakDegeneracyResult res = break_degeneracy(circle, tri, 0.01);
    CHECK(res.h == doctest::Approx(0.01));  // b > 0, trace at +2: push upward
    Oval pert = Oval::compile(res.perturbed_spec);
    PerturbedMeasurement meas = measure_on_perturbed(pert, tri);

    SUBCASE("the polygon persists as a periodic orbit") {
        CHECK(meas.closure_error < 1e-8);
        // vertex positions and chords unchanged
        for (int i = 0; i < tri.n; ++i) {
            Vec2 a = circle.position_at_tangent_angle(tri.points[i].phi);
            Vec2 b = pert.position_at_tangent_angle(tri.points[i].phi);
            CHECK((a - b).norm() < 1e-12);
            CHECK(std::abs(meas.orbit.chord[i] - tri.chord[i]) < 1e-12);
        }
    }
    SUBCASE("measured trace leaves 2; exact affine prediction matches to precision") {
        CHECK(std::abs(meas.trace_measured - 2.0) > 1e-3);
        // closed form: trace = 12(1+h) - 10
        CHECK(meas.trace_measured == doctest::Approx(2.0 + 12 * 0.01).epsilon(1e-8));
        CHECK(meas.trace_measured == doctest::Approx(res.trace_predicted_exact).epsilon(1e-9));
    }
    SUBCASE("first-order prediction shows second-order error scaling") {
        BreakDegeneracyResult res2 = break_degeneracy(circle, tri, 0.005);
        Oval pert2 = Oval::compile(res2.perturbed_spec);
        PerturbedMeasurement meas2 = measure_on_perturbed(pert2, tri);
        double e1 = std::abs(meas.trace_measured - res.trace_predicted);
        double e2 = std::abs(meas2.trace_measured - res2.trace_predicted);
        CHECK(e1 > 1e-5);
        double ratio = e1 / e2;
        CHECK(ratio > 3.0);
        CHECK(ratio < 5.0);
    }
}

TEST_CASE("break_degeneracy: h with the wrong magnitude against curvature errors out") {
    Oval circle = Oval::compile(unit_circle());
    PeriodicOrbit tri = circle_triangle();
    CHECK_THROWS_AS(break_degeneracy(circle, tri, 30.0), numerical_error);
}

TEST_CASE("break_degeneracy rejects nondegenerate orbits") {
    Oval el = Oval::compile(ellipse21());
    PeriodicOrbit major = config_to_orbit(el, {1, 2, {kPi / 2, 3 * kPi / 2}});
    CHECK_THROWS_AS(break_degeneracy(el, major, 0.01), validation_error);
}

TEST_CASE("split_tangency: h = 0 identity, support hygiene on the ellipse separatrix") {
    Oval el = Oval::compile(ellipse21());
    PeriodicOrbit major = config_to_orbit(el, {1, 2, {kPi / 2, 3 * kPi / 2}});

    // the minor vertex aimed through a focus lies on the separatrix; the
    // direction (sqrt 3, -1)/2 against tangent (-1, 0) gives theta = 5 pi/6
    TangencyRecord tangle;
    tangle.location = {kPi, 5 * kPi / 6};
    tangle.slope = 0.0;  // placeholder; exact slope exercised in the acceptance run
    tangle.orbit = major;

    SUBCASE("identity at h = 0") {
        SplitTangencyResult res = split_tangency(el, tangle, 0.0);
        CHECK(res.prediction.gap == 0.0);
        CHECK(res.perturbed_spec.is_ellipse());
    }
    SUBCASE("bump avoids every footprint and the orbit vertices") {
        SplitTangencyResult res = split_tangency(el, tangle, 1e-3);
        Oval pert = Oval::compile(res.perturbed_spec);
        CHECK(res.prediction.gap == doctest::Approx(2e-3 / res.radius).epsilon(1e-12));
        CHECK(res.radius == doctest::Approx(4.0).epsilon(1e-10));  // R at the minor vertex

        // trajectory of the tangency is unchanged on the perturbed table
        BilliardMap m0(el), m1(pert);
        LiftedPhasePoint z0{tangle.location.phi, tangle.location.theta};
        auto o0 = m0.iterate(z0, 8), o1 = m1.iterate(z0, 8);
        for (size_t i = 0; i < o0.size(); ++i) {
            CHECK(std::abs(o0[i].phi_lift - o1[i].phi_lift) < 1e-9);
            CHECK(std::abs(o0[i].theta - o1[i].theta) < 1e-9);
        }
    }
}

TEST_CASE("c1_distance: identity, monotone in amplitude, linear in h") {
    Oval base = Oval::compile(trefoil());
    CHECK(c1_distance(base, base, 24, 12) == 0.0);

    std::vector<double> hs{0.02, 0.01, 0.005, 0.0025};
    std::vector<double> dist;
    for (double h : hs) {
        Oval pert = Oval::compile(OvalSpec::perturbed(trefoil(), {{2.0, 0.4, h}}));
        dist.push_back(c1_distance(base, pert, 24, 12));
    }
    for (size_t i = 0; i + 1 < dist.size(); ++i) CHECK(dist[i] > dist[i + 1]);
    // empirically linear: halving h roughly halves the distance
    for (size_t i = 0; i + 1 < dist.size(); ++i) {
        double ratio = dist[i] / dist[i + 1];
        CHECK(ratio > 1.5);
        CHECK(ratio < 2.6);
    }
}

TEST_CASE("support hygiene: perturbed and base specs agree exactly outside supports") {
    Oval circle = Oval::compile(unit_circle());
    PeriodicOrbit tri = circle_triangle();
    BreakDegeneracyResult res = break_degeneracy(circle, tri, 0.01);
    Oval pert = Oval::compile(res.perturbed_spec);
    for (double u = 0.0; u < kTwoPi; u += 0.01) {
        if (std::abs(wrap_pm_pi(u - res.bump_center)) < res.bump_half_width) continue;
        CHECK((circle.position(u) - pert.position(u)).norm() < 1e-12);
    }
}

TEST_SUITE_END();
