#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "obl/billiard.hpp"
#include "test_helpers.hpp"

using namespace obl;
using namespace obl::testing;

TEST_SUITE_BEGIN("billiard");

TEST_CASE("unit circle: forward map is the rigid rotation (phi+2theta, theta)") {
    Oval ov = Oval::compile(unit_circle());
    BilliardMap map(ov);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> uphi(0.0, kTwoPi), uth(0.05, kPi - 0.05);
    for (int i = 0; i < 200; ++i) {
        PhasePoint p{uphi(rng), uth(rng)};
        PhasePoint q = map.forward(p);
        CHECK(std::abs(wrap_pm_pi(q.phi - (p.phi + 2 * p.theta))) < 1e-11);
        CHECK(std::abs(q.theta - p.theta) < 1e-11);
    }
}

TEST_CASE("circle: inscribed equilateral triangle closes after three bounces") {
    Oval ov = Oval::compile(unit_circle());
    BilliardMap map(ov);
    PhasePoint p{0.0, kPi / 3};
    for (int i = 0; i < 3; ++i) p = map.forward(p);
    CHECK(std::abs(wrap_pm_pi(p.phi - 0.0)) < 1e-11);
    CHECK(p.theta == doctest::Approx(kPi / 3).epsilon(1e-11));
}

TEST_CASE("ellipse: axis bounces hit the opposite vertex") {
    Oval ov = Oval::compile(ellipse21());
    BilliardMap map(ov);
    // vertex t=0 has tangent angle pi/2; the orthogonal shot lands at t=pi
    PhasePoint p{kPi / 2, kPi / 2};
    PhasePoint q = map.forward(p);
    CHECK(std::abs(wrap_pm_pi(q.phi - 3 * kPi / 2)) < 1e-11);
    CHECK(q.theta == doctest::Approx(kPi / 2).epsilon(1e-11));
    // minor-axis point maps to the other minor-axis point
    PhasePoint r{kPi, kPi / 2};
    PhasePoint s = map.forward(r);
    CHECK(std::abs(wrap_pm_pi(s.phi - 0.0)) < 1e-11);
}

TEST_CASE("inverse map: circle closed form and the reversibility identity") {
    Oval ov = Oval::compile(unit_circle());
    BilliardMap map(ov);
    PhasePoint p{1.0, 0.8};
    PhasePoint q = map.inverse(p);
    CHECK(std::abs(wrap_pm_pi(q.phi - (p.phi - 2 * p.theta))) < 1e-11);

    for (const OvalSpec& spec : sweep_specs()) {
        Oval o = Oval::compile(spec);
        BilliardMap m(o);
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> uphi(0.0, kTwoPi), uth(0.05, kPi - 0.05);
        for (int i = 0; i < 200; ++i) {
            PhasePoint z{uphi(rng), uth(rng)};
            PhasePoint back = m.inverse(m.forward(z));
            CHECK(cylinder_dist(back.phi, back.theta, z.phi, z.theta) < 1e-9);
            // H o T = T^-1 o H
            PhasePoint lhs = reversal(m.forward(z));
            PhasePoint rhs = m.inverse(reversal(z));
            CHECK(cylinder_dist(lhs.phi, lhs.theta, rhs.phi, rhs.theta) < 1e-9);
        }
    }
}

TEST_CASE("boundary theta is rejected") {
    Oval ov = Oval::compile(unit_circle());
    BilliardMap map(ov);
    CHECK_THROWS_AS(map.forward({0.0, 1e-13}), validation_error);
    CHECK_THROWS_AS(map.forward({0.0, kPi - 1e-13}), validation_error);
}

TEST_CASE("tangent map: circle closed form [[1,2],[0,1]]") {
    Oval ov = Oval::compile(unit_circle());
    BilliardMap map(ov);
    for (double th : {0.3, kPi / 2, 2.5}) {
        TangentMap tm = map.tangent_map({0.7, th});
        CHECK(tm.m(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(tm.m(0, 1) == doctest::Approx(2.0).epsilon(1e-10));
        CHECK(tm.m(1, 0) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(tm.m(1, 1) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("tangent map: ellipse major-axis closed form [[7,8],[6,7]]") {
    Oval ov = Oval::compile(ellipse21());
    BilliardMap map(ov);
    TangentMap tm = map.tangent_map({kPi / 2, kPi / 2});
    CHECK(tm.x0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tm.x1 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tm.chord == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(tm.m(0, 0) == doctest::Approx(7.0).epsilon(1e-10));
    CHECK(tm.m(0, 1) == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(tm.m(1, 0) == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(tm.m(1, 1) == doctest::Approx(7.0).epsilon(1e-10));
}

TEST_CASE("tangent map matches finite differences of the map; det and twist") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> uphi(0.0, kTwoPi), uth(0.1, kPi - 0.1);
    for (const OvalSpec& spec : sweep_specs()) {
        Oval ov = Oval::compile(spec);
        BilliardMap map(ov);
        for (int i = 0; i < 60; ++i) {
            PhasePoint p{uphi(rng), uth(rng)};
            TangentMap tm = map.tangent_map(p);
            // det = x0/x1 to near machine precision
            double det = tm.m.determinant();
            CHECK(std::abs(det - tm.x0 / tm.x1) < 1e-10 * std::max(1.0, std::abs(det)));
            // positive twist
            CHECK(tm.m(0, 1) > 0.0);
            // chord consistency
            Vec2 a = ov.position_at_tangent_angle(p.phi);
            Vec2 b = ov.position_at_tangent_angle(map.forward(p).phi);
            CHECK(std::abs((b - a).norm() - tm.chord) < 1e-10);

            const double h = 1e-6;
            auto wrap_diff = [](double x, double y) { return wrap_pm_pi(x - y); };
            PhasePoint pp = map.forward({p.phi + h, p.theta});
            PhasePoint pm = map.forward({p.phi - h, p.theta});
            PhasePoint tp = map.forward({p.phi, p.theta + h});
            PhasePoint tm_ = map.forward({p.phi, p.theta - h});
            double j00 = wrap_diff(pp.phi, pm.phi) / (2 * h);
            double j10 = (pp.theta - pm.theta) / (2 * h);
            double j01 = wrap_diff(tp.phi, tm_.phi) / (2 * h);
            double j11 = (tp.theta - tm_.theta) / (2 * h);
            double scale = std::max({1.0, std::abs(j00), std::abs(j01), std::abs(j10), std::abs(j11)});
            CHECK(std::abs(tm.m(0, 0) - j00) < 1e-5 * scale);
            CHECK(std::abs(tm.m(0, 1) - j01) < 1e-5 * scale);
            CHECK(std::abs(tm.m(1, 0) - j10) < 1e-5 * scale);
            CHECK(std::abs(tm.m(1, 1) - j11) < 1e-5 * scale);
        }
    }
}

TEST_CASE("iterate: circle lift sequence and n = 0") {
    Oval ov = Oval::compile(unit_circle());
    BilliardMap map(ov);
    auto seq = map.iterate({0.0, kPi / 2}, 4);
    REQUIRE(seq.size() == 5);
    for (int k = 0; k <= 4; ++k) CHECK(seq[k].phi_lift == doctest::Approx(k * kPi).epsilon(1e-12));

    auto single = map.iterate({1.0, 1.0}, 0);
    CHECK(single.size() == 1);
}

TEST_CASE("iterate: forward increments stay in (0, 2pi); round trip n=100") {
    Oval ov = Oval::compile(mixed());
    BilliardMap map(ov);
    LiftedPhasePoint z{0.3, 1.1};
    auto fwd = map.iterate(z, 100);
    for (size_t i = 1; i < fwd.size(); ++i) {
        double inc = fwd[i].phi_lift - fwd[i - 1].phi_lift;
        CHECK(inc > 0.0);
        CHECK(inc < kTwoPi);
    }
    auto back = map.iterate(fwd.back(), -100);
    CHECK(std::abs(back.back().phi_lift - z.phi_lift) < 1e-8);
    CHECK(std::abs(back.back().theta - z.theta) < 1e-8);
}

TEST_CASE("measure weight: circle values and the sin factor") {
    Oval ov = Oval::compile(unit_circle());
    BilliardMap map(ov);
    CHECK(map.measure_weight({0.4, kPi / 2}) == doctest::Approx(1.0));
    CHECK(map.measure_weight({0.4, 1e-6}) == doctest::Approx(1e-6).epsilon(1e-3));
}

TEST_CASE("measure preservation: stratified Monte-Carlo pushforward") {
    // mass of a box under mu = R(phi) sin(theta) dphi dtheta equals the mass of
    // its preimage, estimated by sampling mu directly (inverse-CDF in both
    // coordinates) on a jittered stratified grid.
    Oval ov = Oval::compile(twofold());
    BilliardMap map(ov);

    const double phi_a = 1.0, phi_b = 4.0, th_a = 0.9, th_c = 2.1;
    auto in_box = [&](PhasePoint p) {
        double dp = mod_2pi(p.phi - phi_a);
        return dp <= mod_2pi(phi_b - phi_a) && p.theta >= th_a && p.theta <= th_c;
    };

    // exact relative mu-mass of the box by quadrature (R integrates in closed
    // form against the uniform part; use fine Simpson for generality)
    auto arc_r = [&](double lo, double hi) {
        int N = 4000;
        double s = 0.0;
        for (int i = 0; i <= N; ++i) {
            double w = (i == 0 || i == N) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * ov.radius_of_curvature(lo + (hi - lo) * i / N);
        }
        return s * (hi - lo) / (3.0 * N);
    };
    double mass_box = arc_r(phi_a, phi_b) * (std::cos(th_a) - std::cos(th_c));
    double mass_all = arc_r(0.0, kTwoPi) * 2.0;
    double expected = mass_box / mass_all;

    // sample mu via inverse CDF: phi from arclength, theta from cos
    const int G = 1000;  // G x G stratified samples
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> jit(0.0, 1.0);
    double total_len = arc_r(0.0, kTwoPi);
    // tabulated inverse of s(phi)
    const int T = 8192;
    std::vector<double> s_of_phi(T + 1);
    for (int i = 0; i <= T; ++i) s_of_phi[i] = arc_r(0.0, kTwoPi * i / T);
    auto phi_of_s = [&](double s) {
        auto it = std::lower_bound(s_of_phi.begin(), s_of_phi.end(), s);
        size_t hi = std::min<size_t>(s_of_phi.size() - 1, it - s_of_phi.begin());
        size_t lo = hi > 0 ? hi - 1 : 0;
        double f = (s - s_of_phi[lo]) / std::max(1e-300, s_of_phi[hi] - s_of_phi[lo]);
        return kTwoPi * (lo + f) / T;
    };

    long hits_image = 0, hits_direct = 0, total = 0;
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            double us = (i + jit(rng)) / G, ut = (j + jit(rng)) / G;
            PhasePoint p{phi_of_s(us * total_len), std::acos(1.0 - 2.0 * ut)};
            ++total;
            if (in_box(p)) ++hits_direct;
            if (in_box(map.forward(p))) ++hits_image;
        }
    }
    double frac_direct = static_cast<double>(hits_direct) / total;
    double frac_image = static_cast<double>(hits_image) / total;
    // sampler agrees with quadrature, and the pushforward preserves the mass
    CHECK(std::abs(frac_direct - expected) / expected < 1e-3);
    CHECK(std::abs(frac_image - expected) / expected < 1e-3);
}

TEST_SUITE_END();
