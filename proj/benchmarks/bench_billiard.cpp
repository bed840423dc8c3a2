#include <benchmark/benchmark.h>

#include "obl/billiard.hpp"
#include "obl/manifolds.hpp"
#include "obl/variational.hpp"

using namespace obl;

namespace {

OvalSpec spec_for(int kind) {
    switch (kind) {
        case 0: return OvalSpec::circle(1.0);
        case 1: return OvalSpec::ellipse(2.0, 1.0);
        case 2: return OvalSpec::fourier(1.0, {{3, 0.1, 0.0}});
        default: return OvalSpec::perturbed(OvalSpec::circle(1.0), {{1.0, 0.4, 0.05}});
    }
}

void BM_forward_map(benchmark::State& state) {
    Oval ov = Oval::compile(spec_for(static_cast<int>(state.range(0))));
    BilliardMap map(ov);
    PhasePoint p{0.37, 1.03};
    for (auto _ : state) {
        p = map.forward(p);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_forward_map)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_tangent_map(benchmark::State& state) {
    Oval ov = Oval::compile(spec_for(static_cast<int>(state.range(0))));
    BilliardMap map(ov);
    PhasePoint p{0.37, 1.03};
    for (auto _ : state) {
        TangentMap tm = map.tangent_map(p);
        benchmark::DoNotOptimize(tm);
    }
}
BENCHMARK(BM_tangent_map)->DenseRange(0, 3)->Unit(benchmark::kMicrosecond);

void BM_find_orbits_ellipse_12(benchmark::State& state) {
    Oval ov = Oval::compile(OvalSpec::ellipse(2.0, 1.0));
    for (auto _ : state) {
        FindOrbitsResult res = find_orbits(ov, 1, 2, {40, 3});
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(BM_find_orbits_ellipse_12)->Unit(benchmark::kMillisecond);

void BM_grow_branch(benchmark::State& state) {
    Oval ov = Oval::compile(OvalSpec::fourier(1.0, {{2, 0.05, 0.0}}));
    BilliardMap map(ov);
    FindOrbitsResult res = find_orbits(ov, 1, 2, {60, 13});
    PeriodicOrbit hyp;
    for (const auto& cp : res.points) {
        PeriodicOrbit o = config_to_orbit(ov, cp.config);
        if (o.cls == StabilityClass::hyperbolic) {
            hyp = o;
            break;
        }
    }
    for (auto _ : state) {
        ManifoldBranch br = grow_branch(map, hyp, 0, BranchKind::unstable_plus, {2000, 3.0});
        benchmark::DoNotOptimize(br);
    }
}
BENCHMARK(BM_grow_branch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
