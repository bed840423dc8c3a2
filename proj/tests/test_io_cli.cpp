#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "obl/io.hpp"
#include "obl/variational.hpp"
#include "test_helpers.hpp"

using namespace obl;
using namespace obl::testing;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("io_cli");

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("obl_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
#ifdef OBL_CLI_PATH
    std::string cmd = std::string(OBL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
#else
    (void)args;
    return -1;
#endif
}

}  // namespace

TEST_CASE("curve specs round trip losslessly through JSON") {
    for (const OvalSpec& spec : sweep_specs()) {
        std::string text = io::spec_to_json(spec);
        OvalSpec back = io::spec_from_json(text);
        CHECK(io::spec_to_json(back) == text);
        // sanity: same geometry
        Oval a = Oval::compile(spec), b = Oval::compile(back);
        for (double u : {0.3, 2.2, 5.1}) CHECK((a.position(u) - b.position(u)).norm() == 0.0);
    }
}

TEST_CASE("malformed JSON and wrong fields give validation errors naming the path") {
    CHECK_THROWS_AS(io::spec_from_json("{nope"), validation_error);
    CHECK_THROWS_AS(io::spec_from_json(R"({"kind":"triangle"})"), validation_error);
    try {
        io::spec_from_json(R"({"kind":"ellipse","a":2})");
        CHECK(false);
    } catch (const validation_error& e) {
        CHECK(std::string(e.what()).find("curve.b") != std::string::npos);
    }
}

TEST_CASE("orbit library and tolerance config round trip") {
    Oval ov = Oval::compile(ellipse21());
    FindOrbitsResult res = find_orbits(ov, 1, 2, {60, 3});
    io::OrbitLibrary lib;
    for (const auto& cp : res.points) {
        lib.orbits.push_back(config_to_orbit(ov, cp.config));
        lib.hessian_signatures.push_back(cp.hessian_signature);
        lib.nondegenerate.push_back(cp.nondegenerate);
    }
    std::string text = io::orbits_to_json(lib);
    io::OrbitLibrary back = io::orbits_from_json(text);
    REQUIRE(back.orbits.size() == lib.orbits.size());
    for (size_t i = 0; i < lib.orbits.size(); ++i) {
        CHECK(back.orbits[i].m == lib.orbits[i].m);
        CHECK(back.orbits[i].n == lib.orbits[i].n);
        for (int k = 0; k < lib.orbits[i].n; ++k)
            CHECK(back.orbits[i].psi[k] == lib.orbits[i].psi[k]);
    }

    ToleranceConfig cfg;
    cfg.max_step = 0.5e-3;
    cfg.region_bins = 256;
    ToleranceConfig cfg2 = io::config_from_json(io::config_to_json(cfg));
    CHECK(cfg2.max_step == cfg.max_step);
    CHECK(cfg2.region_bins == cfg.region_bins);
    // partial override keeps defaults
    ToleranceConfig cfg3 = io::config_from_json(R"({"max_turn": 0.1})");
    CHECK(cfg3.max_turn == 0.1);
    CHECK(cfg3.max_step == ToleranceConfig{}.max_step);
}

TEST_CASE("orbit CSV format: header, row shape, 17 significant digits") {
    std::vector<LiftedPhasePoint> pts{{0.0, kPi / 2}, {kPi, kPi / 2}, {kTwoPi, kPi / 2}};
    std::string csv = io::orbit_csv(pts);
    CHECK(csv.rfind("step,phi_lifted,phi_mod,theta\n", 0) == 0);
    CHECK(csv.find("3.1415926535897931") != std::string::npos);
    int rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == 4);
}

TEST_CASE("format tag and version stamped into every report") {
    Oval ov = Oval::compile(unit_circle());
    ValidationReport rep = Oval::check(unit_circle());
    std::string j = io::validation_report_json(rep, unit_circle());
    CHECK(j.find("\"format\": \"obl/1\"") != std::string::npos);
    CHECK(j.find("\"version\"") != std::string::npos);
    (void)ov;
}

#ifdef OBL_CLI_PATH

TEST_CASE("cli: oval check validates the circle and rejects a k=1 spec") {
    TempDir tmp;
    io::write_file(tmp.file("circle.json"), io::spec_to_json(unit_circle()));
    CHECK(run_cli("oval check --curve " + tmp.file("circle.json")) == 0);

    io::write_file(tmp.file("bad.json"),
                   R"({"kind":"fourier","a0":1.0,"harmonics":[{"k":1,"a":0.1,"b":0}]})");
    CHECK(run_cli("oval check --curve " + tmp.file("bad.json")) == 2);
    CHECK(run_cli("oval check --curve " + tmp.file("missing.json")) == 2);
}

TEST_CASE("cli: map iterate is deterministic byte for byte") {
    TempDir tmp;
    io::write_file(tmp.file("curve.json"), io::spec_to_json(trefoil()));
    std::string base = "map iterate --curve " + tmp.file("curve.json") +
                       " --phi 0.3 --theta 1.1 --n 200 --out ";
    REQUIRE(run_cli(base + tmp.file("a.csv")) == 0);
    REQUIRE(run_cli(base + tmp.file("b.csv")) == 0);
    CHECK(io::read_file(tmp.file("a.csv")) == io::read_file(tmp.file("b.csv")));
    CHECK(io::read_file(tmp.file("a.csv")).rfind("step,phi_lifted,phi_mod,theta\n", 0) == 0);
}

TEST_CASE("cli: orbits find on the ellipse yields the two-axis library, classify reads it back") {
    TempDir tmp;
    io::write_file(tmp.file("ellipse.json"), io::spec_to_json(ellipse21()));
    REQUIRE(run_cli("orbits find --curve " + tmp.file("ellipse.json") +
                    " --m 1 --n 2 --starts 80 --seed 5 --out " + tmp.file("orbits.json")) == 0);
    io::OrbitLibrary lib = io::load_orbits(tmp.file("orbits.json"));
    REQUIRE(lib.orbits.size() == 2);

    REQUIRE(run_cli("orbits classify --curve " + tmp.file("ellipse.json") + " --orbits " +
                    tmp.file("orbits.json") + " --out " + tmp.file("report.json")) == 0);
    std::string rep = io::read_file(tmp.file("report.json"));
    CHECK(rep.find("hyperbolic") != std::string::npos);
    CHECK(rep.find("elliptic") != std::string::npos);
    CHECK(rep.find("\"decomposition\"") != std::string::npos);
}

TEST_CASE("cli: portrait, manifold grow, perturb break-degeneracy run end to end") {
    TempDir tmp;
    io::write_file(tmp.file("circle.json"), io::spec_to_json(unit_circle()));
    io::write_file(tmp.file("two.json"), io::spec_to_json(twofold()));

    CHECK(run_cli("portrait --curve " + tmp.file("two.json") +
                  " --samples 6 --iters 60 --seed 2 --out " + tmp.file("p.svg") + " --csv " +
                  tmp.file("p.csv")) == 0);
    CHECK(io::read_file(tmp.file("p.svg")).find("<svg") != std::string::npos);

    REQUIRE(run_cli("orbits find --curve " + tmp.file("two.json") +
                    " --m 1 --n 2 --starts 60 --seed 4 --out " + tmp.file("o2.json")) == 0);
    // the hyperbolic diameter is the action minimizer: id 0 after sorting
    CHECK(run_cli("manifold grow --curve " + tmp.file("two.json") + " --orbits " +
                  tmp.file("o2.json") +
                  " --orbit 0 --kind unstable+ --budget-arclength 3 --out " + tmp.file("wu.csv")) ==
          0);
    CHECK(io::read_file(tmp.file("wu.csv")).rfind("arc,phi_lifted,theta\n", 0) == 0);
    CHECK(fs::exists(tmp.file("wu.csv.manifest.json")));

    REQUIRE(run_cli("orbits find --curve " + tmp.file("circle.json") +
                    " --m 1 --n 3 --starts 20 --seed 6 --out " + tmp.file("o3.json")) == 0);
    CHECK(run_cli("perturb break-degeneracy --curve " + tmp.file("circle.json") + " --orbits " +
                  tmp.file("o3.json") + " --orbit 0 --h 0.01 --out-curve " + tmp.file("pert.json") +
                  " --out-report " + tmp.file("exp.json")) == 0);
    std::string exp = io::read_file(tmp.file("exp.json"));
    CHECK(exp.find("trace_measured") != std::string::npos);
    // the emitted perturbed curve re-ingests and validates
    CHECK(run_cli("oval check --curve " + tmp.file("pert.json")) == 0);
}

#endif  // OBL_CLI_PATH

TEST_SUITE_END();
