#pragma once

#include <string>
#include <vector>

#include "obl/config.hpp"
#include "obl/genericity.hpp"
#include "obl/manifolds.hpp"
#include "obl/regions.hpp"
#include "obl/stability.hpp"
#include "obl/variational.hpp"

namespace obl::io {

// --- curve specs -----------------------------------------------------------

std::string spec_to_json(const OvalSpec& spec);
OvalSpec spec_from_json(const std::string& text);
OvalSpec load_spec(const std::string& path);
void save_spec(const OvalSpec& spec, const std::string& path);

// --- tolerance config ------------------------------------------------------

/// Partial override: absent keys keep their defaults.
ToleranceConfig config_from_json(const std::string& text, ToleranceConfig base = {});
ToleranceConfig load_config(const std::string& path, ToleranceConfig base = {});
std::string config_to_json(const ToleranceConfig& cfg);

// --- orbit library ---------------------------------------------------------

struct OrbitLibrary {
    std::vector<PeriodicOrbit> orbits;
    std::vector<std::array<int, 3>> hessian_signatures;  // parallel to orbits
    std::vector<bool> nondegenerate;
    std::vector<std::string> warnings;
};

std::string orbits_to_json(const OrbitLibrary& lib);
OrbitLibrary orbits_from_json(const std::string& text);
OrbitLibrary load_orbits(const std::string& path);
void save_orbits(const OrbitLibrary& lib, const std::string& path);

// --- reports ----------------------------------------------------------------

std::string classification_report_json(const OrbitLibrary& lib);

struct BreakExperiment {
    BreakDegeneracyResult result;
    PerturbedMeasurement measurement;
};
std::string break_experiment_json(const BreakExperiment& exp);

std::string split_report_json(const SplitTangencyResult& res);

std::string intersections_json(const std::vector<HeteroclinicPoint>& pts);

std::string region_report_json(const InstabilityRegion& region);

std::string validation_report_json(const ValidationReport& rep, const OvalSpec& spec);

// --- tangency records ------------------------------------------------------

std::string tangency_to_json(const TangencyRecord& t);
TangencyRecord tangency_from_json(const std::string& text);

// --- CSV -------------------------------------------------------------------

/// Orbit CSV: header `step,phi_lifted,phi_mod,theta`, 17 significant digits.
std::string orbit_csv(const std::vector<LiftedPhasePoint>& pts);

/// Branch CSV: header `arc,phi_lifted,theta`.
std::string branch_csv(const ManifoldBranch& b);

/// Branch manifest: everything needed to re-evaluate the branch exactly
/// (sidecar for `tangle intersections`).
std::string branch_manifest_json(const ManifoldBranch& b);
ManifoldBranch branch_from_manifest(const std::string& text);

/// Portrait points CSV: header `sample,step,phi,theta`.
std::string portrait_csv(const std::vector<std::vector<LiftedPhasePoint>>& trajectories);

// --- file helpers ----------------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace obl::io
