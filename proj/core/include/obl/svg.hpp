#pragma once

#include <string>
#include <vector>

#include "obl/billiard.hpp"
#include "obl/regions.hpp"

namespace obl::svg {

/// Self-contained phase-portrait SVG: one dot per iterate, colored by sample.
std::string phase_portrait(const std::vector<std::vector<LiftedPhasePoint>>& trajectories,
                           int width = 900, int height = 520);

/// Region overlay: manifold occupancy, envelopes, islands, island centers.
std::string region_portrait(const InstabilityRegion& region, int width = 900, int height = 520);

}  // namespace obl::svg
