#include "obl/svg.hpp"

#include <sstream>

namespace obl::svg {
namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Frame {
    int width, height;
    int margin = 40;
    double sx(double phi) const { return margin + phi / kTwoPi * (width - 2 * margin); }
    double sy(double theta) const { return height - margin - theta / kPi * (height - 2 * margin); }
};

void header(std::ostringstream& os, const Frame& f) {
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << f.width << "' height='" << f.height
       << "' viewBox='0 0 " << f.width << ' ' << f.height << "'>\n"
       << "<rect width='100%' height='100%' fill='white'/>\n"
       << "<rect x='" << f.margin << "' y='" << f.margin << "' width='" << f.width - 2 * f.margin
       << "' height='" << f.height - 2 * f.margin << "' fill='none' stroke='#444'/>\n"
       << "<text x='" << f.width / 2 << "' y='" << f.height - 8
       << "' font-size='13' text-anchor='middle' font-family='sans-serif'>phi</text>\n"
       << "<text x='14' y='" << f.height / 2
       << "' font-size='13' text-anchor='middle' font-family='sans-serif' transform='rotate(-90 14 "
       << f.height / 2 << ")'>theta</text>\n";
}

}  // namespace

std::string phase_portrait(const std::vector<std::vector<LiftedPhasePoint>>& trajectories, int width,
                           int height) {
    Frame f{width, height};
    std::ostringstream os;
    os.precision(2);
    os << std::fixed;
    header(os, f);
    for (size_t s = 0; s < trajectories.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<g fill='" << color << "'>\n";
        for (const auto& p : trajectories[s])
            os << "<circle cx='" << f.sx(mod_2pi(p.phi_lift)) << "' cy='" << f.sy(p.theta)
               << "' r='1'/>\n";
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string region_portrait(const InstabilityRegion& region, int width, int height) {
    Frame f{width, height};
    std::ostringstream os;
    os.precision(2);
    os << std::fixed;
    header(os, f);

    // manifold occupancy cells
    double cw = static_cast<double>(width - 2 * f.margin) / region.bins;
    double ch = static_cast<double>(height - 2 * f.margin) / region.theta_cells;
    os << "<g fill='#9ecae1'>\n";
    for (int b = 0; b < region.bins; ++b)
        for (int t = 0; t < region.theta_cells; ++t)
            if (region.covered[region.cell_index(b, t)])
                os << "<rect x='" << f.margin + b * cw << "' y='"
                   << f.sy(kPi * (t + 1) / region.theta_cells) << "' width='" << cw + 0.5
                   << "' height='" << ch + 0.5 << "'/>\n";
    os << "</g>\n";

    // islands
    os << "<g fill='#a1d99b'>\n";
    for (const auto& isl : region.islands)
        for (const auto& [b, t] : isl.cells)
            os << "<rect x='" << f.margin + b * cw << "' y='" << f.sy(kPi * (t + 1) / region.theta_cells)
               << "' width='" << cw + 0.5 << "' height='" << ch + 0.5 << "'/>\n";
    os << "</g>\n";

    // envelopes
    auto polyline = [&](const std::vector<double>& env, const char* color) {
        os << "<polyline fill='none' stroke='" << color << "' stroke-width='1.4' points='";
        for (int b = 0; b < region.bins; ++b)
            os << f.sx(kTwoPi * (b + 0.5) / region.bins) << ',' << f.sy(env[b]) << ' ';
        os << "'/>\n";
    };
    polyline(region.lower, "#d62728");
    polyline(region.upper, "#d62728");

    // island centers and periodic points
    for (const auto& isl : region.islands) {
        os << "<circle cx='" << f.sx(isl.phi_center) << "' cy='" << f.sy(isl.theta_center)
           << "' r='3' fill='#31a354'/>\n";
        if (isl.center_orbit)
            for (const auto& p : isl.center_orbit->points)
                os << "<circle cx='" << f.sx(p.phi) << "' cy='" << f.sy(p.theta)
                   << "' r='2.5' fill='#e6550d'/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace obl::svg
