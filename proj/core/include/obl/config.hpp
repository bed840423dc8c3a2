#pragma once

#include <cstdint>

namespace obl {

/// All numerical tolerances and resolution knobs in one record. Every
/// operation takes (or defaults to) one of these, so a single --config file
/// controls the whole pipeline. Defaults are the documented values.
struct ToleranceConfig {
    // billiard map
    double theta_margin = 1e-9;        // admissible theta range [margin, pi - margin]
    double impact_tol = 1e-13;         // parameter tolerance of the next-impact solver
    int impact_max_iter = 200;

    // curve validation and quadrature
    int curvature_grid = 4096;         // curvature positivity samples
    double closure_tol = 1e-10;        // acceptable closure defect
    int quad_panels_min = 32;          // composite Gauss-Legendre panels over [0,2pi)

    // variational search
    double grad_tol = 1e-10;           // ||grad G||_inf at convergence
    int newton_max_iter = 120;
    double dedup_tol = 1e-6;           // vertex-set match after cyclic shift
    double hessian_fd_step = 1e-6;
    double hessian_zero_tol = 1e-7;    // |eigenvalue| below this counts as zero
    double min_vertex_gap = 1e-7;      // strict monotonicity floor for psi

    // stability
    double degeneracy_tol = 1e-8;      // |tr -+ 2| band for class "degenerate"
    double affinity_tol = 1e-10;       // three-point collinearity of trace vs 1/x_i

    // genericity
    double b_scan_threshold = 1e-8;    // |b_i| below this counts as vanishing
    double break_accept_tol = 1e-6;    // |tr -+ 2| band accepted as degenerate by break_degeneracy
    double bump_halfwidth_factor = 0.45;  // fraction of the free gap used as bump support
    double h_cap = 1e-2;               // default |h| cap for auto-chosen amplitudes

    // manifolds
    double seed_offset_rel = 1e-7;     // epsilon = rel * phase-space diameter
    double max_step = 1e-3;            // polyline spacing bound
    double max_turn = 0.2;             // radians between consecutive segments
    double tangency_angle_threshold = 1e-4;  // |crossing angle| below which "tangential"
    double intersection_tol = 1e-9;    // refinement target for crossings

    // regions
    int region_bins = 512;             // phi bins
    int region_theta_cells = 512;      // theta cells
    int island_min_cells = 10;         // smaller components are unresolved speckle
    int island_max_period = 24;
    double ric_gap = 0.02;             // per-bin theta spread allowed for a RIC candidate
    int ric_min_bin_count = 5;
    double boundary_degenerate_theta = 0.03;  // envelope closer than this to 0/pi degenerates to B_0/B_pi

    // C1-closeness diagnostic
    int c1_grid_phi = 48;
    int c1_grid_theta = 24;
};

}  // namespace obl
