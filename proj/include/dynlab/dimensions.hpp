#ifndef DYNLAB_DIMENSIONS_HPP
#define DYNLAB_DIMENSIONS_HPP

#include "dynlab/poincare.hpp"
#include "dynlab/raster.hpp"

#include <string>
#include <vector>

namespace dynlab {

struct BoxCountScale {
    int level = 0;        // coarsening level (0 = native raster)
    double rho = 0.0;     // covering radius (cell size at this level)
    long count = 0;       // N(K, rho)
};

struct BoxCountReport {
    std::vector<BoxCountScale> scales;      // all computed scales
    std::vector<BoxCountScale> used;        // after the scale-window policy
    double slope = 0.0;                     // least-squares estimate
    double upper = 0.0, lower = 0.0;        // max/min two-point slopes
    bool degenerate = false;
    std::string note;
};

// N(K, rho) by 2x2 OR-coarsening of the raster; the two finest levels and
// levels with N < 32 are dropped from the fit window.
BoxCountReport box_counting_dimension(const DyadicRaster& raster,
                                      int min_levels = 4);

struct WhitneySquare {
    int level = 0;        // dyadic level (side = bbox_width / 2^level)
    long count = 0;
    double diam = 0.0;
};

struct WhitneyReport {
    std::vector<WhitneySquare> per_level;
    double exponent = 0.0;                 // delta_Whit estimate
    double lo = 0.0, hi = 0.0;
    bool conclusive = false;
    double min_dist_ratio = 0.0, max_dist_ratio = 0.0;  // dist(Q,K)/diam(Q)
    std::string note;
};

// Whitney squares by dyadic subdivision of the complement (subdivide while
// dist(Q,K) < diam(Q), retain when dist >= diam); exponent located by the
// per-level geometric-ratio fit.
WhitneyReport whitney_exponent(const DyadicRaster& raster, double delta_lo = 0.05,
                               double delta_hi = 2.5, double tol = 0.02);

struct DimensionComparison {
    double poincare = 0.0, poincare_lo = 0.0, poincare_hi = 0.0;
    double whitney = 0.0, whitney_lo = 0.0, whitney_hi = 0.0;
    double box = 0.0, box_lo = 0.0, box_hi = 0.0;
    double max_pairwise_gap = 0.0;
    bool pass = false;
    bool fact81_ok = false;   // delta_Whit <= upper box estimate + slack
    std::string note;         // records that these bound HDim from above only
};

struct DimensionConfig {
    BoundingBox bbox;
    int raster_k = 11;
    int raster_max_iter = 256;
    cplx poincare_base{3.0, 0.0};
    int poincare_depth = 14;
    double poincare_tol = 0.05;
    double fact81_slack = 0.05;
};

DimensionComparison dimension_comparison(const MapSpec& map,
                                         const DimensionConfig& cfg);

} // namespace dynlab

#endif
