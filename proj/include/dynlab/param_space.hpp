#ifndef DYNLAB_PARAM_SPACE_HPP
#define DYNLAB_PARAM_SPACE_HPP

#include "dynlab/dimensions.hpp"
#include "dynlab/map_spec.hpp"

#include <string>
#include <vector>

namespace dynlab {

struct RayPoint {
    double theta = 0.0;       // external angle in [0,1)
    double potential = 0.0;   // Green's-function level G > 0
    cplx c;                   // parameter
    double residual = 0.0;    // Newton residual at acceptance
    int newton_iters = 0;
};

struct RayTrace {
    std::vector<RayPoint> points;
    bool completed = false;   // reached the end of the schedule
    int fail_index = -1;
    std::string note;
};

// Parameter ray of the connectedness locus M_d: at each potential level
// solve f_c^n(c) = exp(d^n (G + 2 pi i theta)) with n chosen so the target
// modulus sits in a fixed window, Newton-continued from the previous level.
RayTrace trace_external_ray(int d, double theta, const std::vector<double>& potentials,
                            double newton_tol = 1e-12, int max_newton = 60);

std::vector<double> default_potential_schedule(double g0 = 4.0, double g_min = 1e-6);

struct CeFit {
    cplx c;
    double lambda = 0.0;      // fitted exponential growth rate of |(f^n)'(c)|
    double K = 0.0;           // fitted prefactor
    bool escaping = false;    // super-exponential growth flag
    std::vector<double> log_derivs;
};

struct CeRayReport {
    std::vector<CeFit> fits;
    double min_lambda = 0.0;  // uniform over the ray tail
    bool uniform = false;
};

// derivative growth (f_c^n)'(c) along the ray (Collet-Eckmann certification)
CeRayReport ce_along_ray(int d, const std::vector<RayPoint>& ray, int n);

struct RayDimensionPoint {
    double potential = 0.0;
    cplx c;
    DimensionComparison dims;
    bool ok = false;
};

struct RayDimensionReport {
    std::vector<RayDimensionPoint> points;
    double extrapolated = 0.0;    // Richardson-style limit toward G -> 0
    double landing_estimate = 0.0;
    bool landing_available = false;
};

// dimension estimates along ray points plus an extrapolated limit; the
// landing map estimate is computed from the final ray parameter
RayDimensionReport dimension_along_ray(int d, const std::vector<RayPoint>& ray,
                                       const std::vector<int>& subsample_indices,
                                       const DimensionConfig& cfg);

} // namespace dynlab

#endif
