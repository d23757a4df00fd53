#ifndef DYNLAB_POINCARE_HPP
#define DYNLAB_POINCARE_HPP

#include "dynlab/backward.hpp"
#include "dynlab/map_spec.hpp"

#include <string>
#include <vector>

namespace dynlab {

struct PoincareLevels {
    std::vector<double> level_sums;   // S_n(delta), n = 1..n_max
    std::vector<double> cumulative;
    double delta = 0.0;
    bool admissibility_warning = false;
    std::string note;
};

// Per-level log |(F^n)'(y)| over the full preimage tree; computed once and
// shared across delta evaluations.
struct PreimageLogTree {
    std::vector<std::vector<double>> logs;   // logs[n-1][i]
    cplx base;
    int depth = 0;

    double level_sum(int n, double delta) const;
};

PreimageLogTree enumerate_log_tree(const MapSpec& map, cplx z, int n_max,
                                   const PreimageOptions& opt = {});

// admissibility: distance from the critical forward orbits (warning only)
bool is_admissible(const MapSpec& map, const std::vector<CriticalDatum>& crit,
                   cplx z, double adm_tol = 1e-6, int horizon = 200);

PoincareLevels poincare_partial(const MapSpec& map, cplx z, double delta, int n_max,
                                const std::vector<CriticalDatum>& crit,
                                const PreimageOptions& opt = {});

// restricted to branches along which B_Delta(z) pulls back univalently
PoincareLevels restricted_poincare_partial(const MapSpec& map, cplx z, double delta,
                                           double Delta, int n_max,
                                           const std::vector<CriticalDatum>& crit,
                                           const PreimageOptions& opt = {});

struct ExponentEstimate {
    double lo = 0.0, hi = 0.0, value = 0.0;
    bool conclusive = false;
    double ratio_at_value = 0.0;   // fitted per-level geometric ratio
    double fit_residual = 0.0;     // rms residual of the log-linear fit
    int depth = 0;
    std::string note;
};

ExponentEstimate estimate_poincare_exponent(const MapSpec& map, cplx z, int n_max,
                                            double tol,
                                            const std::vector<CriticalDatum>& crit,
                                            const PreimageOptions& opt = {});

// same estimator on a precomputed tree (used by the dimension harness)
ExponentEstimate estimate_exponent_on_tree(const PreimageLogTree& tree, double tol);

enum class DivergenceVerdict { DivergentConsistent, ConvergentSide, Inconclusive };

struct DivergenceProbe {
    DivergenceVerdict verdict = DivergenceVerdict::Inconclusive;
    std::vector<double> cumulative;
    double level_ratio = 0.0;
    std::string growth_law;   // "geometric", "linear", "logarithmic", "plateau"
};

DivergenceProbe divergence_type_probe(const MapSpec& map, cplx z, double delta,
                                      int n_max,
                                      const PreimageOptions& opt = {});

} // namespace dynlab

#endif
