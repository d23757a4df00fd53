#ifndef DYNLAB_MEASURES_HPP
#define DYNLAB_MEASURES_HPP

#include "dynlab/map_spec.hpp"
#include "dynlab/orbit_analysis.hpp"
#include "dynlab/raster.hpp"

#include <string>
#include <vector>

namespace dynlab {

// Weighted Dirac atoms approximating a p-conformal measure: weights
// proportional to |(F^n)'(y)|^-p over all preimages of the base point up to
// the construction depth, normalized to total mass one.
struct AtomicMeasure {
    std::vector<cplx> points;
    std::vector<double> weights;      // sum to 1
    std::vector<int> depths;          // preimage order of each atom
    double exponent = 0.0;
    cplx base_point;
    int depth = 0;
    double total_unnormalized = 0.0;  // the truncated series value
    bool patterson = false;           // h == 1 throughout; flag kept for the format

    size_t size() const { return points.size(); }

    // Restriction to atoms of depth >= min_depth, renormalized. Any fixed
    // level prefix is null in the weak limit the construction approximates,
    // so tail restriction is the right reading of the finite approximant.
    AtomicMeasure tail_restricted(int min_depth) const;
};

AtomicMeasure atomic_conformal_measure(const MapSpec& map, cplx z, double p,
                                       int n_max, long branch_budget = 1 << 20);

// p-schedule helper: masses binned on a fixed dyadic partition across a
// decreasing exponent schedule; reports the maximal bin drift between
// consecutive steps (the weak-limit surrogate).
struct ScheduleReport {
    std::vector<double> exponents;
    std::vector<double> bin_drift;    // drift[i] between step i-1 and i
    std::vector<double> final_bins;
    int bins_per_side = 0;
};

ScheduleReport conformal_p_schedule(const MapSpec& map, cplx z,
                                    const std::vector<double>& p_schedule, int n_max,
                                    const BoundingBox& bbox, int bins_per_side);

// Def 1.3 residuals on a dyadic partition. The pushforward side counts atoms
// of depth < construction depth plus the base point as a virtual depth-0
// atom, so both sides describe the same truncation and the residual measures
// conformality rather than series truncation.
struct ConformalityReport {
    double max_abs = 0.0, mean_abs = 0.0;
    double max_rel = 0.0, mean_rel = 0.0;
    int cells_used = 0, cells_skipped = 0;
    std::string note;
};

ConformalityReport conformality_residual(const AtomicMeasure& nu, const MapSpec& map,
                                         double p, const BoundingBox& bbox,
                                         int cells_per_side);

struct GaugeReport {
    // per-family [min, max] over samples and the dyadic r-grid
    double lower_family_min = 0.0, lower_family_max = 0.0;   // nu(B)/r^q
    double upper_family_min = 0.0, upper_family_max = 0.0;   // nu(B)/r^(q-eps)
    int samples_used = 0, samples_skipped = 0;
    bool pass = false;
};

GaugeReport gauge_check(const AtomicMeasure& nu, double q, double eps,
                        int sample_count, int j_min, int j_max);

struct IntegrabilityReport {
    std::vector<double> integrals;   // one per orbit index i = 1..horizon
    double sup = 0.0;
    int excluded_atoms = 0;
    bool bounded_by = false;
    double bound = 0.0;
};

IntegrabilityReport integrability_check(const AtomicMeasure& nu,
                                        const std::vector<cplx>& critical_orbit,
                                        double eta, int horizon, double user_bound,
                                        double exclusion_tol = 1e-12);

// transfer operator L^N at explicit points (exact sums over level-N
// preimages)
struct TransferValues {
    std::vector<double> values;
    std::vector<bool> singular_warning;  // point too close to a critical orbit
};

TransferValues transfer_apply(const MapSpec& map, double delta,
                              const std::vector<cplx>& points, int N,
                              long branch_budget = 1 << 21);

// Cesaro averages (1/N) sum_{i<N} L^i with per-point convergence traces
struct DensityField {
    std::vector<cplx> points;
    std::vector<double> values;
    std::vector<double> trace_last_delta;  // change contributed by the last level
    double delta = 0.0;
    int iterations = 0;
    double min_value = 0.0;
    // optional envelope diagnostics (Prop 10.1 face): measured sup of
    // average / g(z)
    double envelope_ratio = 0.0;
    bool envelope_available = false;
};

DensityField invariant_density_estimate(const MapSpec& map, double delta,
                                        const std::vector<cplx>& grid, int N,
                                        const TechSequences* tech = nullptr,
                                        const std::vector<CriticalDatum>* crit = nullptr,
                                        long branch_budget = 1 << 21);

// Birkhoff empirical measure of an orbit over real-line or angular bins
struct BinSpec {
    enum Kind { RealLine, Angle } kind = RealLine;
    int count = 64;
    double lo = -2.0, hi = 2.0;   // ignored for Angle
};

struct BirkhoffHistogram {
    std::vector<double> mass;     // normalized over binned points
    long total_points = 0;
    long out_of_range = 0;
    bool orbit_escaped = false;
    int escape_step = -1;
};

BirkhoffHistogram birkhoff_measure(const MapSpec& map, cplx x0, long n,
                                   const BinSpec& bins);

struct ErgodicStats {
    double entropy = 0.0;
    double lyapunov = 0.0;
    long orbit_length = 0;
    int bins_excluded = 0;        // bins unusable for the Jacobian estimate
    double min_jacobian = 0.0;    // over included bins (>= 1 expected)
    bool coarse_bins_warning = false;
};

// entropy via Birkhoff average of log Jac (local measure ratios on the
// histogram), Lyapunov via Birkhoff average of log |F'|
ErgodicStats entropy_lyapunov(const MapSpec& map, cplx x0, long n, int bins,
                              double lo, double hi);

// audit: nu(F^-1(A)) via atom membership vs via the transfer identity
struct PushforwardAudit {
    double membership = 0.0;
    double transfer = 0.0;
    double difference = 0.0;
};

PushforwardAudit pushforward_audit(const AtomicMeasure& nu, const MapSpec& map,
                                   const BoundingBox& cell);

// measure file helpers (JSON schema {exponent, base, depth, atoms})
void write_measure_json(const AtomicMeasure& nu, const std::string& path);
AtomicMeasure read_measure_json(const std::string& path);

} // namespace dynlab

#endif
