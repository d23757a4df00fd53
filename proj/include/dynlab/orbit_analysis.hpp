#ifndef DYNLAB_ORBIT_ANALYSIS_HPP
#define DYNLAB_ORBIT_ANALYSIS_HPP

#include "dynlab/map_spec.hpp"
#include "dynlab/raster.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dynlab {

// sigma_n = min over contributing critical points of |(F^n)'(F c)|.
// An empty contributing set gives the vacuous sequence (sigma_n = +inf),
// matching hyperbolic maps where Crit and J are disjoint.
struct SigmaSeq {
    std::vector<double> values;        // sigma_1 .. sigma_N
    std::vector<int> contributor;      // index of the minimizing critical point
    bool vacuous = false;
    int horizon = 0;

    static SigmaSeq from_values(std::vector<double> v);
    static SigmaSeq vacuous_marker(int n);
};

SigmaSeq sigma_sequence(const MapSpec& map, const std::vector<CriticalDatum>& crit,
                        int n);

enum class SummabilityVerdict { Converges, ConvergesVacuously, Diverges, Inconclusive };

struct SummabilityReport {
    SummabilityVerdict verdict = SummabilityVerdict::Inconclusive;
    double alpha = 0.0;
    bool polynomial_weight = false;
    std::vector<double> partial_sums;   // cumulative sums of sigma_n^-alpha (n-weighted if set)
    double tail_estimate = 0.0;         // geometric-tail certificate, 0 when none
    double total_estimate = 0.0;        // last partial sum + tail
    double fitted_ratio = 0.0;          // geometric ratio of the terms at the horizon
    std::string note;
    // alpha thresholds alpha < delta/(delta+mu_max) for user-supplied deltas
    std::vector<std::pair<double, double>> thresholds;
};

SummabilityReport summability_report(const SigmaSeq& sigma, double alpha,
                                     bool polynomial_weight = false,
                                     int mu_max = 2,
                                     const std::vector<double>& threshold_deltas = {});

// The three sequences of the expansion bookkeeping, built from sigma by the
// explicit construction: delta'_n = sigma_n^-alpha, gamma''_n =
// sigma_n^((1-alpha)/mu_max), with a slowly growing envelope alpha'_n =
// sqrt(max(1, log(1+n))) and constants fixed so that all four inequalities
// below hold as computed.
struct TechSequences {
    std::vector<double> alpha_n, gamma_n, delta_n;
    double alpha = 0.0;       // summability exponent
    double beta = 0.0;        // mu_max * alpha / (1 - alpha)
    int mu_max = 2;
    int deg = 2;
    int monotone_from = 0;    // alpha_n nondecreasing beyond this index
    double sum_delta = 0.0;
    double sum_gamma_beta = 0.0;
    bool feasible = false;
    std::string failure;

    // re-verifies the four invariants against a sigma sequence
    bool verify(const SigmaSeq& sigma, std::string* why = nullptr) const;
};

TechSequences technical_sequences(const SigmaSeq& sigma, double alpha, int deg,
                                  int mu_max);

struct LyapunovResult {
    double value = 0.0;
    bool minus_infinity = false;     // orbit hit a critical point
    bool orbit_escaped = false;      // left the working compact before n steps
    int steps_used = 0;
    std::vector<double> trace;       // running averages
    std::string note;
};

LyapunovResult lyapunov_exponent(const MapSpec& map, cplx z, long n,
                                 double crit_tol = 1e-12,
                                 double compact_radius = 0.0);

// Def 1.8-style uniform family check: per member, per critical point close
// to its Julia raster, the escape time E(eps) and the partial sum
// sum_{j<=E(eps)} |(F_i^j)'(c)|^-alpha; pass iff all sums < M.
struct FamilyMemberCheck {
    int member = 0;
    cplx critical_point;
    long escape_time = -1;          // -1 = infinity marker
    double partial_sum = 0.0;
    bool within_bound = false;
};

struct FamilyCheckReport {
    bool pass = false;
    bool correspondence_ok = false;
    bool parabolic_warning = false;   // a member (or the limit) has a suspect cycle
    double eps = 0.0, M = 0.0, alpha = 0.0;
    std::vector<FamilyMemberCheck> checks;
    std::string note;
};

struct FamilyCheckConfig {
    double eps = 0.1;
    double M = 10.0;
    int horizon = 200;
    int raster_k = 8;
    int raster_max_iter = 200;
    BoundingBox bbox;
};

FamilyCheckReport s_alpha_uniform_check(const std::vector<MapSpec>& family,
                                        const MapSpec& limit, double alpha,
                                        const FamilyCheckConfig& cfg);

} // namespace dynlab

#endif
