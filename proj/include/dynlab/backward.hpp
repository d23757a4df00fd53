#ifndef DYNLAB_BACKWARD_HPP
#define DYNLAB_BACKWARD_HPP

#include "dynlab/map_spec.hpp"
#include "dynlab/orbit_analysis.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dynlab {

// One branch of F^-n at z: points y_1..y_n with F(y_k) = y_{k-1}, y_0 = z,
// together with the per-step derivative moduli and the branch's root-index
// path (which root of the level equation was taken at each step).
struct BackwardOrbit {
    cplx base;
    std::vector<cplx> points;
    std::vector<double> step_deriv;      // |F'(y_k)|
    std::vector<double> cum_log_deriv;   // log |(F^k)'(y_k)|
    std::vector<uint8_t> path;

    int length() const { return static_cast<int>(points.size()); }
    cplx endpoint() const { return points.empty() ? base : points.back(); }
    cplx point_at(int k) const { return k == 0 ? base : points[k - 1]; }
    double cum_deriv(int k) const { return k == 0 ? 1.0 : std::exp(cum_log_deriv[k - 1]); }
    double cumulative_deriv() const { return cum_deriv(length()); }
    // |(F^(b-a))'| along the sub-branch from index a (shallow) to b (deep)
    double segment_expansion(int a, int b) const {
        return std::exp((b ? cum_log_deriv[b - 1] : 0.0) - (a ? cum_log_deriv[a - 1] : 0.0));
    }
};

struct PreimageOptions {
    long branch_budget = 1 << 20;
    double root_tol = 1e-8;   // residual |F(y_k) - y_{k-1}| tolerance
};

// All deg^n branches of F^-n at z, multiplicity included, in deterministic
// path order.
std::vector<BackwardOrbit> preimages(const MapSpec& map, cplx z, int n,
                                     const PreimageOptions& opt = {});

// ---------------------------------------------------------------------------
// sampled boundary polygons

struct Polygon {
    std::vector<cplx> pts;
    double diameter() const;
    double max_adjacent_gap() const;
    bool contains(cplx p) const;                 // ray crossing
    double boundary_distance(cplx p) const;      // min distance to the edges
    // point-in-polygon with the module's margin convention
    bool hits(cplx p, double extra_tol = 0.0) const;
};

// Pulls the circle of radius r around z back along branch levels
// [offset+1 .. offset+depth]. Per-sample root continuation with first-order
// prediction; tracking failures are recorded, not thrown.
struct CirclePullback {
    std::vector<Polygon> levels;
    bool ok = true;
    int fail_level = -1;
    std::string note;
};

CirclePullback pull_circle(const MapSpec& map, cplx center, double r,
                           const BackwardOrbit& branch, int offset, int depth,
                           int samples = 64);

// ---------------------------------------------------------------------------
// shrinking neighborhoods (radius damped by prod(1 - delta_k))

struct ShrinkData {
    cplx center;
    double radius = 0.0;
    std::vector<double> delta_seq;
    std::vector<double> capital_delta;   // Delta_n = prod_{k<=n} (1 - delta_k)
    std::vector<Polygon> U;              // U_n approximations
    std::vector<Polygon> U_prime;        // U'_n approximations
    int first_hit = -1;                  // first n with a critical point in U_n
    int hit_crit = -1;
    bool tracking_ok = true;
    int fail_level = -1;
};

// default delta sequence when no technical sequences are certified
std::vector<double> default_delta_seq(int n);

ShrinkData shrinking_neighborhoods(const MapSpec& map, cplx z, double r,
                                   const BackwardOrbit& branch,
                                   const std::vector<double>& delta_seq,
                                   const std::vector<CriticalDatum>& crit,
                                   double hit_tol = 0.0);

// Largest Delta such that B_Delta(z) pulls back univalently along the whole
// branch (bisection to relative tolerance rel_tol); 0 when even tiny disks
// fail (e.g. the branch ends at a critical point).
double univalent_pullback_radius(const MapSpec& map, const BackwardOrbit& branch,
                                 const std::vector<CriticalDatum>& crit,
                                 double upper = 1.0, double rel_tol = 1e-3);

// fixed-radius univalence predicate (no critical point in any intermediate
// pullback component along the branch suffix)
bool univalent_on_branch(const MapSpec& map, const BackwardOrbit& branch,
                         int offset, int depth, double radius,
                         const std::vector<CriticalDatum>& crit);

// ---------------------------------------------------------------------------
// scale constants

struct ScaleConstants {
    double R = 0.0;            // critical separation scale
    double R_prime = 0.0;      // working large-scale radius
    double R_prime_cert = 0.0; // value forced by the distortion inequality
    double M = 1.0;            // distortion constant near critical points
    int tau = 0;               // measured first-return threshold
    double L = 4;              // type-2 block length
    double L_prime = 24;       // L + L''
    double L_dprime = 20;      // re-coding threshold
    double K = 1.0;            // leftmost type-2 expansion floor (measured)
    double R_2t = 0.0;
    double C_3t = 0.0;
    double sup_deriv = 1.0;
    bool certified = false;
    std::string notes;
};

ScaleConstants measure_scale_constants(const MapSpec& map,
                                       const std::vector<CriticalDatum>& crit,
                                       const TechSequences* tech,
                                       const BoundingBox& working_box);

// ---------------------------------------------------------------------------
// block decomposition

struct Block {
    char type = '2';       // '1', '2', '3'
    int length = 0;
    double expansion = 1.0;
    double radius = 0.0;   // hitting radius for types 1/3
    int hit_crit = -1;
    int hit_level = -1;    // depth (within the block) of the critical hit
    cplx terminal;
};

struct BlockCode {
    std::vector<Block> blocks;      // construction order: rightmost (nearest z) first
    bool certified = false;
    bool recoded = false;
    std::string note;

    std::string code_string() const;         // paper orientation, read right-to-left
    bool grammar_ok() const;                 // 3 only at start or after a 2
    int total_length() const;
};

BlockCode decompose_blocks(const MapSpec& map, const BackwardOrbit& branch,
                           double delta_ball, const TechSequences& tech,
                           const ScaleConstants& scales,
                           const std::vector<CriticalDatum>& crit);

BlockCode decompose_with_stopping(const MapSpec& map, const BackwardOrbit& branch,
                                  const ScaleConstants& scales,
                                  const std::vector<CriticalDatum>& crit);

// ---------------------------------------------------------------------------
// diagnostics over the preimage tree

struct BackwardClassSums {
    double sum_type1 = 0.0;     // over endpoints of 1...13 stretches
    long count_type1 = 0;
    double sum_type2_long = 0.0;
    long count_type2_long = 0;
    double sum_type2_short = 0.0;
    long count_type2_short = 0;
    // reference lines from the decomposition lemmas: 1/3, 1/36, C(p)
    double ref_type1 = 1.0 / 3.0;
    double ref_type2_long = 1.0 / 36.0;
};

BackwardClassSums backward_summability_check(const MapSpec& map, cplx z,
                                             double delta_ball, double beta,
                                             const TechSequences& tech,
                                             const ScaleConstants& scales,
                                             const std::vector<CriticalDatum>& crit,
                                             int depth,
                                             const PreimageOptions& opt = {});

struct PullbackLevel {
    int n = 0;
    double sum = 0.0;           // sum over components of diam^p * degree
    double max_diam = 0.0;
    double min_branch_deriv = 0.0;
    int components = 0;
};

struct PullbackSumReport {
    std::vector<PullbackLevel> levels;
    double total = 0.0;
    double fitted_ratio = 0.0;  // geometric ratio of the level sums
};

PullbackSumReport pullback_diameter_sum(const MapSpec& map, cplx center,
                                        double radius, double p, int n_max,
                                        const std::vector<CriticalDatum>& crit,
                                        const PreimageOptions& opt = {});

// Prop 7.2 face: max component diameter per level plus min |(F^n)'| over
// branches
PullbackSumReport pullback_contraction(const MapSpec& map, cplx center,
                                       double radius, int n_max,
                                       const std::vector<CriticalDatum>& crit,
                                       const PreimageOptions& opt = {});

struct LargeScaleSample {
    cplx x;
    std::vector<int> passage_times;     // k with F^k univalent on the pullback
    bool eps_frequent = false;          // derivative gap condition along passages
    int eps_frequent_from = -1;         // index past which consecutive passages
                                        // satisfy the gap inequality
};

struct LargeScaleReport {
    std::vector<LargeScaleSample> samples;
    double fraction_with_passages = 0.0;  // J_* surrogate
    double eps = 0.0;
    double r_prime = 0.0;
};

LargeScaleReport large_scale_statistics(const MapSpec& map,
                                        const std::vector<cplx>& samples,
                                        double r_prime, int depth, double eps,
                                        const std::vector<CriticalDatum>& crit);

// Per-level minimum of |(F^n)'(y)| over the univalence-restricted branch set
// H(z, Delta), by depth-first descent with polygon pruning. The computable
// face of the expansion envelope: the reported values times
// Delta^(1/mu_max - 1) should trend upward.
struct ExpansionEnvelope {
    std::vector<double> min_deriv;   // per level 1..depth; +inf if H empty
    std::vector<long> branch_count;
    int nondecreasing_from = -1;     // index past which min_deriv never drops
};

ExpansionEnvelope min_univalent_expansion(const MapSpec& map, cplx z, double Delta,
                                          int depth,
                                          const std::vector<CriticalDatum>& crit,
                                          int samples = 16);

// Koebe distortion certificate for a certified-univalent pullback of B_r(z),
// tested on boundary points of B_{r/2}(z).
struct KoebeCheck {
    bool pass = false;
    double worst_low = 1.0;   // min measured ratio / lower bound
    double worst_high = 1.0;  // max measured ratio / upper bound
    int points = 0;
};

KoebeCheck koebe_certify(const MapSpec& map, cplx z, double r,
                         const BackwardOrbit& branch, int samples = 16);

// ---------------------------------------------------------------------------
// preimage-tree cache (fixed-width little-endian records)

void write_preimage_cache(const std::string& path,
                          const std::array<uint8_t, 32>& map_hash, cplx z,
                          int depth, double root_tol,
                          const std::vector<BackwardOrbit>& tree);

std::vector<BackwardOrbit> read_preimage_cache(const std::string& path,
                                               const std::array<uint8_t, 32>& expect_hash,
                                               cplx* z_out = nullptr,
                                               int* depth_out = nullptr);

} // namespace dynlab

#endif
