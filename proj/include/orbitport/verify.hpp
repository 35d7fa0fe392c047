#pragma once

#include <string>
#include <vector>

#include "orbitport/config.hpp"
#include "orbitport/polyseq.hpp"
#include "orbitport/portrait.hpp"

namespace orbitport {

// Approximate Julia-set points at time m by random inverse iteration: seeds
// on a circle outside the escape radius are pulled back through
// P_{m+depth}, ..., P_{m+1}, one random preimage branch per step, with depth
// chosen so every returned point has green value < 1e-6. Each point is
// certified non-interior by pulling a strictly larger seed back along the
// same branches and checking that companion still escapes. count = 0 gives
// the empty list; a failed pullback or certificate throws RootSolveFailure.
// Deterministic in (seq, m, count, cfg.seed).
std::vector<Complex> julia_sample(const PolynomialSequence& seq, long m,
                                  int count, const Config& cfg = {});

// Minimum distance between sampled critical values of the compositions
// Q_{m,n} (0 <= m < n <= n_max) and sampled Julia points at the matching
// time n. Positive values at growing horizons are the working signal of
// hyperbolicity; the exact value depends on the sample, but growing the
// horizon can only shrink it.
struct PDEstimate {
    double value = 0;
    long m_max = 0, n_max = 0;
    int julia_sample_size = 0;
    std::string str() const;
};

// Critical values are swept forward incrementally (the set for horizon n is
// P_n applied to the previous set plus the fresh critical values of P_n), so
// the estimate is monotone non-increasing in n_max by construction. Throws
// EscapingCritical as soon as a critical orbit leaves the escape radius.
PDEstimate postcritical_distance(const PolynomialSequence& seq, long m_max,
                                 long n_max, int sample,
                                 const Config& cfg = {});

// Least-squares fit of log min_z |Q'_{m,m+i}(z)| against i over sampled
// Julia points z at time m, modelling |Q'_{m,m+i}| >= C * mu^i. residual is
// the rms misfit of the regression in log space.
struct HyperbolicityEstimate {
    double C_est = 0;
    double mu_est = 0;
    double residual = 0;
    int samples = 0;
    long horizon = 0;
    std::string str() const;
};

HyperbolicityEstimate hyperbolicity_estimate(const PolynomialSequence& seq,
                                             long m, long horizon, int samples,
                                             const Config& cfg = {});

// One probe of the sector decomposition at time m+1: a point z0 inside the
// sector of the complementary arc `value_arc` of A_{m+1}, and the number of
// its P_{m+1}-preimages found in each sector at time m (indexed like the
// complementary arcs of A_m).
struct SectorProbe {
    int value_arc = 0;
    Complex z0{};
    std::vector<int> root_counts;
};

// Spot check of the sector decomposition induced by a realized portrait:
// critical points of P_{m+1} must sit exactly in the sectors of critical
// arcs, a probe's preimage count in a critical sector must be k when the
// probe sits in that arc's critical value sector and k-1 otherwise, each
// non-critical sector holds exactly one preimage when its image sector
// contains the probe and none otherwise, and every probe's counts sum to
// d_{m+1}.
struct SectorReport {
    long time = 0;
    int degree = 0;
    std::vector<int> critical_points_per_sector; // per complementary arc of A_m
    std::vector<SectorProbe> probes;             // one per arc of A_{m+1}
    bool critical_match_ok = false;
    bool counts_ok = false;
    std::string str() const;
};

// Throws RealizationFailure when the angles of A_m do not co-land, and
// propagates ray/root errors from the probes.
SectorReport sector_theorem_check(const PolynomialSequence& seq,
                                  const FormalPortrait& P, long m,
                                  const Config& cfg = {});

// Boundary measurement for a quadratic/cubic word sequence at time m: the
// bisection boundary p in (-1,0) between real points whose orbits shadow
// the postcritical track of 0 and those shadowing the track of -1, plus the
// angle theta of the symmetric ray pair (theta, 1-theta) landing there,
// found on a dyadic grid (start denominator 2^10) refined around the
// closest landing and reported with the final interval radius.
struct WordMeasurement {
    long time = 0;
    double p = 0;
    Angle theta;
    double radius = 0;
    double landing_gap = 0; // |landing(theta) - p| at the accepted angle
    std::string str() const;
};

// Throws BisectionFailure when a real orbit never resolves to a track and
// AngleSearchFailure when no dyadic ray lands near p.
WordMeasurement word_boundary(const std::string& word, long m,
                              const Config& cfg = {});

// One sequence's half of the word experiment: the letter at the first
// differing index, the boundary measurement at time m0, and the arc-length
// estimates it induces. For a quadratic letter (z^2-1 at time m0) the
// critical arc at time m0-1 measures 1 - theta and the critical value arc
// 1 - 2*theta; for a cubic letter (z^3) they measure 2/3 + 2*theta/3 and
// 2*theta. time0_estimate is the same construction for the portrait at
// time 1 pulled back through the quadratic P_1, a per-word signature used
// to tell different words apart.
struct WordSideReport {
    std::string word;
    char letter = '0';
    WordMeasurement boundary;
    double critical_arc_estimate = 0;
    double value_arc_length = 0;
    double time0_estimate = 0;
};

struct WordReport {
    long m0 = 0; // 2k for the first differing letter index k (k=1 if equal)
    bool equal_words = false;
    WordSideReport side1, side2;
    bool bounds_ok = false;
    std::string str() const;
};

// Desk-scale run of the two-word distinctness experiment on sequences that
// interleave z^2-1 at odd times with the word letters (z^2-1 or z^3) at
// even times. Measures both sequences at the first differing time m0 = 2k
// and checks the separating bounds: the cubic-side critical arc estimate is
// at least 5/6 - arc_tol while the quadratic side stays below 3/4 + arc_tol
// (their value arcs split at 1/2), so the two portraits cannot agree. Equal
// words are measured at m0 = 2 and must produce identical sides.
WordReport word_experiment(const std::string& word1, const std::string& word2,
                           const Config& cfg = {});

// Power-law fit of ray tail length against potential: for each sampled
// angle the ray is traced to depth 1e-6 and the polyline arclength below
// potential h (closed up with the landing point) is modelled as
// l <= C * h^alpha. Rays land on different (pre)periodic points with
// different local decay rates, so the uniform exponent alpha_fit is the
// smallest per-ray regression slope over the shallow tail (h >= 1e-3) and
// C_fit is the envelope constant making the bound hold on every shallow
// point. violation_fraction counts deep points (h < 1e-3) escaping the
// extrapolated bound 1.25 * C_fit * h^alpha_fit — nonzero means the
// shallow decay rate does not persist. Straight rays give alpha = 1;
// hyperbolic examples should report no violations.
struct JohnFit {
    double C_fit = 0;
    double alpha_fit = 0;
    double violation_fraction = 0;
    int samples = 0;
    std::string str() const;
};

JohnFit ray_length_diagnostic(const PolynomialSequence& seq, long m,
                              int samples, const Config& cfg = {});

} // namespace orbitport
