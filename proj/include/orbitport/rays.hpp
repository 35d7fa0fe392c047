#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitport/lamination.hpp"
#include "orbitport/polyseq.hpp"
#include "orbitport/portrait.hpp"

namespace orbitport {

// One sample of an external ray: the point z at potential h, i.e.
// G_m(z) = h and the Bottcher argument of z at time m is the ray's angle.
struct RayPoint {
    double h = 0;
    Complex z{};
};

struct RayTrace {
    long time = 0;
    Angle angle;
    std::vector<RayPoint> points; // potentials strictly decreasing
    std::optional<Complex> landing;
    bool converged = false;
    long steps = 0;   // Newton iterations spent over the whole trace
    double h_final = 0; // smallest potential reached
};

// Numerical knobs for ray tracing. `handoff` is the composition trigger: at
// potential h the equation solved is Q_{m,n}(z) = exp(D(h + 2*pi*i*theta))
// for the least n with D_{m,n} * h >= handoff, so the target always lies in
// the far field where the Bottcher map is essentially the identity.
struct TraceParams {
    double rho = 0.75;         // geometric grid ratio between potentials
    double handoff = 27.0;     // far-field potential threshold
    double newton_tol = 1e-11; // relative residual accepted as solved
    int newton_iters = 50;     // per-point Newton budget
    int refine_depth = 48;     // grid subdivisions allowed per advance
};

// Trace the external ray of `theta` at time m from potential h_max down to
// h_min on the grid h_max * rho^j. Each accepted point satisfies
// |Q_{m,n}(z) - target| < tol * |target| with tol = newton_tol widened to
// the conditioning floor eps * D_{m,n} of double evaluation (beyond that
// floor the point is accepted when Newton stagnates at machine resolution,
// which pins z to the root as tightly as doubles allow); failed Newton
// steps refine the grid geometrically before giving up. Throws NewtonDiverged when
// refinement is exhausted without convergence, PrecriticalHit when the
// composition's derivative collapses along the way (the ray runs into a
// precritical point), StepTooLarge when every refinement keeps jumping to a
// different preimage branch, and ParseError for a bad potential range or a
// non-monic sequence.
RayTrace trace_ray(const PolynomialSequence& seq, long m, const Angle& theta,
                   double h_min, double h_max = 27.0,
                   const TraceParams& params = {});

struct LandingResult {
    Complex z{};
    bool converged = false;
    double h_final = 0;
    long steps = 0;
};

// Landing point of the ray. A rational angle is eventually periodic under
// the degree maps jointly with the phase of the sequence, so its landing
// point is a preimage of a fixed point of a return map: a moderate-depth
// trace says which fixed point and which preimage branches, and Newton
// sharpens the result to machine precision (converged then means exactly
// that). When the return structure does not resolve (overlong angle orbit,
// branch ambiguity near a critical point, near-parabolic return), falls back
// to deepening the trace and extrapolating the tail, whose approach to a
// repelling landing point is a power law in the potential: accepted when two
// consecutive Aitken values agree to land_tol under the measured contraction
// ratio, or the raw tail is flat to land_tol. Potentials stop at h_floor; if
// the criterion still fails there, throws NonConvergent.
LandingResult landing_point(const PolynomialSequence& seq, long m,
                            const Angle& theta, double land_tol = 1e-6,
                            double h_floor = 1e-30,
                            const TraceParams& params = {});

struct ColandCluster {
    Complex center{};          // mean of the member landing points
    std::vector<Angle> angles; // ascending
};

// Co-landing clusters of one time slice, sorted by smallest member angle.
struct MeasuredPortraitSlice {
    long time = 0;
    std::vector<ColandCluster> clusters;
    double cluster_eps = 0;
    std::string str() const;
};

// Land every angle and group by single-linkage at distance < cluster_eps.
// Any pair of landing points at distance in [cluster_eps, 3*cluster_eps)
// is evidence the threshold sits inside a cluster, so that throws
// AmbiguousClustering; the surviving clusters have diameter < cluster_eps
// and pairwise separation >= 3*cluster_eps.
MeasuredPortraitSlice coland_clusters(const PolynomialSequence& seq, long m,
                                      const std::vector<Angle>& angles,
                                      double cluster_eps = 1e-4,
                                      double land_tol = 1e-6);

// Side of the region cut out by the rays at theta1 and theta2 (which must
// co-land). First = the side whose angles at infinity lie in the arc
// (theta1, theta2), Second = the complementary side.
enum class SectorSide { First, Second };

std::string to_string(SectorSide side);

// Locate z relative to the sector bounded by the co-landing rays theta1,
// theta2 at time m. Escaping points are classified by their Bottcher
// argument when the branch allows; otherwise (and for the filled set) by
// crossing parity against the two traced ray polylines closed through the
// common landing point and a far-field arc. Throws OnBoundary when z lies
// within land_tol of either ray or the landing point, RealizationFailure
// when the rays do not co-land within cluster_eps.
SectorSide sector_membership(const PolynomialSequence& seq, long m,
                             const Angle& theta1, const Angle& theta2,
                             Complex z, double land_tol = 1e-6,
                             double cluster_eps = 1e-4);

// Trace the pullback endpoints of every critical arc of P at time m and pair
// the rays that co-land. Returns one matching per critical arc, in arc
// order, each sorted; the result feeds face_groups directly. Throws
// RealizationFailure when an endpoint ray fails to land or the co-landing
// clusters do not form a perfect alpha-beta pairing.
std::vector<Matching> measure_matching(const PolynomialSequence& seq,
                                       const FormalPortrait& P, long m,
                                       double cluster_eps = 1e-4);

// Co-landing structure over several times, with the clusters of consecutive
// times chained by the dynamics.
struct MeasuredPortrait {
    std::vector<MeasuredPortraitSlice> slices; // one per requested time
    // next[i][j] = index in slices[i+1] of the cluster containing the forward
    // image of slices[i].clusters[j].center, or -1 when there is none (also
    // -1 throughout when the two times are not consecutive).
    std::vector<std::vector<int>> next;
    double cluster_eps = 0;
    std::string str() const;
};

MeasuredPortrait measured_portrait(const PolynomialSequence& seq,
                                   const std::vector<long>& times,
                                   const std::vector<Angle>& angle_grid,
                                   double cluster_eps = 1e-4,
                                   double land_tol = 1e-6);

} // namespace orbitport
