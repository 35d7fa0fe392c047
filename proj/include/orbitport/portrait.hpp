#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "orbitport/angle.hpp"

namespace orbitport {

// Eventually periodic sequence of degrees d_1, d_2, ... with 2 <= d_m <= bound.
// Three presentations normalize to (preperiodic part, periodic part):
//  - periodic [d1,...]
//  - preperiodic [d1,...];[e1,...]
//  - binary word w with letter degrees: d_m = odd_degree for m odd and
//    d_{2k} = letter_degree[w[k-1]], the word repeating cyclically, so the
//    normal form is pre = [], per = degrees for m = 1..2|w|.
class DegreeSequence {
public:
    static DegreeSequence periodic(std::vector<int> degrees);
    static DegreeSequence preperiodic(std::vector<int> pre, std::vector<int> per);
    static DegreeSequence word(const std::string& w, int degree0, int degree1,
                               int odd_degree = 2);

    int degree(long m) const; // d_m for m >= 1
    // Canonical phase id: equal phases generate identical degree tails.
    long phase(long m) const;
    long phase_count() const;

    int max_degree() const;
    const std::vector<int>& pre() const { return pre_; }
    const std::vector<int>& per() const { return per_; }
    std::string str() const;

    // Exact test that the tails d_{m1+i} and d_{m2+i} (i >= 1) agree.
    static bool same_tail(const DegreeSequence& a, long m1,
                          const DegreeSequence& b, long m2);

private:
    DegreeSequence(std::vector<int> pre, std::vector<int> per);
    std::vector<int> pre_, per_;
};

struct ValidationReport {
    bool valid = false;
    long checked_until = 0;        // states examined before repetition
    long failing_time = -1;        // first m where the step m -> m+1 fails
    std::string reason;            // empty when valid
};

struct PreperiodicityCertificate {
    long preperiod = 0; // least s with A_{s+period} == A_s and matching phase
    long period = 1;
    AngleSet witness;   // A_preperiod, equal to A_{preperiod+period}
};

// One critical arc at time m together with its data at time m+1.
struct CriticalArcInfo {
    Arc arc;                 // complementary arc of A_m with length > 1/d_{m+1}
    Arc critical_value_arc;  // the complementary arc of A_{m+1} covered k times
    int covering = 0;        // k = max covering count, 2 <= k <= d_{m+1}
};

struct CriticalStructure {
    long time = 0;
    int degree = 0;                        // d_{m+1}
    std::vector<CriticalArcInfo> critical; // >= 1 for any valid step
    bool unicritical = false;              // exactly one critical arc
};

struct EquivalenceWitness {
    Angle theta;
    long m1 = 0, m2 = 0; // A1_{m1} + theta == A2_{m2}, with equal degree tails
};

// Formal orbit portrait: initial angle set A_0 evolved by theta |-> d_m*theta.
// A_m sets are derived lazily and memoized (safe for concurrent readers).
class FormalPortrait {
public:
    FormalPortrait(AngleSet a0, DegreeSequence degrees);

    const AngleSet& a0() const;
    const DegreeSequence& degrees() const { return degrees_; }
    int valence() const;

    // A_m (image sets are not required to be valid portraits to be computed).
    const AngleSet& extend(long m) const;

    // Bijectivity + cyclic order preservation at the single step m -> m+1.
    // Returns empty string when fine, else the failure reason.
    std::string check_step(long m) const;

    // Full validation: every step until the (set, degree-phase) state repeats.
    ValidationReport validate() const;

    std::string str() const;

private:
    AngleSet a0_;
    DegreeSequence degrees_;
    // Deque: growth must not invalidate references handed out by extend().
    mutable std::deque<AngleSet> cache_;
    mutable std::mutex cache_mutex_;
};

// Critical arcs of A_m and their critical value arcs at m+1. Requires only the
// single step m -> m+1 to be valid (some catalog figures never extend
// further); throws InvalidPortrait otherwise or when no arc is critical.
CriticalStructure critical_structure(const FormalPortrait& P, long m);

// Least (preperiod, period) with A_{s} == A_{s+p} and matching degree phase.
// Requires a valid portrait (throws InvalidPortrait on the first bad step).
PreperiodicityCertificate detect_preperiodicity(const FormalPortrait& P);

// Shift/rotation equivalence: searches m1, m2 in [0, shift_bound] and exact
// rotation candidates theta = b - a over pairs of angles; requires equal
// degree tails. Returns the witness minimizing (theta, m1, m2) or nullopt.
std::optional<EquivalenceWitness> equivalent(const FormalPortrait& P1,
                                             const FormalPortrait& P2,
                                             long shift_bound);

// True iff some complementary arc of A contains all of B (the sets can be
// separated by a chord). Throws SharedAngle if the sets intersect.
bool unlinked(const AngleSet& A, const AngleSet& B);

// Shift bound that suffices to decide equivalence for two valid portraits:
// past their preperiods the state sequences cycle, so searching one full
// combined cycle of offsets covers every distinct (A1_{m1}, A2_{m2}) pair.
long default_shift_bound(const FormalPortrait& P1, const FormalPortrait& P2);

// Random constant-degree portrait that is guaranteed to validate. Mixes four
// constructions: the multiply-by-d orbit of 1/(d^N - 1) (exactly one cyclic
// descent by monotonicity), the same rotated by j/(d - 1) (a rotation that
// multiplication by d fixes), same-branch backward lifts t -> (t + c)/d of
// such a set (monotone on [0,1), so cyclic order survives), and valence-2
// pairs over a denominator coprime to d (image collisions are impossible).
// General d-invariant orbits are also tried with rejection on the one-descent
// test. Denominators stay <= max_denominator, valence <= max_valence.
FormalPortrait random_valid_portrait(std::mt19937_64& rng, int max_valence,
                                     long max_denominator, int max_degree);

} // namespace orbitport
