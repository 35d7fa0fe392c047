#pragma once

#include <string>
#include <vector>

#include "orbitport/angle.hpp"
#include "orbitport/portrait.hpp"

namespace orbitport {

// Chord of the unit disk joining two boundary angles (unordered pair; stored
// with a < b so chords compare and hash consistently).
struct Chord {
    Angle a, b;

    Chord() = default;
    Chord(Angle x, Angle y);

    std::string str() const; // "{p/q,p/q}" in stored order

    friend bool operator==(const Chord& l, const Chord& r) {
        return l.a == r.a && l.b == r.b;
    }
    friend bool operator!=(const Chord& l, const Chord& r) { return !(l == r); }
    friend bool operator<(const Chord& l, const Chord& r) {
        if (l.a != r.a) return l.a < r.a;
        return l.b < r.b;
    }
};

using Matching = std::vector<Chord>;

// The preimages of the critical value arc's endpoints that lie in the closure
// of the critical arc. Both lists come back in increasing angle order and
// have equal length k (the covering count); merged along the critical arc
// they strictly alternate alpha, beta, ..., starting with I_m.start (an
// alpha) and ending with I_m.end (a beta).
struct PullbackEndpoints {
    std::vector<Angle> alphas; // preimages of I_m1.start
    std::vector<Angle> betas;  // preimages of I_m1.end
};

// Requires I_m to be a critical arc for degree d whose critical value arc is
// I_m1, i.e. |I_m| > 1/d and the endpoint images match; NotCriticalArc else.
PullbackEndpoints pullback_endpoints(const Arc& I_m, int d, const Arc& I_m1);

// All noncrossing perfect matchings pairing each alpha with a beta, each
// matching sorted by chord, the list in lexicographic order. For 2n strictly
// alternating endpoints the count is the n-th Catalan number. Throws
// SizeMismatch when the lists' sizes differ.
std::vector<Matching> enumerate_matchings(const std::vector<Angle>& alphas,
                                          const std::vector<Angle>& betas);

// Chords bounding one face of the chord diagram whose circle gaps all map
// into the critical value arc (one preimage component of the value sector).
struct LaminationGroup {
    std::vector<Chord> chords; // in display order along the critical arc
    int degree = 0;            // circle gaps of the face (= chords when the
                               // matching is perfect)
    bool has_boundary = false; // contains the chord {I_m.start, I_m.end}
};

struct CriticalLamination {
    long time = 0;
    int degree = 0;         // d_{m+1}
    Arc critical_arc;       // I_m
    Arc critical_value_arc; // I_m1
    int covering = 0;       // k = number of chords of a full matching
    std::vector<LaminationGroup> groups;
    Chord boundary_chord;          // {I_m.start, I_m.end}
    bool boundary_realized = false; // some group contains boundary_chord

    // Nested-brace text: "{ { {7/36,11/36}*, {13/36,17/36} }, { ... } }",
    // chord endpoints ordered by circular position measured from I_m.end,
    // '*' marking the boundary chord.
    std::string str() const;
};

// Splits the disk along the matching's chords and returns one group per face
// whose circle gaps all map into I_m1. The matching may pair any subset of
// the pullback endpoints of (I_m, d, I_m1); chords must join an alpha to a
// beta, reuse no endpoint, and be pairwise noncrossing (CrossingChords).
CriticalLamination face_groups(const Matching& matching, int d,
                               const Arc& I_m, const Arc& I_m1);

// Laminations for times 0..|matchings_per_time|-1 of a valid portrait:
// matchings_per_time[m] supplies one full matching per critical arc of A_m,
// in arc order. Each matching must pair all pullback endpoints of its arc.
// Throws NotCriticalArc when the list is empty, SizeMismatch on any
// count mismatch, and propagates face_groups errors.
std::vector<CriticalLamination> lamination_sequence(
    const FormalPortrait& P,
    const std::vector<std::vector<Matching>>& matchings_per_time);

} // namespace orbitport
