#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "orbitport/lamination.hpp"
#include "orbitport/rays.hpp"

using namespace orbitport;

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

PolynomialSequence square_seq() {
    return PolynomialSequence::periodic({Polynomial({0.0, 0.0, 1.0})},
                                        SequenceBounds(2, 1, 0));
}
PolynomialSequence basilica_seq() {
    return PolynomialSequence::periodic({Polynomial({-1.0, 0.0, 1.0})},
                                        SequenceBounds(2, 1, 1));
}
PolynomialSequence cubic_seq() {
    return PolynomialSequence::periodic({Polynomial({0.0, 1.5, 0.0, 1.0})},
                                        SequenceBounds(3, 1, 1.5));
}

// Alternating rabbit: c is the root of c^3 + 2c^2 + c + 1 in the upper half
// plane and w = e^(2 pi i/3); multiplying by w conjugates the alternation
// (z^2 + w^2 c at odd times, z^2 + w c at even times) back to the constant
// sequence z^2 + c one step later, so the whole system is the classic rabbit
// seen through a rotating frame.
const Complex kRabbitC(-0.12256116687665362, 0.74486176661974424);
const Complex kOmega(-0.5, 0.8660254037844386);

PolynomialSequence rabbit_seq() {
    Polynomial odd({kOmega * kOmega * kRabbitC, Complex(0.0), Complex(1.0)});
    Polynomial even({kOmega * kRabbitC, Complex(0.0), Complex(1.0)});
    return PolynomialSequence::periodic({odd, even}, SequenceBounds(2, 1, 1));
}

// Fixed point (1 - sqrt(1-4c))/2 of z^2 + c: the one with rotation number
// 1/3 for the rabbit parameter, where the ray triple {1/7, 2/7, 4/7} lands.
Complex rabbit_alpha() {
    return (1.0 - std::sqrt(1.0 - 4.0 * kRabbitC)) / 2.0;
}

std::vector<Angle> grid21() {
    std::vector<Angle> g;
    for (long k = 0; k < 21; ++k) g.emplace_back(k, 21);
    return g;
}

} // namespace

TEST_CASE("square map rays are exactly radial") {
    auto sq = square_seq();
    RayTrace t = trace_ray(sq, 0, Angle(1, 3), 1e-8);
    REQUIRE(t.points.size() > 50);
    CHECK(t.points.front().h >= 27.0);
    CHECK(t.points.front().h < 27.0 / 0.75);
    CHECK(t.h_final <= 1e-8);
    CHECK(t.steps > 0);
    CHECK(t.steps < 20 * long(t.points.size()));
    for (size_t i = 1; i < t.points.size(); ++i)
        CHECK(t.points[i].h < t.points[i - 1].h);
    double worst = 0;
    for (const RayPoint& p : t.points) {
        Complex want = std::polar(std::exp(p.h), kTau / 3.0);
        worst = std::max(worst, std::abs(p.z - want) / std::abs(want));
    }
    CHECK(worst <= 1e-11);

    // the zero ray of a real map is the positive real axis
    RayTrace t0 = trace_ray(sq, 0, Angle(0, 1), 1e-6);
    for (const RayPoint& p : t0.points) {
        CHECK(p.z.imag() == 0.0);
        CHECK(p.z.real() > 0.0);
    }
}

TEST_CASE("deep potentials keep trace points machine-accurate") {
    // at h ~ 1e-10 the far-field composition has degree ~ 2^38; residual
    // readings are pure rounding noise there and acceptance rides on step
    // stagnation, which must still leave the points on the ray
    auto sq = square_seq();
    RayTrace t = trace_ray(sq, 0, Angle(1, 3), 1e-10);
    double worst = 0;
    for (const RayPoint& p : t.points) {
        Complex want = std::polar(std::exp(p.h), kTau / 3.0);
        worst = std::max(worst, std::abs(p.z - want) / std::abs(want));
    }
    CHECK(worst <= 1e-11);
}

TEST_CASE("square map landings hit roots of unity exactly") {
    auto sq = square_seq();
    LandingResult l = landing_point(sq, 0, Angle(1, 3));
    CHECK(l.converged);
    CHECK(std::abs(l.z - std::polar(1.0, kTau / 3.0)) <= 1e-12);
    CHECK(l.h_final <= 1e-9);
    CHECK(l.steps > 0);

    CHECK(std::abs(landing_point(sq, 0, Angle(0, 1)).z - 1.0) <= 1e-12);
    // period-3 angle orbit 1/7 -> 2/7 -> 4/7 -> 1/7
    CHECK(std::abs(landing_point(sq, 0, Angle(1, 7)).z -
                   std::polar(1.0, kTau / 7.0)) <= 1e-12);
    // preperiodic angle: 1/4 -> 1/2 -> 0 -> 0, landing at i above the fixed
    // point 1 (two pullback steps through the right square-root branches)
    CHECK(std::abs(landing_point(sq, 0, Angle(1, 4)).z - Complex(0.0, 1.0)) <=
          1e-12);
}

TEST_CASE("cubic landings pair the axis rays on the symmetric fixed points") {
    auto cs = cubic_seq();
    const Complex top(0.0, std::sqrt(1.5)); // z^3 + 1.5z = z at +-i sqrt(1.5)
    CHECK(std::abs(landing_point(cs, 0, Angle(0, 1)).z) <= 1e-12);
    CHECK(std::abs(landing_point(cs, 0, Angle(1, 2)).z) <= 1e-12);
    CHECK(std::abs(landing_point(cs, 0, Angle(1, 6)).z - top) <= 1e-12);
    CHECK(std::abs(landing_point(cs, 0, Angle(1, 3)).z - top) <= 1e-12);
    CHECK(std::abs(landing_point(cs, 0, Angle(2, 3)).z + top) <= 1e-12);
    CHECK(std::abs(landing_point(cs, 0, Angle(5, 6)).z + top) <= 1e-12);

    // real coefficients conjugate the ray of 1-theta onto the ray of theta
    Complex a = landing_point(cs, 0, Angle(1, 6)).z;
    Complex b = landing_point(cs, 0, Angle(5, 6)).z;
    CHECK(std::abs(b - std::conj(a)) <= 1e-12);

    // the zero ray of this odd real map is the positive real axis
    RayTrace t0 = trace_ray(cs, 0, Angle(0, 1), 1e-8);
    for (const RayPoint& p : t0.points) CHECK(std::abs(p.z.imag()) <= 1e-12);
}

TEST_CASE("landing commutes with the sequence maps") {
    // P_{m+1} sends the time-m ray of theta onto the time-(m+1) ray of
    // d*theta, landing points included
    auto bs = basilica_seq();
    Complex alpha = landing_point(bs, 0, Angle(1, 3)).z;
    CHECK(std::abs(alpha - (1.0 - std::sqrt(5.0)) / 2.0) <= 1e-12);
    Complex img = alpha * alpha - 1.0;
    CHECK(std::abs(img - landing_point(bs, 1, Angle(2, 3)).z) <= 1e-12);

    auto rr = rabbit_seq();
    Complex l0 = landing_point(rr, 0, Angle(10, 21)).z;
    Complex fwd = rr.at(1)(l0);
    Complex l1 = landing_point(rr, 1, Angle(20, 21)).z;
    CHECK(std::abs(fwd - l1) <= 1e-10);
}

TEST_CASE("alternating rabbit: ray triples co-land on the rotated fixed point") {
    auto rr = rabbit_seq();
    Complex p = rabbit_alpha();
    // the rotating frame carries the static triple {1/7, 2/7, 4/7} to
    // {10/21, 13/21, 19/21} at even times (shift by 2/3) landing on w*p, and
    // to {17/21, 20/21, 5/21} at odd times (shift by 1/3) landing on w^2*p
    for (long k : {10L, 13L, 19L}) {
        LandingResult l = landing_point(rr, 0, Angle(k, 21));
        CHECK(l.converged);
        CHECK(std::abs(l.z - kOmega * p) <= 1e-10);
        CHECK(l.steps < 5000);
    }
    for (long k : {17L, 20L, 5L}) {
        LandingResult l = landing_point(rr, 1, Angle(k, 21));
        CHECK(l.converged);
        CHECK(std::abs(l.z - kOmega * kOmega * p) <= 1e-10);
    }
    // halved angles land on the mirror point -w*p at time 0
    for (auto [n, d] : {std::pair{17L, 42L}, {41L, 42L}, {5L, 42L}}) {
        LandingResult l = landing_point(rr, 0, Angle(n, d));
        CHECK(std::abs(l.z + kOmega * p) <= 1e-10);
    }
    // a coarser grid walks a different path to the same landing point
    TraceParams coarse;
    coarse.rho = 0.6;
    LandingResult lc = landing_point(rr, 0, Angle(10, 21), 1e-6, 1e-30, coarse);
    CHECK(std::abs(lc.z - kOmega * p) <= 1e-10);
}

TEST_CASE("co-landing clusters on the 21-grid") {
    auto rr = rabbit_seq();
    MeasuredPortraitSlice slice = coland_clusters(rr, 0, grid21(), 1e-4);
    CHECK(slice.time == 0);
    REQUIRE(slice.clusters.size() == 19);
    int triples = 0;
    for (const ColandCluster& cl : slice.clusters) {
        if (cl.angles.size() == 1) continue;
        ++triples;
        REQUIRE(cl.angles.size() == 3);
        CHECK(cl.angles[0] == Angle(10, 21));
        CHECK(cl.angles[1] == Angle(13, 21));
        CHECK(cl.angles[2] == Angle(19, 21));
        CHECK(std::abs(cl.center - kOmega * rabbit_alpha()) <= 1e-9);
    }
    CHECK(triples == 1);
    CHECK(slice.str().find("{10/21,13/21,19/21}") != std::string::npos);
}

TEST_CASE("clustering rejects duplicates and ambiguous tolerances") {
    auto rr = rabbit_seq();
    std::vector<Angle> dup = {Angle(1, 21), Angle(1, 21)};
    CHECK_THROWS_AS(coland_clusters(rr, 0, dup), ParseError);

    // the 1/21 and 2/21 landings sit ~0.11 apart: eps = 0.05 puts that gap
    // in the undecidable band [eps, 3 eps), eps = 0.5 merges them cleanly
    std::vector<Angle> pair = {Angle(1, 21), Angle(2, 21)};
    CHECK_THROWS_AS(coland_clusters(rr, 0, pair, 0.05), AmbiguousClustering);
    MeasuredPortraitSlice merged = coland_clusters(rr, 0, pair, 0.5);
    CHECK(merged.clusters.size() == 1);
    CHECK(merged.clusters[0].angles.size() == 2);
    MeasuredPortraitSlice split = coland_clusters(rr, 0, pair, 1e-4);
    CHECK(split.clusters.size() == 2);
}

TEST_CASE("measured matchings pair pullback rays across critical arcs") {
    auto cs = cubic_seq();
    // portrait {1/6, 1/3}: one critical arc, matching of all three value-arc
    // preimage chords
    FormalPortrait P(AngleSet({Angle(1, 6), Angle(1, 3)}),
                     DegreeSequence::periodic({3}));
    auto ms = measure_matching(cs, P, 0);
    REQUIRE(ms.size() == 1);
    REQUIRE(ms[0].size() == 3);
    CHECK(ms[0][0] == Chord(Angle(0, 1), Angle(1, 2)));
    CHECK(ms[0][1] == Chord(Angle(1, 6), Angle(1, 3)));
    CHECK(ms[0][2] == Chord(Angle(2, 3), Angle(5, 6)));

    // portrait {0, 1/2}: both arcs are critical and each realizes its own
    // matching, sharing the diameter chord
    FormalPortrait F(AngleSet({Angle(0, 1), Angle(1, 2)}),
                     DegreeSequence::periodic({3}));
    auto fs = measure_matching(cs, F, 0);
    REQUIRE(fs.size() == 2);
    REQUIRE(fs[0].size() == 2);
    REQUIRE(fs[1].size() == 2);
    CHECK(fs[0][0] == Chord(Angle(0, 1), Angle(1, 2)));
    CHECK(fs[0][1] == Chord(Angle(1, 6), Angle(1, 3)));
    CHECK(fs[1][0] == Chord(Angle(0, 1), Angle(1, 2)));
    CHECK(fs[1][1] == Chord(Angle(2, 3), Angle(5, 6)));

    // the rabbit triple realizes the nested matching, not the adjacent one,
    // and alternates between the two pullback patterns with the phase
    auto rr = rabbit_seq();
    FormalPortrait R(AngleSet({Angle(10, 21), Angle(13, 21), Angle(19, 21)}),
                     DegreeSequence::periodic({2}));
    auto rm0 = measure_matching(rr, R, 0);
    REQUIRE(rm0.size() == 1);
    REQUIRE(rm0[0].size() == 2);
    CHECK(rm0[0][0] == Chord(Angle(17, 42), Angle(41, 42)));
    CHECK(rm0[0][1] == Chord(Angle(10, 21), Angle(19, 21)));
    auto rm1 = measure_matching(rr, R, 1);
    REQUIRE(rm1.size() == 1);
    REQUIRE(rm1[0].size() == 2);
    CHECK(rm1[0][0] == Chord(Angle(5, 21), Angle(17, 21)));
    CHECK(rm1[0][1] == Chord(Angle(13, 42), Angle(31, 42)));

    // each measured matching is one of the noncrossing candidates for its
    // endpoint set: the time-0 critical arc is (19/21, 10/21) with value arc
    // (17/21, 20/21)
    PullbackEndpoints pe = pullback_endpoints(
        Arc(Angle(19, 21), Angle(10, 21)), 2,
        Arc(Angle(17, 21), Angle(20, 21)));
    auto candidates = enumerate_matchings(pe.alphas, pe.betas);
    CHECK(std::find(candidates.begin(), candidates.end(), rm0[0]) !=
          candidates.end());
}

TEST_CASE("measured portrait chains clusters to their forward images") {
    auto rr = rabbit_seq();
    MeasuredPortrait mp = measured_portrait(rr, {0, 1}, grid21());
    REQUIRE(mp.slices.size() == 2);
    REQUIRE(mp.slices[0].clusters.size() == 19);
    REQUIRE(mp.slices[1].clusters.size() == 19);
    REQUIRE(mp.next.size() == 1);
    REQUIRE(mp.next[0].size() == 19);
    // every chain edge goes to the cluster holding the doubled front angle
    for (size_t j = 0; j < mp.slices[0].clusters.size(); ++j) {
        Angle doubled = dmap(mp.slices[0].clusters[j].angles.front(), 2);
        int k = mp.next[0][j];
        REQUIRE(k >= 0);
        const auto& tgt = mp.slices[1].clusters[size_t(k)].angles;
        CHECK(std::find(tgt.begin(), tgt.end(), doubled) != tgt.end());
    }
    CHECK(mp.str().find("chain") != std::string::npos);
}

TEST_CASE("sector membership splits the plane along a co-landing ray pair") {
    auto cs = cubic_seq();
    Angle a(1, 6), b(1, 3);
    // the (1/6, 1/3) sector is the upper region beyond i sqrt(1.5)
    CHECK(sector_membership(cs, 0, a, b, Complex(0.0, 2.0)) ==
          SectorSide::First);
    CHECK(sector_membership(cs, 0, a, b, Complex(0.0, 1.3)) ==
          SectorSide::First);
    CHECK(sector_membership(cs, 0, a, b, Complex(0.0, 0.9)) ==
          SectorSide::Second);
    CHECK(sector_membership(cs, 0, a, b, Complex(10.0, 0.0)) ==
          SectorSide::Second);
    CHECK(sector_membership(cs, 0, a, b, Complex(-1.5, 0.0)) ==
          SectorSide::Second);
    // interior point of the lower superattracting basin vs the real-axis pair
    CHECK(sector_membership(cs, 1, Angle(0, 1), Angle(1, 2),
                            Complex(0.0, -0.7071067811865476)) ==
          SectorSide::Second);
    // grazing the landing point is flagged, not guessed
    CHECK_THROWS_AS(sector_membership(cs, 0, a, b,
                                      Complex(0.0, 1.2247448713915890 + 1e-9)),
                    OnBoundary);
    // rays landing at different points bound no sector
    CHECK_THROWS_AS(sector_membership(cs, 0, Angle(1, 6), Angle(2, 3),
                                      Complex(0.0, 2.0)),
                    RealizationFailure);
}

TEST_CASE("a ray hitting a precritical point is refused honestly") {
    // z^2 - 6 has a Cantor filled set; the 1/4 ray runs into the critical
    // point 0 (its forward orbit -6, 30, 894... stays real), so tracing past
    // that potential must fail loudly rather than hop branches
    auto dis = PolynomialSequence::periodic({Polynomial({-6.0, 0.0, 1.0})},
                                            SequenceBounds(2, 1, 6));
    CHECK_THROWS_AS(trace_ray(dis, 0, Angle(1, 4), 1e-3), PrecriticalHit);
    // the 0 ray of the same map is fine: it lands on the beta fixed point 3
    CHECK(std::abs(landing_point(dis, 0, Angle(0, 1)).z - 3.0) <= 1e-12);
}

TEST_CASE("trace validation rejects malformed requests") {
    auto sq = square_seq();
    Angle th(1, 3);
    CHECK_THROWS_AS(trace_ray(sq, -1, th, 1e-3), ParseError);
    CHECK_THROWS_AS(trace_ray(sq, 0, th, 0.0), ParseError);
    CHECK_THROWS_AS(trace_ray(sq, 0, th, 2.0, 1.0), ParseError);
    CHECK_THROWS_AS(trace_ray(sq, 0, th, 1e-3, 400.0), ParseError);
    TraceParams bad;
    bad.rho = 1.0;
    CHECK_THROWS_AS(trace_ray(sq, 0, th, 1e-3, 27.0, bad), ParseError);
    CHECK_THROWS_AS(landing_point(sq, 0, th, 0.0), ParseError);

    auto scaled = PolynomialSequence::periodic({Polynomial({0.0, 0.0, 2.0})},
                                               SequenceBounds(2, 2, 0));
    CHECK_THROWS_AS(trace_ray(scaled, 0, th, 1e-3), MonicRequired);
}
