#include <doctest.h>

#include <algorithm>
#include <random>

#include "orbitport/lamination.hpp"

using namespace orbitport;

namespace {

Angle A(const char* text) { return Angle::parse(text); }

std::vector<Angle> angles(std::initializer_list<const char*> parts) {
    std::vector<Angle> v;
    for (const char* p : parts) v.push_back(A(p));
    return v;
}

Chord C(const char* x, const char* y) { return Chord(A(x), A(y)); }

bool chords_cross(const Chord& p, const Chord& q) {
    Arc span(p.a, p.b);
    return span.contains(q.a) != span.contains(q.b);
}

// Independent enumeration: try every perfect pairing, keep the noncrossing
// alpha-beta ones, canonicalize. Feasible up to n = 7 (13!! candidates).
void brute_force(std::vector<std::pair<Angle, bool>>& pts, std::vector<char>& used,
                 Matching& cur, std::vector<Matching>& out) {
    std::size_t first = 0;
    while (first < used.size() && used[first]) ++first;
    if (first == used.size()) {
        Matching m = cur;
        std::sort(m.begin(), m.end());
        out.push_back(std::move(m));
        return;
    }
    used[first] = 1;
    for (std::size_t j = first + 1; j < used.size(); ++j) {
        if (used[j] || pts[j].second == pts[first].second) continue;
        Chord c(pts[first].first, pts[j].first);
        bool crosses = false;
        for (const Chord& prev : cur)
            if (chords_cross(prev, c)) {
                crosses = true;
                break;
            }
        if (crosses) continue;
        used[j] = 1;
        cur.push_back(c);
        brute_force(pts, used, cur, out);
        cur.pop_back();
        used[j] = 0;
    }
    used[first] = 0;
}

std::vector<Matching> brute_matchings(const std::vector<Angle>& alphas,
                                      const std::vector<Angle>& betas) {
    std::vector<std::pair<Angle, bool>> pts;
    for (const Angle& t : alphas) pts.emplace_back(t, true);
    for (const Angle& t : betas) pts.emplace_back(t, false);
    std::sort(pts.begin(), pts.end());
    std::vector<char> used(pts.size(), 0);
    Matching cur;
    std::vector<Matching> out;
    brute_force(pts, used, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

long catalan(int n) {
    static const long table[] = {1, 1, 2, 5, 14, 42, 132, 429};
    return table[n];
}

} // namespace

TEST_CASE("chords canonicalize their endpoints") {
    CHECK(C("2/7", "1/7") == C("1/7", "2/7"));
    CHECK(C("1/7", "2/7").str() == "{1/7,2/7}");
    CHECK_THROWS_AS(Chord(A("1/3"), A("1/3")), ParseError);
}

TEST_CASE("pullback endpoints of the worked critical arcs") {
    PullbackEndpoints deg6 =
        pullback_endpoints(Arc(A("11/36"), A("7/36")), 6, Arc(A("5/6"), A("1/6")));
    CHECK(deg6.alphas == angles({"5/36", "11/36", "17/36", "23/36", "29/36", "35/36"}));
    CHECK(deg6.betas == angles({"1/36", "7/36", "13/36", "19/36", "25/36", "31/36"}));

    PullbackEndpoints cubic =
        pullback_endpoints(Arc(A("1/3"), A("1/6")), 3, Arc(A("0"), A("1/2")));
    CHECK(cubic.alphas == angles({"0", "1/3", "2/3"}));
    CHECK(cubic.betas == angles({"1/6", "1/2", "5/6"}));

    PullbackEndpoints quad =
        pullback_endpoints(Arc(A("19/21"), A("10/21")), 2, Arc(A("17/21"), A("20/21")));
    CHECK(quad.alphas == angles({"17/42", "19/21"}));
    CHECK(quad.betas == angles({"10/21", "41/42"}));

    // Value arc mismatched, arc too short, or orientation flipped: all rejected.
    CHECK_THROWS_AS(pullback_endpoints(Arc(A("19/21"), A("10/21")), 2,
                                       Arc(A("20/21"), A("17/21"))),
                    NotCriticalArc);
    CHECK_THROWS_AS(pullback_endpoints(Arc(A("1/14"), A("1/7")), 2,
                                       Arc(A("1/7"), A("2/7"))),
                    NotCriticalArc);
}

TEST_CASE("matching enumeration: counts and worked sets") {
    CHECK(enumerate_matchings(angles({"0"}), angles({"1/2"})) ==
          std::vector<Matching>{{C("0", "1/2")}});

    std::vector<Matching> quad =
        enumerate_matchings(angles({"17/42", "19/21"}), angles({"10/21", "41/42"}));
    REQUIRE(quad.size() == 2);
    Matching adjacent{C("19/21", "41/42"), C("17/42", "10/21")};
    std::sort(adjacent.begin(), adjacent.end());
    Matching nested{C("10/21", "19/21"), C("17/42", "41/42")};
    std::sort(nested.begin(), nested.end());
    CHECK(std::find(quad.begin(), quad.end(), adjacent) != quad.end());
    CHECK(std::find(quad.begin(), quad.end(), nested) != quad.end());

    PullbackEndpoints deg6 =
        pullback_endpoints(Arc(A("11/36"), A("7/36")), 6, Arc(A("5/6"), A("1/6")));
    std::vector<Matching> big = enumerate_matchings(deg6.alphas, deg6.betas);
    CHECK(big.size() == 132);
    Matching paper{C("7/36", "11/36"), C("13/36", "17/36"), C("19/36", "5/36"),
                   C("23/36", "31/36"), C("25/36", "29/36"), C("35/36", "1/36")};
    std::sort(paper.begin(), paper.end());
    CHECK(std::find(big.begin(), big.end(), paper) != big.end());

    CHECK_THROWS_AS(enumerate_matchings(angles({"0", "1/3"}), angles({"1/2"})),
                    SizeMismatch);
}

TEST_CASE("matching enumeration agrees with brute force up to n = 7") {
    // Worked configurations.
    PullbackEndpoints quad =
        pullback_endpoints(Arc(A("19/21"), A("10/21")), 2, Arc(A("17/21"), A("20/21")));
    CHECK(enumerate_matchings(quad.alphas, quad.betas) ==
          brute_matchings(quad.alphas, quad.betas));

    PullbackEndpoints cubic =
        pullback_endpoints(Arc(A("1/3"), A("1/6")), 3, Arc(A("0"), A("1/2")));
    std::vector<Matching> cubic_all = enumerate_matchings(cubic.alphas, cubic.betas);
    CHECK(cubic_all.size() == catalan(3));
    CHECK(cubic_all == brute_matchings(cubic.alphas, cubic.betas));

    PullbackEndpoints deg6 =
        pullback_endpoints(Arc(A("11/36"), A("7/36")), 6, Arc(A("5/6"), A("1/6")));
    CHECK(enumerate_matchings(deg6.alphas, deg6.betas) ==
          brute_matchings(deg6.alphas, deg6.betas));

    // Synthetic strictly-alternating configuration with n = 7.
    std::vector<Angle> al, be;
    for (int i = 0; i < 7; ++i) {
        al.emplace_back(i, 7);
        be.emplace_back(2 * i + 1, 14);
    }
    std::vector<Matching> seven = enumerate_matchings(al, be);
    CHECK(seven.size() == catalan(7));
    CHECK(seven == brute_matchings(al, be));

    // Non-alternating configuration: only the nested pairing avoids crossing.
    std::vector<Angle> al2 = angles({"1/8", "2/8"});
    std::vector<Angle> be2 = angles({"5/8", "6/8"});
    std::vector<Matching> blocks = enumerate_matchings(al2, be2);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks == brute_matchings(al2, be2));
}

TEST_CASE("face groups of the degree-six figure") {
    Matching paper{C("7/36", "11/36"), C("13/36", "17/36"), C("19/36", "5/36"),
                   C("23/36", "31/36"), C("25/36", "29/36"), C("35/36", "1/36")};
    CriticalLamination lam =
        face_groups(paper, 6, Arc(A("11/36"), A("7/36")), Arc(A("5/6"), A("1/6")));

    CHECK(lam.covering == 6);
    CHECK(lam.boundary_chord == C("7/36", "11/36"));
    CHECK(lam.boundary_realized);
    REQUIRE(lam.groups.size() == 3);

    CHECK(lam.groups[0].degree == 3);
    CHECK(lam.groups[0].has_boundary);
    CHECK(lam.groups[0].chords ==
          std::vector<Chord>{C("7/36", "11/36"), C("13/36", "17/36"), C("19/36", "5/36")});
    CHECK(lam.groups[1].degree == 2);
    CHECK(lam.groups[1].chords ==
          std::vector<Chord>{C("23/36", "31/36"), C("25/36", "29/36")});
    CHECK(lam.groups[2].degree == 1);
    CHECK(lam.groups[2].chords == std::vector<Chord>{C("35/36", "1/36")});

    CHECK(lam.str() ==
          "{ { {7/36,11/36}*, {13/36,17/36}, {19/36,5/36} }, "
          "{ {23/36,31/36}, {25/36,29/36} }, { {35/36,1/36} } }");
}

TEST_CASE("face groups of the quadratic matchings") {
    Arc I_m(A("19/21"), A("10/21"));
    Arc I_m1(A("17/21"), A("20/21"));

    CriticalLamination adj = face_groups(
        {C("19/21", "41/42"), C("17/42", "10/21")}, 2, I_m, I_m1);
    REQUIRE(adj.groups.size() == 2);
    CHECK(adj.groups[0].degree == 1);
    CHECK(adj.groups[1].degree == 1);
    CHECK_FALSE(adj.boundary_realized);
    // Display order walks from I_m.end, so the chord ending there leads.
    CHECK(adj.groups[0].chords == std::vector<Chord>{C("17/42", "10/21")});
    CHECK(adj.groups[1].chords == std::vector<Chord>{C("19/21", "41/42")});

    CriticalLamination nest = face_groups(
        {C("10/21", "19/21"), C("17/42", "41/42")}, 2, I_m, I_m1);
    REQUIRE(nest.groups.size() == 1);
    CHECK(nest.groups[0].degree == 2);
    CHECK(nest.groups[0].has_boundary);
    CHECK(nest.boundary_realized);
    CHECK(nest.groups[0].chords ==
          std::vector<Chord>{C("10/21", "19/21"), C("17/42", "41/42")});
    CHECK(nest.str() == "{ { {10/21,19/21}*, {41/42,17/42} } }");
}

TEST_CASE("face groups of the cubic co-landing pattern") {
    Arc I_m(A("1/3"), A("1/6"));
    Arc I_m1(A("0"), A("1/2"));
    Matching measured{C("0", "1/2"), C("1/6", "1/3"), C("2/3", "5/6")};

    CriticalLamination lam = face_groups(measured, 3, I_m, I_m1);
    REQUIRE(lam.groups.size() == 2);
    CHECK(lam.groups[0].degree == 2);
    CHECK(lam.groups[0].has_boundary);
    CHECK(lam.groups[0].chords ==
          std::vector<Chord>{C("1/6", "1/3"), C("0", "1/2")});
    CHECK(lam.groups[1].degree == 1);
    CHECK(lam.groups[1].chords == std::vector<Chord>{C("2/3", "5/6")});
    CHECK(lam.str() == "{ { {1/6,1/3}*, {1/2,0} }, { {2/3,5/6} } }");

    int total = 0;
    for (const LaminationGroup& g : lam.groups) total += g.degree;
    CHECK(total == 3);
}

TEST_CASE("face groups accept partial matchings") {
    Arc I_m(A("19/21"), A("10/21"));
    Arc I_m1(A("17/21"), A("20/21"));

    CriticalLamination one = face_groups({C("19/21", "41/42")}, 2, I_m, I_m1);
    REQUIRE(one.groups.size() == 1);
    CHECK(one.groups[0].degree == 1);
    CHECK(one.groups[0].chords == std::vector<Chord>{C("19/21", "41/42")});

    // The boundary chord alone cuts off a face with mixed gaps: no group.
    CriticalLamination none = face_groups({C("10/21", "19/21")}, 2, I_m, I_m1);
    CHECK(none.groups.empty());
    CHECK_FALSE(none.boundary_realized);
}

TEST_CASE("face groups reject malformed matchings") {
    Arc I_m(A("1/3"), A("1/6"));
    Arc I_m1(A("0"), A("1/2"));

    CHECK_THROWS_AS(face_groups({C("0", "1/2"), C("1/3", "5/6"), C("2/3", "1/6")},
                                3, I_m, I_m1),
                    CrossingChords);
    // Endpoint outside the pullback set.
    CHECK_THROWS_AS(face_groups({C("1/4", "1/2")}, 3, I_m, I_m1), ParseError);
    // Two preimages of the same value-arc endpoint.
    CHECK_THROWS_AS(face_groups({C("0", "1/3")}, 3, I_m, I_m1), ParseError);
    // Endpoint reused by two chords.
    CHECK_THROWS_AS(face_groups({C("0", "1/2"), C("0", "1/6")}, 3, I_m, I_m1),
                    ParseError);
}

TEST_CASE("lamination sequences assemble and validate per-time data") {
    FormalPortrait deg6(AngleSet(angles({"7/36", "11/36"})),
                        DegreeSequence::preperiodic({6}, {2}));
    Matching paper{C("7/36", "11/36"), C("13/36", "17/36"), C("19/36", "5/36"),
                   C("23/36", "31/36"), C("25/36", "29/36"), C("35/36", "1/36")};
    std::vector<CriticalLamination> seq = lamination_sequence(deg6, {{paper}});
    REQUIRE(seq.size() == 1);
    CHECK(seq[0].time == 0);
    CHECK(seq[0].groups.size() == 3);
    CHECK(seq[0].str() ==
          "{ { {7/36,11/36}*, {13/36,17/36}, {19/36,5/36} }, "
          "{ {23/36,31/36}, {25/36,29/36} }, { {35/36,1/36} } }");

    FormalPortrait rot(AngleSet(angles({"10/21", "13/21", "19/21"})),
                       DegreeSequence::periodic({2}));
    std::vector<CriticalLamination> two = lamination_sequence(
        rot, {{{C("10/21", "19/21"), C("17/42", "41/42")}},
              {{C("5/21", "13/42"), C("31/42", "17/21")}}});
    REQUIRE(two.size() == 2);
    CHECK(two[0].time == 0);
    CHECK(two[1].time == 1);
    CHECK(two[1].groups.size() == 2);

    CHECK_THROWS_AS(lamination_sequence(rot, {}), NotCriticalArc);
    // Zero matchings supplied for one critical arc.
    CHECK_THROWS_AS(lamination_sequence(rot, {{}}), SizeMismatch);
    // Partial matching: chord count must equal the covering count.
    CHECK_THROWS_AS(lamination_sequence(rot, {{{C("10/21", "19/21")}}}),
                    SizeMismatch);
}

TEST_CASE("random portraits: pullback structure and group laws") {
    std::mt19937_64 rng(929292);
    for (int iter = 0; iter < 60; ++iter) {
        FormalPortrait P = random_valid_portrait(rng, 6, 5000, 6);
        for (long m = 0; m <= 1; ++m) {
            CriticalStructure cs = critical_structure(P, m);
            for (const CriticalArcInfo& info : cs.critical) {
                PullbackEndpoints pe = pullback_endpoints(
                    info.arc, cs.degree, info.critical_value_arc);
                REQUIRE(pe.alphas.size() == pe.betas.size());
                CHECK(static_cast<int>(pe.alphas.size()) == info.covering);

                // Merged along the critical arc the labels strictly alternate,
                // starting at the arc's start (an alpha) and ending at its end.
                std::vector<std::pair<Angle, bool>> merged;
                for (const Angle& t : pe.alphas)
                    merged.emplace_back(t - info.arc.start, true);
                for (const Angle& t : pe.betas)
                    merged.emplace_back(t - info.arc.start, false);
                std::sort(merged.begin(), merged.end());
                REQUIRE(merged.front().second);
                REQUIRE_FALSE(merged.back().second);
                for (std::size_t i = 1; i < merged.size(); ++i)
                    CHECK(merged[i].second != merged[i - 1].second);

                if (info.covering > 4) continue;
                std::vector<Matching> all =
                    enumerate_matchings(pe.alphas, pe.betas);
                CHECK(static_cast<long>(all.size()) == catalan(info.covering));
                Chord boundary(info.arc.start, info.arc.end);
                for (const Matching& mtch : all) {
                    CriticalLamination lam = face_groups(
                        mtch, cs.degree, info.arc, info.critical_value_arc);
                    int total = 0, with_boundary = 0;
                    for (const LaminationGroup& g : lam.groups) {
                        total += g.degree;
                        CHECK(g.degree == static_cast<int>(g.chords.size()));
                        if (g.has_boundary) ++with_boundary;
                    }
                    CHECK(total == info.covering);
                    bool in_matching =
                        std::find(mtch.begin(), mtch.end(), boundary) != mtch.end();
                    CHECK(with_boundary == (in_matching ? 1 : 0));
                    CHECK(lam.boundary_realized == in_matching);
                }
            }
        }
    }
}
