#include "orbitport/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "orbitport/rays.hpp"
#include "orbitport/verify.hpp"

namespace orbitport {

namespace {

std::string fmt_complex(Complex z) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g%+.6gi", z.real(), z.imag());
    return buf;
}

std::string fmt_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

Angle A(long n, long d) { return Angle(n, d); }

// z^3 + 1.5z, the constant cubic both fixed-point examples share.
PolynomialSequence cubic_seq() {
    Polynomial p({Complex(0.0), Complex(1.5), Complex(0.0), Complex(1.0)});
    return PolynomialSequence::periodic({p}, SequenceBounds(3, 1.0, 1.5));
}

// The alternating rabbit. The parameter is stored to the printed precision
// of its published value, so every check that touches coordinates downstream
// carries a 1e-4 tolerance.
const Complex kRabbitC(-0.122561, 0.744862);
const Complex kOmega(-0.5, 0.8660254037844386);

PolynomialSequence rabbit_seq() {
    Polynomial odd({kOmega * kOmega * kRabbitC, Complex(0.0), Complex(1.0)});
    Polynomial even({kOmega * kRabbitC, Complex(0.0), Complex(1.0)});
    return PolynomialSequence::periodic({odd, even}, SequenceBounds(2, 1.0, 1.0));
}

// Fixed point of z^2 + c with rotation number 1/3; the rotating frame puts
// the even-time landing at w * alpha and the odd-time landing at w^2 * alpha.
Complex rabbit_alpha() { return (1.0 - std::sqrt(1.0 - 4.0 * kRabbitC)) / 2.0; }

PolynomialSequence word_sequence(const std::string& word) {
    Polynomial quad({Complex(-1.0), Complex(0.0), Complex(1.0)});
    Polynomial cubic({Complex(0.0), Complex(0.0), Complex(0.0), Complex(1.0)});
    return PolynomialSequence::word(word, quad, cubic, quad,
                                    SequenceBounds(3, 1.0, 1.0));
}

const char* kDeg6Groups =
    "{ { {7/36,11/36}*, {13/36,17/36}, {19/36,5/36} }, "
    "{ {23/36,31/36}, {25/36,29/36} }, { {35/36,1/36} } }";

Matching deg6_matching() {
    return {Chord(A(7, 36), A(11, 36)),  Chord(A(13, 36), A(17, 36)),
            Chord(A(19, 36), A(5, 36)),  Chord(A(23, 36), A(31, 36)),
            Chord(A(25, 36), A(29, 36)), Chord(A(35, 36), A(1, 36))};
}

CatalogEntry make_cubic_fixed() {
    CatalogEntry e;
    e.id = "cubic_fixed";
    e.title = "constant cubic whose 0 and 1/2 rays land on the repelling origin";
    e.sequence = cubic_seq();
    e.portrait = FormalPortrait(AngleSet({A(0, 1), A(1, 2)}),
                                DegreeSequence::periodic({3}));
    e.expected = {
        {"map", "z^3 + 1.5z", FactOrigin::Reference},
        {"fixed point", "0+0i", FactOrigin::Reference},
        {"fixed point multiplier", "1.5", FactOrigin::Computed},
        {"critical points", "+-0.707107i, each fixed", FactOrigin::Reference},
        {"landing of 0/1 and 1/2", "0+0i", FactOrigin::Reference},
    };
    return e;
}

CatalogEntry make_cubic_portrait12() {
    CatalogEntry e;
    e.id = "cubic_portrait12";
    e.title = "cubic preimage portrait landing on a prefixed point";
    e.sequence = cubic_seq();
    e.portrait = FormalPortrait(AngleSet({A(1, 6), A(1, 3)}),
                                DegreeSequence::periodic({3}));
    e.expected = {
        {"portrait from time 1", "{0/1, 1/2}", FactOrigin::Reference},
        {"preperiod, period", "1, 1", FactOrigin::Computed},
        {"co-landing point", "0+1.22474i", FactOrigin::Reference},
        {"mirror pair 2/3, 5/6 lands at", "0-1.22474i", FactOrigin::Reference},
    };
    return e;
}

CatalogEntry make_rabbit() {
    CatalogEntry e;
    e.id = "rabbit_rotation";
    e.title = "alternating quadratic pair realizing a rotated triple portrait";
    e.sequence = rabbit_seq();
    e.portrait = FormalPortrait(AngleSet({A(10, 21), A(13, 21), A(19, 21)}),
                                DegreeSequence::periodic({2}));
    Complex p = rabbit_alpha();
    e.expected = {
        {"parameter", "-0.122561+0.744862i", FactOrigin::Reference},
        {"portrait at odd times", "{17/21, 20/21, 5/21}", FactOrigin::Reference},
        {"landing time 0", fmt_complex(kOmega * p), FactOrigin::Computed},
        {"landing time 1", fmt_complex(kOmega * kOmega * p), FactOrigin::Computed},
        {"rotation to the fixed triple", "1/3", FactOrigin::Reference},
        {"unlinked from odd-time set", "false", FactOrigin::Computed},
    };
    return e;
}

CatalogEntry make_word(const std::string& word) {
    CatalogEntry e;
    e.id = "word_seq(\"" + word + "\")";
    e.title = "two-generator word sequence over z^2-1 and z^3";
    e.sequence = word_sequence(word);
    e.expected = {
        {"generators", "z^2 - 1 (letter 0 and odd times), z^3 (letter 1)",
         FactOrigin::Reference},
        {"postcritical set", "{0, -1}", FactOrigin::Reference},
        {"postcritical distance", "> 0", FactOrigin::Computed},
        {"expansion rate", "> 1", FactOrigin::Computed},
        {"boundary measurement", "within its letter bound", FactOrigin::Computed},
    };
    return e;
}

CatalogEntry make_e5() {
    CatalogEntry e;
    e.id = "e5_quadratic";
    e.title = "quadratic portrait whose critical value arc is the largest";
    e.portrait = FormalPortrait(AngleSet({A(1, 14), A(1, 7), A(2, 7)}),
                                DegreeSequence::periodic({2}));
    e.expected = {
        {"portrait from time 1", "{1/7, 2/7, 4/7}", FactOrigin::Reference},
        {"preperiod, period", "1, 1", FactOrigin::Computed},
        {"value arc at time 1", "(4/7, 1/7)", FactOrigin::Reference},
        {"value arc rank", "largest complementary arc", FactOrigin::Reference},
    };
    return e;
}

CatalogEntry make_deg6() {
    CatalogEntry e;
    e.id = "degree6_lamination";
    e.title = "degree-six critical arc with its displayed chord pairing";
    e.portrait = FormalPortrait(AngleSet({A(7, 36), A(11, 36)}),
                                DegreeSequence::preperiodic({6}, {2}));
    e.matching = deg6_matching();
    e.expected = {
        {"critical arc", "(11/36, 7/36)", FactOrigin::Reference},
        {"value arc", "(5/6, 1/6)", FactOrigin::Computed},
        {"matching count", "132", FactOrigin::Computed},
        {"groups", kDeg6Groups, FactOrigin::Reference},
    };
    return e;
}

// Extract the word from "word_seq(...)" ids; nullopt when the id is not of
// that shape at all (then it is a plain unknown id).
std::optional<std::string> parse_word_id(const std::string& id) {
    if (id.rfind("word_seq(", 0) != 0 || id.back() != ')') return std::nullopt;
    std::string inner = id.substr(9, id.size() - 10);
    if (inner.size() >= 2 && inner.front() == '"' && inner.back() == '"')
        inner = inner.substr(1, inner.size() - 2);
    return inner;
}

void check(std::vector<CatalogCheck>& out, const std::string& name, bool ok,
           const std::string& detail) {
    out.push_back({name, ok, detail});
}

// Shared by every entry that carries the pieces: generator bounds, portrait
// validity, and the measured floor on critical value arc lengths.
void common_checks(const CatalogEntry& e, std::vector<CatalogCheck>& out) {
    if (e.sequence) {
        bool ok = true;
        std::string why = "all generators inside " + e.sequence->bounds().str();
        long span = e.sequence->preperiod() + e.sequence->period();
        for (long m = 1; m <= span; ++m) {
            try {
                e.sequence->bounds().check(e.sequence->at(m));
            } catch (const Error& err) {
                ok = false;
                why = err.what();
            }
        }
        check(out, "sequence bounds", ok, why);
    }
    if (e.portrait) {
        ValidationReport rep = e.portrait->validate();
        check(out, "portrait validates", rep.valid,
              rep.valid ? "checked " + std::to_string(rep.checked_until) + " steps"
                        : rep.reason);
    }
    if (e.sequence && e.portrait) {
        // Desk-scale floor on the width of every critical value arc along one
        // full cycle of the realized portraits.
        Rational floor_len(1, 10);
        Rational least(1);
        long span = std::max<long>(
            1, e.sequence->preperiod() + e.sequence->period());
        for (long m = 0; m < span; ++m) {
            CriticalStructure cs = critical_structure(*e.portrait, m);
            for (const CriticalArcInfo& info : cs.critical)
                least = std::min(least, info.critical_value_arc.length());
        }
        std::ostringstream os;
        os << "narrowest " << least;
        check(out, "value arcs wide", least >= floor_len, os.str());
    }
}

std::vector<CatalogCheck> run_cubic_fixed(const CatalogEntry& e, const Config& cfg) {
    std::vector<CatalogCheck> out;
    common_checks(e, out);
    const Polynomial& P = e.sequence->at(1);
    check(out, "fixed point repelling",
          std::abs(P(Complex(0.0))) == 0.0 && std::abs(P.derivative(Complex(0.0))) > 1.0,
          "multiplier " + fmt_num(std::abs(P.derivative(Complex(0.0)))));
    bool crit_fixed = true;
    for (Complex c : critical_points(P))
        crit_fixed = crit_fixed && std::abs(P(c) - c) <= 1e-12;
    check(out, "critical points fixed", crit_fixed, "+-i/sqrt(2)");
    MeasuredPortraitSlice slice = coland_clusters(
        *e.sequence, 0, {A(0, 1), A(1, 2)}, cfg.cluster_eps, cfg.land_tol);
    bool ok = slice.clusters.size() == 1 &&
              std::abs(slice.clusters[0].center) <= 1e-9;
    check(out, "rays 0/1 and 1/2 land at the fixed point", ok,
          ok ? fmt_complex(slice.clusters[0].center) : slice.str());
    return out;
}

std::vector<CatalogCheck> run_cubic_portrait12(const CatalogEntry& e,
                                               const Config& cfg) {
    std::vector<CatalogCheck> out;
    common_checks(e, out);
    check(out, "portrait from time 1",
          e.portrait->extend(1) == AngleSet({A(0, 1), A(1, 2)}),
          e.portrait->extend(1).str());
    PreperiodicityCertificate cert = detect_preperiodicity(*e.portrait);
    check(out, "preperiod, period", cert.preperiod == 1 && cert.period == 1,
          std::to_string(cert.preperiod) + ", " + std::to_string(cert.period));
    Complex q(0.0, std::sqrt(1.5));
    MeasuredPortraitSlice up = coland_clusters(
        *e.sequence, 0, {A(1, 6), A(1, 3)}, cfg.cluster_eps, cfg.land_tol);
    bool up_ok = up.clusters.size() == 1 &&
                 std::abs(up.clusters[0].center - q) <= 1e-9;
    check(out, "co-landing point", up_ok,
          up_ok ? fmt_complex(up.clusters[0].center) : up.str());
    MeasuredPortraitSlice dn = coland_clusters(
        *e.sequence, 0, {A(2, 3), A(5, 6)}, cfg.cluster_eps, cfg.land_tol);
    bool dn_ok = dn.clusters.size() == 1 &&
                 std::abs(dn.clusters[0].center + q) <= 1e-9;
    check(out, "mirror pair lands at the conjugate", dn_ok,
          dn_ok ? fmt_complex(dn.clusters[0].center) : dn.str());
    const Polynomial& P = e.sequence->at(1);
    check(out, "landing point maps onto the fixed point",
          std::abs(P(q)) <= 1e-9, fmt_complex(P(q)));
    return out;
}

std::vector<CatalogCheck> run_rabbit(const CatalogEntry& e, const Config& cfg) {
    std::vector<CatalogCheck> out;
    common_checks(e, out);
    AngleSet odd({A(17, 21), A(20, 21), A(5, 21)});
    check(out, "portrait at odd times", e.portrait->extend(1) == odd,
          e.portrait->extend(1).str());
    Complex p = rabbit_alpha();
    // The parameter is only printed to 6 digits, so coordinates get 1e-4.
    MeasuredPortraitSlice s0 = coland_clusters(
        *e.sequence, 0, e.portrait->a0().angles(), cfg.cluster_eps, cfg.land_tol);
    bool ok0 = s0.clusters.size() == 1 &&
               std::abs(s0.clusters[0].center - kOmega * p) <= 1e-4;
    check(out, "landing time 0", ok0,
          ok0 ? fmt_complex(s0.clusters[0].center) : s0.str());
    MeasuredPortraitSlice s1 = coland_clusters(
        *e.sequence, 1, odd.angles(), cfg.cluster_eps, cfg.land_tol);
    bool ok1 = s1.clusters.size() == 1 &&
               std::abs(s1.clusters[0].center - kOmega * kOmega * p) <= 1e-4;
    check(out, "landing time 1", ok1,
          ok1 ? fmt_complex(s1.clusters[0].center) : s1.str());
    bool equi = ok0 && ok1 &&
                std::abs(e.sequence->at(1)(s0.clusters[0].center) -
                         s1.clusters[0].center) <= 1e-6;
    check(out, "landing points chained by the map", equi, "P_1(z_0) = z_1");
    FormalPortrait fixed_triple(AngleSet({A(1, 7), A(2, 7), A(4, 7)}),
                                DegreeSequence::periodic({2}));
    auto wit = equivalent(*e.portrait, fixed_triple,
                          default_shift_bound(*e.portrait, fixed_triple));
    bool rot_ok = wit && wit->theta == A(1, 3);
    check(out, "rotation to the fixed triple", rot_ok,
          wit ? wit->theta.str() : "no witness");
    bool linked = false;
    try {
        linked = !unlinked(e.portrait->a0(), odd);
    } catch (const Error&) {
    }
    check(out, "even and odd sets linked", linked, linked ? "true" : "false");
    return out;
}

std::vector<CatalogCheck> run_word(const CatalogEntry& e, const std::string& word,
                                   const Config& cfg) {
    std::vector<CatalogCheck> out;
    common_checks(e, out);
    // Both critical orbits live on {0, -1} exactly; measure the worst drift.
    double drift = 0.0;
    std::vector<Complex> vals = {Complex(0.0), Complex(-1.0)};
    for (long n = 1; n <= 64; ++n) {
        for (Complex& v : vals) {
            v = e.sequence->at(n)(v);
            drift = std::max(drift,
                             std::min(std::abs(v), std::abs(v + 1.0)));
        }
    }
    check(out, "postcritical set on {0, -1}", drift <= 1e-10,
          "drift " + fmt_num(drift));
    PDEstimate pd = postcritical_distance(*e.sequence, 1, 8, 25, cfg);
    check(out, "postcritical distance", pd.value > 0.0, fmt_num(pd.value));
    HyperbolicityEstimate hyp = hyperbolicity_estimate(*e.sequence, 0, 8, 25, cfg);
    check(out, "expansion rate", hyp.mu_est > 1.0, fmt_num(hyp.mu_est));
    try {
        WordReport rep = word_experiment(word, word, cfg);
        check(out, "boundary measurement", rep.bounds_ok,
              "time-0 estimate " + fmt_num(rep.side1.time0_estimate));
    } catch (const Error& err) {
        check(out, "boundary measurement", false, err.what());
    }
    return out;
}

std::vector<CatalogCheck> run_e5(const CatalogEntry& e) {
    std::vector<CatalogCheck> out;
    common_checks(e, out);
    AngleSet a1({A(1, 7), A(2, 7), A(4, 7)});
    check(out, "portrait from time 1", e.portrait->extend(1) == a1,
          e.portrait->extend(1).str());
    PreperiodicityCertificate cert = detect_preperiodicity(*e.portrait);
    check(out, "preperiod, period", cert.preperiod == 1 && cert.period == 1,
          std::to_string(cert.preperiod) + ", " + std::to_string(cert.period));
    CriticalStructure cs = critical_structure(*e.portrait, 0);
    bool arc_ok = cs.critical.size() == 1 &&
                  cs.critical[0].critical_value_arc == Arc(A(4, 7), A(1, 7)) &&
                  cs.critical[0].covering == 2;
    check(out, "value arc at time 1", arc_ok,
          cs.critical.empty() ? "none" : cs.critical[0].critical_value_arc.str());
    Rational widest(0);
    for (const Arc& arc : a1.complementary_arcs())
        widest = std::max(widest, arc.length());
    bool rank_ok = arc_ok && cs.critical[0].critical_value_arc.length() == widest;
    check(out, "value arc rank", rank_ok, "length 4/7 tops the three arcs");
    return out;
}

std::vector<CatalogCheck> run_deg6(const CatalogEntry& e) {
    std::vector<CatalogCheck> out;
    common_checks(e, out);
    CriticalStructure cs = critical_structure(*e.portrait, 0);
    bool arc_ok = cs.critical.size() == 1 &&
                  cs.critical[0].arc == Arc(A(11, 36), A(7, 36)) &&
                  cs.critical[0].critical_value_arc == Arc(A(5, 6), A(1, 6)) &&
                  cs.critical[0].covering == 6;
    check(out, "critical arc and value arc", arc_ok,
          cs.critical.empty() ? "none" : cs.critical[0].arc.str() + " -> " +
                                             cs.critical[0].critical_value_arc.str());
    PullbackEndpoints ends = pullback_endpoints(Arc(A(11, 36), A(7, 36)), 6,
                                                Arc(A(5, 6), A(1, 6)));
    std::size_t count = enumerate_matchings(ends.alphas, ends.betas).size();
    check(out, "matching count", count == 132, std::to_string(count));
    CriticalLamination lam = face_groups(*e.matching, 6, Arc(A(11, 36), A(7, 36)),
                                         Arc(A(5, 6), A(1, 6)));
    check(out, "groups", lam.str() == kDeg6Groups, lam.str());
    check(out, "boundary chord grouped", lam.boundary_realized,
          lam.boundary_chord.str());
    return out;
}

} // namespace

std::string to_string(FactOrigin origin) {
    return origin == FactOrigin::Reference ? "reference" : "computed";
}

std::string CatalogEntry::str() const {
    std::ostringstream os;
    os << id << ": " << title << "\n";
    os << "sequence: " << (sequence ? sequence->str() : "none") << "\n";
    if (portrait)
        os << "portrait: " << portrait->a0().str() << " over degrees "
           << portrait->degrees().str() << "\n";
    else
        os << "portrait: none\n";
    if (matching) {
        os << "matching:";
        for (const Chord& c : *matching) os << " " << c.str();
        os << "\n";
    }
    os << "expected:\n";
    for (const ExpectedFact& f : expected)
        os << "  " << f.key << " = " << f.value << "  [" << to_string(f.origin)
           << "]\n";
    return os.str();
}

std::vector<std::string> catalog_ids() {
    return {"cubic_fixed",  "cubic_portrait12",  "rabbit_rotation",
            "word_seq(<word>)", "e5_quadratic", "degree6_lamination"};
}

CatalogEntry get_example(const std::string& id) {
    if (id == "cubic_fixed") return make_cubic_fixed();
    if (id == "cubic_portrait12") return make_cubic_portrait12();
    if (id == "rabbit_rotation") return make_rabbit();
    if (id == "e5_quadratic") return make_e5();
    if (id == "degree6_lamination") return make_deg6();
    if (auto word = parse_word_id(id)) {
        if (word->empty())
            throw UnknownId("word_seq requires a nonempty binary word");
        for (char ch : *word)
            if (ch != '0' && ch != '1')
                throw UnknownId("word must be over {0,1}, got \"" + *word + "\"");
        return make_word(*word);
    }
    throw UnknownId("no catalog entry \"" + id + "\"");
}

std::vector<CatalogCheck> run_example(const std::string& id, const Config& cfg) {
    CatalogEntry e = get_example(id);
    if (e.id == "cubic_fixed") return run_cubic_fixed(e, cfg);
    if (e.id == "cubic_portrait12") return run_cubic_portrait12(e, cfg);
    if (e.id == "rabbit_rotation") return run_rabbit(e, cfg);
    if (e.id == "e5_quadratic") return run_e5(e);
    if (e.id == "degree6_lamination") return run_deg6(e);
    return run_word(e, *parse_word_id(e.id), cfg);
}

} // namespace orbitport
