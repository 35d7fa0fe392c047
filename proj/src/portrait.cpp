#include "orbitport/portrait.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace orbitport {

namespace {

void check_degree_range(const std::vector<int>& degrees) {
    for (int d : degrees)
        if (d < 2) throw ParseError("degree " + std::to_string(d) + " is < 2");
}

} // namespace

DegreeSequence::DegreeSequence(std::vector<int> pre, std::vector<int> per)
    : pre_(std::move(pre)), per_(std::move(per)) {
    if (per_.empty()) throw ParseError("periodic degree part is empty");
    check_degree_range(pre_);
    check_degree_range(per_);
}

DegreeSequence DegreeSequence::periodic(std::vector<int> degrees) {
    return DegreeSequence({}, std::move(degrees));
}

DegreeSequence DegreeSequence::preperiodic(std::vector<int> pre, std::vector<int> per) {
    return DegreeSequence(std::move(pre), std::move(per));
}

DegreeSequence DegreeSequence::word(const std::string& w, int degree0, int degree1,
                                    int odd_degree) {
    if (w.empty()) throw ParseError("degree word is empty");
    for (char c : w)
        if (c != '0' && c != '1')
            throw ParseError("degree word must be binary, got '" + w + "'");
    // m odd -> odd_degree; m = 2k -> letter degree of a_k, word cyclic in k.
    std::vector<int> per;
    per.reserve(2 * w.size());
    for (std::size_t k = 1; k <= w.size(); ++k) {
        per.push_back(odd_degree);
        per.push_back(w[k - 1] == '0' ? degree0 : degree1);
    }
    return DegreeSequence({}, std::move(per));
}

int DegreeSequence::degree(long m) const {
    if (m < 1) throw ParseError("degree index must be >= 1");
    if (m <= static_cast<long>(pre_.size())) return pre_[m - 1];
    long i = (m - 1 - static_cast<long>(pre_.size())) % static_cast<long>(per_.size());
    return per_[i];
}

long DegreeSequence::phase(long m) const {
    long npre = static_cast<long>(pre_.size());
    if (m < npre) return m;
    return npre + (m - npre) % static_cast<long>(per_.size());
}

long DegreeSequence::phase_count() const {
    return static_cast<long>(pre_.size() + per_.size());
}

int DegreeSequence::max_degree() const {
    int d = 2;
    for (int x : pre_) d = std::max(d, x);
    for (int x : per_) d = std::max(d, x);
    return d;
}

std::string DegreeSequence::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < pre_.size(); ++i) os << (i ? "," : "") << pre_[i];
    os << "];[";
    for (std::size_t i = 0; i < per_.size(); ++i) os << (i ? "," : "") << per_[i];
    os << "]";
    return os.str();
}

bool DegreeSequence::same_tail(const DegreeSequence& a, long m1,
                               const DegreeSequence& b, long m2) {
    // Both tails are eventually periodic; agreement on a window of combined
    // preperiod plus lcm of the periods decides equality of the full tails.
    long pa = static_cast<long>(a.per_.size()), pb = static_cast<long>(b.per_.size());
    long window = static_cast<long>(a.pre_.size() + b.pre_.size()) +
                  std::lcm(pa, pb) + std::max(pa, pb);
    for (long i = 1; i <= window; ++i)
        if (a.degree(m1 + i) != b.degree(m2 + i)) return false;
    return true;
}

FormalPortrait::FormalPortrait(AngleSet a0, DegreeSequence degrees)
    : a0_(std::move(a0)), degrees_(std::move(degrees)) {
    cache_.push_back(a0_);
}

const AngleSet& FormalPortrait::a0() const { return a0_; }

int FormalPortrait::valence() const { return a0_.size(); }

const AngleSet& FormalPortrait::extend(long m) const {
    if (m < 0) throw ParseError("portrait time must be >= 0");
    std::lock_guard<std::mutex> lock(cache_mutex_);
    while (static_cast<long>(cache_.size()) <= m) {
        const AngleSet& prev = cache_.back();
        int d = degrees_.degree(static_cast<long>(cache_.size()));
        std::vector<Angle> next;
        next.reserve(prev.size());
        for (const Angle& t : prev.angles()) next.push_back(dmap(t, d));
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        if (next.size() < 2)
            throw InvalidPortrait("images of A_" +
                                  std::to_string(cache_.size() - 1) +
                                  " collapse to fewer than 2 angles");
        cache_.emplace_back(std::move(next));
    }
    return cache_[m];
}

std::string FormalPortrait::check_step(long m) const {
    const AngleSet& a = extend(m);
    int d = degrees_.degree(m + 1);
    std::vector<Angle> images;
    images.reserve(a.size());
    for (const Angle& t : a.angles()) images.push_back(dmap(t, d));

    for (int i = 0; i < a.size(); ++i)
        for (int j = i + 1; j < a.size(); ++j)
            if (images[i] == images[j])
                return "angles " + a[i].str() + " and " + a[j].str() +
                       " collide at " + images[i].str() + " under degree " +
                       std::to_string(d);

    // Cyclic order is preserved iff, reading images in source order, the
    // sequence wraps around the circle exactly once (vacuous for N = 2).
    if (a.size() >= 3) {
        int descents = 0;
        for (int i = 0; i < a.size(); ++i)
            if (images[(i + 1) % a.size()] < images[i]) ++descents;
        if (descents != 1)
            return "images of A_" + std::to_string(m) +
                   " wind with " + std::to_string(descents) +
                   " descents (cyclic order broken) under degree " +
                   std::to_string(d);
    }
    return "";
}

ValidationReport FormalPortrait::validate() const {
    ValidationReport report;
    std::unordered_map<std::string, long> seen;
    for (long m = 0;; ++m) {
        std::string key = extend(m).str() + "|" + std::to_string(degrees_.phase(m));
        if (seen.count(key)) {
            report.valid = true;
            report.checked_until = m;
            return report;
        }
        seen.emplace(std::move(key), m);
        std::string why = check_step(m);
        if (!why.empty()) {
            report.valid = false;
            report.failing_time = m;
            report.checked_until = m;
            report.reason = why;
            return report;
        }
    }
}

std::string FormalPortrait::str() const {
    return a0_.str() + " deg" + degrees_.str();
}

CriticalStructure critical_structure(const FormalPortrait& P, long m) {
    std::string why = P.check_step(m);
    if (!why.empty()) throw InvalidPortrait("at time " + std::to_string(m) + ": " + why);

    CriticalStructure cs;
    cs.time = m;
    cs.degree = P.degrees().degree(m + 1);
    const AngleSet& a = P.extend(m);
    const AngleSet& next = P.extend(m + 1);
    Rational threshold(1, cs.degree);

    for (const Arc& arc : a.complementary_arcs()) {
        if (arc.length() <= threshold) continue;
        // The covering count jumps only at images of the arc's endpoints, and
        // those are angles of A_{m+1}, so every complementary arc of A_{m+1}
        // has a well-defined count. Exactly one attains the maximum.
        CriticalArcInfo info{arc, Arc(next[0], next[1]), 0};
        int best = -1, best_count = 0, ties = 0, idx = 0;
        std::vector<Arc> candidates = next.complementary_arcs();
        for (const Arc& J : candidates) {
            int c = covering_count(arc, cs.degree, J);
            if (c > best_count) {
                best_count = c;
                best = idx;
                ties = 1;
            } else if (c == best_count) {
                ++ties;
            }
            ++idx;
        }
        if (best < 0 || ties != 1)
            throw InvalidPortrait("critical arc " + arc.str() +
                                  " has no unique maximal covering at time " +
                                  std::to_string(m));
        info.critical_value_arc = candidates[best];
        info.covering = best_count;
        cs.critical.push_back(std::move(info));
    }
    if (cs.critical.empty())
        throw InvalidPortrait("no critical arc at time " + std::to_string(m) +
                              " (step is a rotation?)");
    cs.unicritical = cs.critical.size() == 1;
    return cs;
}

PreperiodicityCertificate detect_preperiodicity(const FormalPortrait& P) {
    std::unordered_map<std::string, long> seen;
    for (long m = 0;; ++m) {
        std::string key = P.extend(m).str() + "|" + std::to_string(P.degrees().phase(m));
        auto it = seen.find(key);
        if (it != seen.end()) {
            PreperiodicityCertificate cert{it->second, m - it->second,
                                           P.extend(it->second)};
            return cert;
        }
        seen.emplace(std::move(key), m);
        std::string why = P.check_step(m);
        if (!why.empty())
            throw InvalidPortrait("at time " + std::to_string(m) + ": " + why);
    }
}

std::optional<EquivalenceWitness> equivalent(const FormalPortrait& P1,
                                             const FormalPortrait& P2,
                                             long shift_bound) {
    if (shift_bound < 0) throw ParseError("shift_bound must be >= 0");
    if (P1.valence() != P2.valence()) return std::nullopt;

    std::optional<EquivalenceWitness> best;
    for (long m1 = 0; m1 <= shift_bound; ++m1) {
        const AngleSet& a = P1.extend(m1);
        for (long m2 = 0; m2 <= shift_bound; ++m2) {
            const AngleSet& b = P2.extend(m2);
            if (!DegreeSequence::same_tail(P1.degrees(), m1, P2.degrees(), m2))
                continue;
            // A rotation mapping a onto b must send a[0] to some b[j].
            for (int j = 0; j < b.size(); ++j) {
                Angle theta = b[j] - a[0];
                std::vector<Angle> rotated;
                rotated.reserve(a.size());
                for (const Angle& t : a.angles()) rotated.push_back(t + theta);
                std::sort(rotated.begin(), rotated.end());
                if (!(AngleSet(rotated) == b)) continue;
                EquivalenceWitness w{theta, m1, m2};
                if (!best || w.theta < best->theta ||
                    (w.theta == best->theta &&
                     std::make_pair(w.m1, w.m2) < std::make_pair(best->m1, best->m2)))
                    best = w;
            }
        }
    }
    return best;
}

long default_shift_bound(const FormalPortrait& P1, const FormalPortrait& P2) {
    PreperiodicityCertificate c1 = detect_preperiodicity(P1);
    PreperiodicityCertificate c2 = detect_preperiodicity(P2);
    return std::max(c1.preperiod, c2.preperiod) + std::lcm(c1.period, c2.period);
}

bool unlinked(const AngleSet& A, const AngleSet& B) {
    for (const Angle& t : B.angles())
        if (A.contains(t))
            throw SharedAngle("angle " + t.str() + " lies in both sets");
    for (const Arc& gap : A.complementary_arcs()) {
        bool all_inside = true;
        for (const Angle& t : B.angles())
            if (!gap.contains(t)) {
                all_inside = false;
                break;
            }
        if (all_inside) return true;
    }
    return false;
}

namespace {

// Orbit of p/(d^N - 1) under multiplication by d, as a set of angles.
std::vector<Angle> dmap_orbit(long p, long den, int d) {
    std::vector<Angle> orbit;
    Angle t(p, den);
    for (;;) {
        if (std::find(orbit.begin(), orbit.end(), t) != orbit.end()) break;
        orbit.push_back(t);
        t = dmap(t, d);
    }
    return orbit;
}

} // namespace

FormalPortrait random_valid_portrait(std::mt19937_64& rng, int max_valence,
                                     long max_denominator, int max_degree) {
    int d = std::uniform_int_distribution<int>(2, max_degree)(rng);
    int family = std::uniform_int_distribution<int>(0, 3)(rng);

    if (family == 3) {
        // Valence 2 over a denominator coprime to d: multiplication by d is
        // injective mod q, so no step can ever collapse the pair.
        long q = 0;
        do {
            q = std::uniform_int_distribution<long>(3, max_denominator)(rng);
        } while (std::gcd(q, static_cast<long>(d)) != 1);
        long p1 = std::uniform_int_distribution<long>(0, q - 1)(rng);
        long p2 = p1;
        while (p2 == p1) p2 = std::uniform_int_distribution<long>(0, q - 1)(rng);
        return FormalPortrait(AngleSet({Angle(p1, q), Angle(p2, q)}),
                              DegreeSequence::periodic({d}));
    }

    // Largest valence N with d^N - 1 <= max_denominator.
    int n_max = 1;
    long den = d;
    while (n_max < max_valence && den <= (max_denominator + 1) / d) {
        den *= d;
        ++n_max;
    }
    den -= 1;
    int N = std::uniform_int_distribution<int>(std::min(2, n_max), n_max)(rng);
    long full = 1;
    for (int i = 0; i < N; ++i) full *= d;
    long base_den = full - 1;

    std::vector<Angle> angles;
    if (family == 2) {
        // General invariant orbit, rejected unless the one-descent criterion
        // holds at step 0 (the set is d-invariant, so one valid step is all
        // of them).
        for (int attempt = 0; attempt < 32 && angles.empty(); ++attempt) {
            long p = std::uniform_int_distribution<long>(1, base_den - 1)(rng);
            std::vector<Angle> orbit = dmap_orbit(p, base_den, d);
            if (orbit.size() < 2 || orbit.size() > static_cast<size_t>(max_valence))
                continue;
            FormalPortrait trial(AngleSet(orbit), DegreeSequence::periodic({d}));
            if (trial.check_step(0).empty()) angles = orbit;
        }
    }
    if (angles.empty()) {
        // Orbit of 1/(d^N - 1): powers of d are increasing, so the image
        // sequence in circular order is a single shift.
        long p = 1;
        for (int i = 0; i < N; ++i) {
            angles.emplace_back(p, base_den);
            p = (p * d) % base_den;
        }
    }

    if (d > 2 && std::uniform_int_distribution<int>(0, 1)(rng) == 1) {
        // Rotation by j/(d-1) commutes with multiplication by d mod 1.
        int j = std::uniform_int_distribution<int>(1, d - 2 > 0 ? d - 2 : 1)(rng);
        Angle rho(j, d - 1);
        for (Angle& t : angles) t = t + rho;
    }

    if (family == 1) {
        // Same-branch backward lifts; each multiplies the denominator by d.
        int lifts = std::uniform_int_distribution<int>(1, 3)(rng);
        for (int s = 0; s < lifts; ++s) {
            if (base_den > max_denominator / d) break;
            base_den *= d;
            int c = std::uniform_int_distribution<int>(0, d - 1)(rng);
            for (Angle& t : angles)
                t = Angle((t.value() + c) / d);
        }
    }

    return FormalPortrait(AngleSet(angles), DegreeSequence::periodic({d}));
}

} // namespace orbitport
