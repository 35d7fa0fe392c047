#include "orbitport/lamination.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <utility>

namespace orbitport {

Chord::Chord(Angle x, Angle y) : a(std::move(x)), b(std::move(y)) {
    if (a == b) throw ParseError("chord endpoints coincide: " + a.str());
    if (b < a) std::swap(a, b);
}

std::string Chord::str() const { return "{" + a.str() + "," + b.str() + "}"; }

PullbackEndpoints pullback_endpoints(const Arc& I_m, int d, const Arc& I_m1) {
    if (d < 2) throw ParseError("pullback degree must be >= 2");
    if (!(I_m.length() > Rational(1, d)) || dmap(I_m.start, d) != I_m1.start ||
        dmap(I_m.end, d) != I_m1.end)
        throw NotCriticalArc("arc " + I_m.str() +
                             " is not a critical arc with value arc " + I_m1.str() +
                             " under degree " + std::to_string(d));
    PullbackEndpoints out;
    for (const Angle& t : preimages(I_m1.start, d))
        if (I_m.contains_closure(t)) out.alphas.push_back(t);
    for (const Angle& t : preimages(I_m1.end, d))
        if (I_m.contains_closure(t)) out.betas.push_back(t);
    return out;
}

namespace {

struct CircPoint {
    Angle t;
    bool alpha = false;
    int chord = -1; // index into the matching, -1 when unmatched
};

// Pullback endpoints in circular order along the closure of I_m, so the
// first point is I_m.start and the last is I_m.end.
std::vector<CircPoint> circle_points(const PullbackEndpoints& pe, const Arc& I_m) {
    std::vector<CircPoint> pts;
    pts.reserve(pe.alphas.size() + pe.betas.size());
    for (const Angle& t : pe.alphas) pts.push_back({t, true, -1});
    for (const Angle& t : pe.betas) pts.push_back({t, false, -1});
    std::sort(pts.begin(), pts.end(), [&](const CircPoint& x, const CircPoint& y) {
        return (x.t - I_m.start) < (y.t - I_m.start);
    });
    return pts;
}

// Circular position used for display order: distance ccw from I_m.end, which
// puts I_m.end first, then I_m.start, then the interior of the critical arc.
Angle display_pos(const Angle& t, const Arc& I_m) { return t - I_m.end; }

} // namespace

std::vector<Matching> enumerate_matchings(const std::vector<Angle>& alphas,
                                          const std::vector<Angle>& betas) {
    if (alphas.size() != betas.size())
        throw SizeMismatch("alpha/beta preimage counts differ: " +
                           std::to_string(alphas.size()) + " vs " +
                           std::to_string(betas.size()));

    struct P {
        Angle t;
        bool alpha;
    };
    std::vector<P> pts;
    pts.reserve(2 * alphas.size());
    for (const Angle& t : alphas) pts.push_back({t, true});
    for (const Angle& t : betas) pts.push_back({t, false});
    std::sort(pts.begin(), pts.end(),
              [](const P& x, const P& y) { return x.t < y.t; });
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i - 1].t == pts[i].t)
            throw ParseError("duplicate pullback endpoint " + pts[i].t.str());

    // Noncrossing matchings of the interval [lo, hi]: the first point pairs
    // with an opposite-label point leaving evenly split sides. Rotation of
    // the circular order does not change noncrossing-ness, so a linear cut
    // anywhere is safe.
    using IdxMatching = std::vector<std::pair<int, int>>;
    std::function<std::vector<IdxMatching>(int, int)> rec = [&](int lo, int hi) {
        std::vector<IdxMatching> res;
        if (lo > hi) {
            res.emplace_back();
            return res;
        }
        for (int j = lo + 1; j <= hi; j += 2) {
            if (pts[j].alpha == pts[lo].alpha) continue;
            std::vector<IdxMatching> left = rec(lo + 1, j - 1);
            std::vector<IdxMatching> right = rec(j + 1, hi);
            for (const IdxMatching& L : left)
                for (const IdxMatching& R : right) {
                    IdxMatching m;
                    m.reserve(1 + L.size() + R.size());
                    m.emplace_back(lo, j);
                    m.insert(m.end(), L.begin(), L.end());
                    m.insert(m.end(), R.begin(), R.end());
                    res.push_back(std::move(m));
                }
        }
        return res;
    };

    std::vector<Matching> out;
    for (const IdxMatching& im : rec(0, static_cast<int>(pts.size()) - 1)) {
        Matching m;
        m.reserve(im.size());
        for (const auto& [i, j] : im) m.emplace_back(pts[i].t, pts[j].t);
        std::sort(m.begin(), m.end());
        out.push_back(std::move(m));
    }
    std::sort(out.begin(), out.end());
    return out;
}

CriticalLamination face_groups(const Matching& matching, int d,
                               const Arc& I_m, const Arc& I_m1) {
    PullbackEndpoints pe = pullback_endpoints(I_m, d, I_m1);
    std::vector<CircPoint> pts = circle_points(pe, I_m);
    const int n_pts = static_cast<int>(pts.size());

    for (int c = 0; c < static_cast<int>(matching.size()); ++c) {
        int attached = 0;
        bool labels[2] = {false, false};
        for (const Angle& e : {matching[c].a, matching[c].b}) {
            auto it = std::find_if(pts.begin(), pts.end(),
                                   [&](const CircPoint& p) { return p.t == e; });
            if (it == pts.end())
                throw ParseError("chord endpoint " + e.str() +
                                 " is not a pullback endpoint of " + I_m.str());
            if (it->chord != -1)
                throw ParseError("angle " + e.str() + " belongs to two chords");
            it->chord = c;
            labels[attached++] = it->alpha;
        }
        if (labels[0] == labels[1])
            throw ParseError("chord " + matching[c].str() +
                             " joins two preimages of the same value-arc endpoint");
    }

    // Walk the circle once. The stack of open chords names the face directly
    // inside each gap; chords are noncrossing exactly when every chord closes
    // while on top. A gap starting at an alpha maps onto I_m1 (its endpoints
    // map to I_m1's endpoints in order and it is shorter than 1/d); a gap
    // starting at a beta maps onto the complement.
    struct Face {
        int gaps = 0;
        int s_gaps = 0;
        std::vector<int> chords; // built afterwards
    };
    std::map<std::vector<int>, Face> faces;
    std::vector<std::vector<int>> parent(matching.size());
    std::vector<char> open(matching.size(), 0);
    std::vector<int> stack;

    for (int i = 0; i < n_pts; ++i) {
        int c = pts[i].chord;
        if (c >= 0) {
            if (!open[c]) {
                parent[c] = stack;
                open[c] = 1;
                stack.push_back(c);
            } else {
                if (stack.empty() || stack.back() != c)
                    throw CrossingChords("chord " + matching[c].str() +
                                         " crosses chord " +
                                         matching[stack.back()].str());
                stack.pop_back();
            }
        }
        const CircPoint& next = pts[(i + 1) % n_pts];
        if (next.alpha == pts[i].alpha)
            throw NotCriticalArc("pullback endpoints of " + I_m.str() +
                                 " do not alternate");
        Face& f = faces[stack];
        ++f.gaps;
        if (pts[i].alpha) ++f.s_gaps;
    }

    for (int c = 0; c < static_cast<int>(matching.size()); ++c) {
        auto it = faces.find(parent[c]);
        if (it != faces.end()) it->second.chords.push_back(c);
        std::vector<int> inner = parent[c];
        inner.push_back(c);
        auto in_it = faces.find(inner);
        if (in_it != faces.end()) in_it->second.chords.push_back(c);
    }

    CriticalLamination lam{.time = 0,
                           .degree = d,
                           .critical_arc = I_m,
                           .critical_value_arc = I_m1,
                           .covering = static_cast<int>(pe.alphas.size()),
                           .groups = {},
                           .boundary_chord = Chord(I_m.start, I_m.end),
                           .boundary_realized = false};

    for (const auto& [state, face] : faces) {
        if (face.gaps == 0 || face.s_gaps != face.gaps) continue;
        LaminationGroup group;
        group.degree = face.gaps;
        for (int c : face.chords) group.chords.push_back(matching[c]);
        std::sort(group.chords.begin(), group.chords.end(),
                  [&](const Chord& x, const Chord& y) {
                      Angle px = std::min(display_pos(x.a, I_m), display_pos(x.b, I_m));
                      Angle py = std::min(display_pos(y.a, I_m), display_pos(y.b, I_m));
                      return px < py;
                  });
        group.has_boundary =
            std::find(group.chords.begin(), group.chords.end(),
                      lam.boundary_chord) != group.chords.end();
        if (group.has_boundary) lam.boundary_realized = true;
        lam.groups.push_back(std::move(group));
    }
    std::sort(lam.groups.begin(), lam.groups.end(),
              [&](const LaminationGroup& x, const LaminationGroup& y) {
                  Angle px = std::min(display_pos(x.chords.front().a, I_m),
                                      display_pos(x.chords.front().b, I_m));
                  Angle py = std::min(display_pos(y.chords.front().a, I_m),
                                      display_pos(y.chords.front().b, I_m));
                  return px < py;
              });
    return lam;
}

std::string CriticalLamination::str() const {
    std::string out = "{ ";
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g) out += ", ";
        out += "{ ";
        for (std::size_t c = 0; c < groups[g].chords.size(); ++c) {
            if (c) out += ", ";
            const Chord& ch = groups[g].chords[c];
            Angle first = ch.a, second = ch.b;
            if (display_pos(second, critical_arc) < display_pos(first, critical_arc))
                std::swap(first, second);
            out += "{" + first.str() + "," + second.str() + "}";
            if (ch == boundary_chord) out += "*";
        }
        out += " }";
    }
    return out + " }";
}

std::vector<CriticalLamination> lamination_sequence(
    const FormalPortrait& P,
    const std::vector<std::vector<Matching>>& matchings_per_time) {
    if (matchings_per_time.empty())
        throw NotCriticalArc("no critical arcs supplied");

    std::vector<CriticalLamination> out;
    for (long m = 0; m < static_cast<long>(matchings_per_time.size()); ++m) {
        CriticalStructure cs = critical_structure(P, m);
        const auto& supplied = matchings_per_time[m];
        if (supplied.size() != cs.critical.size())
            throw SizeMismatch("time " + std::to_string(m) + ": " +
                               std::to_string(supplied.size()) +
                               " matchings for " +
                               std::to_string(cs.critical.size()) +
                               " critical arcs");
        for (std::size_t i = 0; i < supplied.size(); ++i) {
            const CriticalArcInfo& info = cs.critical[i];
            CriticalLamination lam = face_groups(supplied[i], cs.degree,
                                                 info.arc, info.critical_value_arc);
            lam.time = m;
            if (static_cast<int>(supplied[i].size()) != lam.covering)
                throw SizeMismatch("time " + std::to_string(m) + ", arc " +
                                   info.arc.str() + ": matching has " +
                                   std::to_string(supplied[i].size()) +
                                   " chords, expected " +
                                   std::to_string(lam.covering));
            int total = 0;
            for (const LaminationGroup& g : lam.groups) total += g.degree;
            if (total != lam.covering)
                throw SizeMismatch("time " + std::to_string(m) +
                                   ": group degrees sum to " +
                                   std::to_string(total) + ", expected " +
                                   std::to_string(lam.covering));
            out.push_back(std::move(lam));
        }
    }
    return out;
}

} // namespace orbitport
