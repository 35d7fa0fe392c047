#include "orbitport/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "orbitport/rays.hpp"

namespace orbitport {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInf = std::numeric_limits<double>::infinity();

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

TraceParams trace_params(const Config& cfg) {
    TraceParams tp;
    tp.rho = cfg.ratio;
    tp.handoff = cfg.h_big;
    tp.newton_tol = cfg.newton_tol;
    return tp;
}

// Run fn(0..n-1) on up to `threads` workers; fn must not throw. Each index
// writes its own output slot, so the result is identical to the serial run.
void for_each_index(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

// Least-squares line y = a + b*x; returns {a, b, rms residual}.
struct LineFit {
    double a = 0, b = 0, rms = 0;
};

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = static_cast<double>(xs.size());
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    LineFit f;
    f.b = sxy / sxx;
    f.a = my - f.b * mx;
    double se = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double e = ys[i] - f.a - f.b * xs[i];
        se += e * e;
    }
    f.rms = std::sqrt(se / n);
    return f;
}

std::uint64_t mix_seed(std::uint64_t seed, long m) {
    return seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(m + 1));
}

} // namespace

std::vector<Complex> julia_sample(const PolynomialSequence& seq, long m,
                                  int count, const Config& cfg) {
    if (m < 0) throw ParseError("julia_sample: time must be >= 0");
    if (count < 0) throw ParseError("julia_sample: count must be >= 0");
    std::vector<Complex> out;
    if (count == 0) return out;
    out.reserve(count);

    const double R0 = escape_radius(seq.bounds()) + 1.0;
    // Depth so that the pulled-back green value log(2*R0)/D is far below the
    // 1e-6 certificate threshold.
    const double need = 1e7 * std::log(2.0 * R0);
    long depth = 0;
    for (double D = 1; D < need; ++depth) D *= seq.at(m + depth + 1).degree();

    std::mt19937_64 rng(mix_seed(cfg.seed, m));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int k = 0; k < count; ++k) {
        const double u = kTwoPi * unif(rng);
        Complex z = R0 * Complex(std::cos(u), std::sin(u));
        Complex zc = 1.25 * z; // escaping companion, same branch chain
        for (long j = depth; j >= 1; --j) {
            const Polynomial& p = seq.at(m + j);
            std::vector<Complex> roots = preimages(p, z);
            z = roots[rng() % roots.size()];
            Complex best = zc;
            double best_d = kInf;
            for (Complex r : preimages(p, zc)) {
                double dd = std::abs(r - z);
                if (dd < best_d) { best_d = dd; best = r; }
            }
            zc = best;
        }
        GreenResult gz = green(seq, m, z, 1e-12, cfg.iter_cap);
        if (gz.value >= 1e-6)
            throw RootSolveFailure("julia_sample: pullback of sample " +
                                   std::to_string(k) + " kept green value " +
                                   fmt_num(gz.value));
        GreenResult gc = green(seq, m, zc, 1e-12, cfg.iter_cap);
        if (!gc.escaping || std::abs(zc - z) > 1e-2)
            throw RootSolveFailure(
                "julia_sample: non-interior certificate failed for sample " +
                std::to_string(k) + " (companion at distance " +
                fmt_num(std::abs(zc - z)) + ")");
        out.push_back(z);
    }
    return out;
}

std::string PDEstimate::str() const {
    std::ostringstream os;
    os << "postcritical distance >= " << fmt_num(value) << " over m <= "
       << m_max << ", n <= " << n_max << " (" << julia_sample_size
       << " Julia points per time)";
    return os.str();
}

PDEstimate postcritical_distance(const PolynomialSequence& seq, long m_max,
                                 long n_max, int sample, const Config& cfg) {
    if (m_max < 0 || n_max <= m_max)
        throw ParseError("postcritical_distance: need 0 <= m_max < n_max");
    if (sample < 1) throw ParseError("postcritical_distance: sample must be >= 1");

    const double R = escape_radius(seq.bounds());
    std::vector<Complex> vals; // critical values of every Q_{m,n} ending now
    double pd = kInf;
    for (long n = 1; n <= n_max; ++n) {
        const Polynomial& p = seq.at(n);
        for (Complex& v : vals) v = p(v);
        for (Complex c : critical_points(p)) vals.push_back(p(c));
        for (Complex v : vals)
            if (std::abs(v) > R)
                throw EscapingCritical("critical value " + fmt_complex(v) +
                                       " leaves the escape radius " +
                                       fmt_num(R) + " at time " +
                                       std::to_string(n));
        for (Complex w : julia_sample(seq, n, sample, cfg))
            for (Complex v : vals) pd = std::min(pd, std::abs(v - w));
    }
    return {pd, m_max, n_max, sample};
}

std::string HyperbolicityEstimate::str() const {
    std::ostringstream os;
    os << "|Q'| >= " << fmt_num(C_est) << " * " << fmt_num(mu_est)
       << "^i (rms " << fmt_num(residual) << ", " << samples
       << " points, horizon " << horizon << ")";
    return os.str();
}

HyperbolicityEstimate hyperbolicity_estimate(const PolynomialSequence& seq,
                                             long m, long horizon, int samples,
                                             const Config& cfg) {
    if (horizon < 2) throw ParseError("hyperbolicity_estimate: horizon must be >= 2");
    if (samples < 1) throw ParseError("hyperbolicity_estimate: samples must be >= 1");
    std::vector<Complex> pts = julia_sample(seq, m, samples, cfg);

    std::vector<double> xs, ys;
    for (long i = 1; i <= horizon; ++i) {
        double env = kInf;
        for (Complex z : pts) {
            EvalResult ev = evaluate(seq, m, m + i, z);
            double g = std::abs(ev.derivative);
            if (ev.overflow || !std::isfinite(g) || g == 0.0)
                throw RootSolveFailure(
                    "hyperbolicity_estimate: degenerate derivative at depth " +
                    std::to_string(i));
            env = std::min(env, g);
        }
        xs.push_back(static_cast<double>(i));
        ys.push_back(std::log(env));
    }
    LineFit f = fit_line(xs, ys);
    return {std::exp(f.a), std::exp(f.b), f.rms, samples, horizon};
}

std::string SectorReport::str() const {
    std::ostringstream os;
    os << "sectors at time " << time << " (degree " << degree << "): critical[";
    for (size_t i = 0; i < critical_points_per_sector.size(); ++i)
        os << (i ? "," : "") << critical_points_per_sector[i];
    os << "]";
    for (const SectorProbe& pr : probes) {
        os << "; probe arc " << pr.value_arc << " @ " << fmt_complex(pr.z0)
           << " -> [";
        for (size_t i = 0; i < pr.root_counts.size(); ++i)
            os << (i ? "," : "") << pr.root_counts[i];
        os << "]";
    }
    os << "; critical sectors " << (critical_match_ok ? "match" : "MISMATCH")
       << ", counts " << (counts_ok ? "ok" : "WRONG");
    return os.str();
}

SectorReport sector_theorem_check(const PolynomialSequence& seq,
                                  const FormalPortrait& P, long m,
                                  const Config& cfg) {
    if (m < 0) throw ParseError("sector_theorem_check: time must be >= 0");
    const AngleSet& a0 = P.extend(m);
    const AngleSet& a1 = P.extend(m + 1);
    MeasuredPortraitSlice slice = coland_clusters(seq, m, a0.angles(),
                                                  cfg.cluster_eps, cfg.land_tol);
    if (slice.clusters.size() != 1)
        throw RealizationFailure("sector_theorem_check: the angles " + a0.str() +
                                 " land on " +
                                 std::to_string(slice.clusters.size()) +
                                 " distinct points at time " + std::to_string(m));

    const std::vector<Arc> arcs = a0.complementary_arcs();
    const std::vector<Arc> arcs1 = a1.complementary_arcs();
    const CriticalStructure cs = critical_structure(P, m);
    const int d = cs.degree;

    // Which sector holds each critical point of P_{m+1}. Sectors of
    // consecutive co-landing rays partition the plane, so each point lands
    // in exactly one First side.
    auto sector_of = [&](Complex z) {
        for (size_t i = 0; i < arcs.size(); ++i)
            if (sector_membership(seq, m, arcs[i].start, arcs[i].end, z,
                                  cfg.land_tol, cfg.cluster_eps) ==
                SectorSide::First)
                return static_cast<int>(i);
        throw RealizationFailure("sector_theorem_check: point " +
                                 fmt_complex(z) + " is in no sector at time " +
                                 std::to_string(m));
    };

    SectorReport rep;
    rep.time = m;
    rep.degree = d;
    rep.critical_points_per_sector.assign(arcs.size(), 0);
    for (Complex c : critical_points(seq.at(m + 1)))
        ++rep.critical_points_per_sector[sector_of(c)];

    // The critical arcs and only they carry critical points.
    rep.critical_match_ok = true;
    auto critical_info = [&](const Arc& a) -> const CriticalArcInfo* {
        for (const CriticalArcInfo& info : cs.critical)
            if (info.arc == a) return &info;
        return nullptr;
    };
    for (size_t i = 0; i < arcs.size(); ++i) {
        bool holds = rep.critical_points_per_sector[i] > 0;
        bool is_critical = critical_info(arcs[i]) != nullptr;
        if (holds != is_critical) rep.critical_match_ok = false;
    }

    // Probe each sector at time m+1 with a point on its midpoint ray and
    // count preimages per sector at time m: k / k-1 for a critical sector
    // (depending on whether the probe sits in its critical value sector),
    // 1 / 0 for a homeomorphic one.
    TraceParams tp = trace_params(cfg);
    rep.counts_ok = true;
    for (size_t bi = 0; bi < arcs1.size(); ++bi) {
        RayTrace t = trace_ray(seq, m + 1, arcs1[bi].midpoint(), 0.45,
                               cfg.h_big, tp);
        SectorProbe probe;
        probe.value_arc = static_cast<int>(bi);
        probe.z0 = t.points.back().z;
        probe.root_counts.assign(arcs.size(), 0);
        for (Complex r : preimages(seq.at(m + 1), probe.z0))
            ++probe.root_counts[sector_of(r)];

        int total = 0;
        for (size_t i = 0; i < arcs.size(); ++i) {
            int expected;
            if (const CriticalArcInfo* info = critical_info(arcs[i])) {
                expected = info->critical_value_arc == arcs1[bi]
                               ? info->covering
                               : info->covering - 1;
            } else {
                Arc image(dmap(arcs[i].start, d), dmap(arcs[i].end, d));
                expected = image.contains(arcs1[bi].midpoint()) ? 1 : 0;
            }
            if (probe.root_counts[i] != expected) rep.counts_ok = false;
            total += probe.root_counts[i];
        }
        if (total != d) rep.counts_ok = false;
        rep.probes.push_back(std::move(probe));
    }
    return rep;
}

namespace {

// The two generator maps of the word experiments: z^2-1 at odd times and as
// letter 0, z^3 as letter 1.
PolynomialSequence word_seq(const std::string& word) {
    Polynomial quad({Complex(-1), Complex(0), Complex(1)});
    Polynomial cubic({Complex(0), Complex(0), Complex(0), Complex(1)});
    return PolynomialSequence::word(word, quad, cubic, quad,
                                    SequenceBounds(3, 1.0, 1.0));
}

// Which postcritical track the forward orbit of the real point x shadows:
// 0 for the trajectory of 0, 1 for the trajectory of -1. The two tracks
// stay in {0,-1} and never collide, so coming within 0.2 of one of them is
// an unambiguous classification.
int classify_track(const PolynomialSequence& seq, long m, double x) {
    double t0 = 0.0, t1 = -1.0;
    for (long j = 0; j < 3000; ++j) {
        if (std::abs(x - t0) < 0.2) return 0;
        if (std::abs(x - t1) < 0.2) return 1;
        const Polynomial& p = seq.at(m + j + 1);
        x = p(Complex(x, 0)).real();
        t0 = p(Complex(t0, 0)).real();
        t1 = p(Complex(t1, 0)).real();
    }
    throw BisectionFailure("real orbit of " + fmt_num(x) + " at time " +
                           std::to_string(m) + " never resolves to a track");
}

char word_letter(const std::string& w, long k) {
    return w[static_cast<size_t>((k - 1) % static_cast<long>(w.size()))];
}

} // namespace

std::string WordMeasurement::str() const {
    std::ostringstream os;
    os << "time " << time << ": p=" << fmt_num(p) << " theta=" << theta.str()
       << " (~" << fmt_num(theta.to_double()) << ", radius " << fmt_num(radius)
       << ", gap " << fmt_num(landing_gap) << ")";
    return os.str();
}

WordMeasurement word_boundary(const std::string& word, long m,
                              const Config& cfg) {
    if (m < 0) throw ParseError("word_boundary: time must be >= 0");
    PolynomialSequence seq = word_seq(word);

    // Bisection between the basin of the 0 track and the basin of the -1
    // track; [-1,0] is forward invariant for both generators, so real orbits
    // never escape and the boundary is a Julia point.
    double a = -1.0 + 1e-9, b = -1e-9;
    if (classify_track(seq, m, a) != 1 || classify_track(seq, m, b) != 0)
        throw BisectionFailure("endpoints of (-1,0) misclassify at time " +
                               std::to_string(m));
    while (b - a > 1e-12) {
        double mid = 0.5 * (a + b);
        (classify_track(seq, m, mid) == 1 ? a : b) = mid;
    }
    const double p = 0.5 * (a + b);
    const Complex pc(p, 0);

    // Dyadic angle scan for the ray pair (theta, 1-theta) landing at p. The
    // landings of theta and 1-theta are complex conjugates (all coefficients
    // are real), so only theta in (0,1/2) is searched.
    TraceParams tp = trace_params(cfg);
    auto gap_at = [&](long num, long den) {
        try {
            LandingResult l = landing_point(seq, m, Angle(num, den),
                                            cfg.land_tol, cfg.h_floor, tp);
            return std::abs(l.z - pc);
        } catch (const Error&) {
            return kInf;
        }
    };

    long den = 1 << 10;
    std::vector<double> gaps(den / 2, kInf);
    for_each_index(static_cast<int>(den / 2 - 1), cfg.threads,
                   [&](int i) { gaps[i + 1] = gap_at(i + 1, den); });
    long num = static_cast<long>(std::min_element(gaps.begin() + 1, gaps.end()) -
                                 gaps.begin());
    double best = gaps[num];
    if (!std::isfinite(best))
        throw AngleSearchFailure("no dyadic ray of denominator " +
                                 std::to_string(den) + " lands at time " +
                                 std::to_string(m));
    while (den < (1L << 24)) {
        den *= 2;
        num *= 2;
        for (long cand : {num - 1, num + 1}) {
            if (cand < 1 || cand >= den / 2) continue;
            double g = gap_at(cand, den);
            if (g < best) { best = g; num = cand; }
        }
    }
    if (best > 2e-2)
        throw AngleSearchFailure("closest dyadic ray at time " +
                                 std::to_string(m) + " lands " + fmt_num(best) +
                                 " away from p=" + fmt_num(p));

    WordMeasurement wm;
    wm.time = m;
    wm.p = p;
    wm.theta = Angle(num, den);
    wm.radius = 1.0 / static_cast<double>(den);
    wm.landing_gap = best;
    return wm;
}

namespace {

WordSideReport word_side(const std::string& word, long m0, const Config& cfg) {
    WordSideReport side;
    side.word = word;
    side.letter = word_letter(word, m0 / 2);
    side.boundary = word_boundary(word, m0, cfg);
    const double theta = side.boundary.theta.to_double();
    if (side.letter == '0') {
        side.critical_arc_estimate = 1.0 - theta;
        side.value_arc_length = 1.0 - 2.0 * theta;
    } else {
        side.critical_arc_estimate = 2.0 / 3.0 + 2.0 * theta / 3.0;
        side.value_arc_length = 2.0 * theta;
    }
    side.time0_estimate = 1.0 - word_boundary(word, 1, cfg).theta.to_double();
    return side;
}

std::string fmt_side(int idx, const WordSideReport& s) {
    std::ostringstream os;
    os << "  side " << idx << ": word='" << s.word << "' letter=" << s.letter
       << " " << s.boundary.str() << " crit-arc=" << fmt_num(s.critical_arc_estimate)
       << " value-arc=" << fmt_num(s.value_arc_length)
       << " time0=" << fmt_num(s.time0_estimate);
    return os.str();
}

} // namespace

std::string WordReport::str() const {
    std::ostringstream os;
    os << "word experiment: '" << side1.word << "' vs '" << side2.word << "', ";
    if (equal_words)
        os << "identical letter streams, measured at time " << m0;
    else
        os << "first differing letter k=" << m0 / 2 << " (time " << m0 << ")";
    os << "\n" << fmt_side(1, side1) << "\n" << fmt_side(2, side2)
       << "\n  separation bounds: " << (bounds_ok ? "ok" : "VIOLATED");
    return os.str();
}

WordReport word_experiment(const std::string& word1, const std::string& word2,
                           const Config& cfg) {
    // Validate both words up front (the factories throw on bad letters).
    word_seq(word1);
    word_seq(word2);

    WordReport rep;
    long k = 0;
    const long span = std::lcm(static_cast<long>(word1.size()),
                               static_cast<long>(word2.size()));
    for (long j = 1; j <= span && k == 0; ++j)
        if (word_letter(word1, j) != word_letter(word2, j)) k = j;
    rep.equal_words = k == 0;
    if (k == 0) k = 1;
    rep.m0 = 2 * k;

    rep.side1 = word_side(word1, rep.m0, cfg);
    rep.side2 = word1 == word2 ? rep.side1 : word_side(word2, rep.m0, cfg);

    // A quadratic letter at m0 keeps the critical arc at m0-1 below 3/4 and
    // its value arc below 1/2; a cubic letter forces at least 5/6 and 1/2.
    auto side_ok = [&](const WordSideReport& s) {
        if (s.letter == '0')
            return s.value_arc_length < 0.5 &&
                   s.critical_arc_estimate > 0.5 &&
                   s.critical_arc_estimate <= 0.75 + cfg.arc_tol;
        return s.value_arc_length >= 0.5 - cfg.arc_tol &&
               s.critical_arc_estimate >= 5.0 / 6.0 - cfg.arc_tol &&
               s.critical_arc_estimate < 1.0;
    };
    rep.bounds_ok = side_ok(rep.side1) && side_ok(rep.side2);
    if (rep.equal_words) {
        rep.bounds_ok = rep.bounds_ok &&
                        std::abs(rep.side1.boundary.p - rep.side2.boundary.p) <= 1e-6 &&
                        rep.side1.boundary.theta == rep.side2.boundary.theta;
    } else if (rep.side1.letter != rep.side2.letter) {
        rep.bounds_ok = rep.bounds_ok &&
                        std::abs(rep.side1.critical_arc_estimate -
                                 rep.side2.critical_arc_estimate) > 1e-6;
    }
    return rep;
}

std::string JohnFit::str() const {
    std::ostringstream os;
    os << "ray tail length <= " << fmt_num(C_fit) << " * h^" << fmt_num(alpha_fit)
       << " (deep-tail violation fraction " << fmt_num(violation_fraction)
       << " over " << samples << " rays)";
    return os.str();
}

JohnFit ray_length_diagnostic(const PolynomialSequence& seq, long m,
                              int samples, const Config& cfg) {
    if (m < 0) throw ParseError("ray_length_diagnostic: time must be >= 0");
    if (samples < 1) throw ParseError("ray_length_diagnostic: samples must be >= 1");

    const double h_shallow = 1e-3, h_top = 0.25;
    TraceParams tp = trace_params(cfg);
    std::vector<std::vector<double>> lh(samples), ll(samples);
    std::vector<std::string> fail(samples);
    for_each_index(samples, cfg.threads, [&](int s) {
        try {
            Angle theta(2 * s + 1, 2 * samples);
            LandingResult land = landing_point(seq, m, theta, cfg.land_tol,
                                               cfg.h_floor, tp);
            RayTrace t = trace_ray(seq, m, theta, 1e-6, cfg.h_big, tp);
            // Suffix arclengths of the polyline, closed up with the landing.
            double len = std::abs(t.points.back().z - land.z);
            for (size_t i = t.points.size(); i-- > 0;) {
                if (i + 1 < t.points.size())
                    len += std::abs(t.points[i].z - t.points[i + 1].z);
                if (t.points[i].h <= h_top && len > 0) {
                    lh[s].push_back(std::log(t.points[i].h));
                    ll[s].push_back(std::log(len));
                }
            }
        } catch (const Error& e) {
            fail[s] = e.what();
        }
    });
    for (const std::string& msg : fail)
        if (!msg.empty()) throw NonConvergent("ray_length_diagnostic: " + msg);

    // Uniform exponent: the flattest deep-tail slope over all rays (the
    // shallow tail of a ray landing on a preperiodic point still reflects
    // its approach segments, not the limiting decay rate).
    JohnFit fit;
    fit.samples = samples;
    fit.alpha_fit = kInf;
    const double lsh = std::log(h_shallow);
    for (int s = 0; s < samples; ++s) {
        std::vector<double> xs, ys;
        for (size_t i = 0; i < lh[s].size(); ++i)
            if (lh[s][i] < lsh) {
                xs.push_back(lh[s][i]);
                ys.push_back(ll[s][i]);
            }
        if (xs.size() < 2)
            throw NonConvergent("ray_length_diagnostic: ray " +
                                std::to_string(s) + " has no deep tail");
        fit.alpha_fit = std::min(fit.alpha_fit, fit_line(xs, ys).b);
    }

    // Envelope constant on the shallow points, then count deep points that
    // escape the extrapolated bound.
    double logC = -kInf;
    for (int s = 0; s < samples; ++s)
        for (size_t i = 0; i < lh[s].size(); ++i)
            if (lh[s][i] >= lsh)
                logC = std::max(logC, ll[s][i] - fit.alpha_fit * lh[s][i]);
    fit.C_fit = std::exp(logC);
    long bad = 0, deep = 0;
    for (int s = 0; s < samples; ++s)
        for (size_t i = 0; i < lh[s].size(); ++i)
            if (lh[s][i] < lsh) {
                ++deep;
                if (ll[s][i] > logC + std::log(1.25) + fit.alpha_fit * lh[s][i])
                    ++bad;
            }
    fit.violation_fraction = deep ? static_cast<double>(bad) / deep : 0.0;
    return fit;
}

} // namespace orbitport
