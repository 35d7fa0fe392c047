#include "orbitport/rays.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <utility>

namespace orbitport {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kEps = std::numeric_limits<double>::epsilon();

bool finite_c(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

std::string fmt_complex(Complex z) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g%+.6gi", z.real(), z.imag());
    return buf;
}

std::string fmt_h(double h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", h);
    return buf;
}

// 2*pi*frac(D*theta), the fractional part taken exactly in the rationals.
double target_argument(const BigInt& D, const Angle& theta) {
    BigInt num = (D * theta.num()) % theta.den();
    return kTwoPi * num.convert_to<double>() / theta.den().convert_to<double>();
}

struct SolveOutcome {
    Complex z{};
    bool ok = false;
    bool precritical = false; // the composition's derivative collapsed
    int iters = 0;
};

// Newton for Q_{m,n}(z) = target from the given seed, iterating on the
// logarithmic residual log(Q/target). Two acceptance rules: the log-residual
// test is scaled by the conditioning floor eps*D of evaluating a degree-D
// composition in doubles (below that floor the computed residual is rounding
// noise even at the exact root), and independently a Newton step that
// stagnates at machine resolution means the iterate sits on the root to
// every representable digit, so it is accepted no matter what the noisy
// residual reads. The derivative of the composition at a far-field point has
// magnitude ~ D|Q|/|z|; a derivative tiny against that scale means the ray
// is grazing a precritical point, which is reported so the caller can say so.
SolveOutcome newton_solve(const PolynomialSequence& seq, long m, long n,
                          Complex target, double D_approx, Complex seed,
                          const TraceParams& params) {
    SolveOutcome out;
    out.z = seed;
    double min_rel_deriv = std::numeric_limits<double>::infinity();
    double target_mod = std::abs(target);
    // Conditioning floors the measurable log-residual at ~eps*D; past the cap
    // there is no residual signal at all and acceptance falls back to step
    // stagnation at machine scale (noise steps are ~eps*|z|).
    double tol = std::max(params.newton_tol,
                          std::min(32.0 * kEps * D_approx, 1e-6));
    for (int it = 0; it < params.newton_iters; ++it) {
        EvalResult ev = evaluate(seq, m, n, out.z);
        out.iters = it + 1;
        if (!finite_c(ev.value) || !finite_c(ev.derivative)) break;
        Complex ratio = ev.value / target;
        if (!finite_c(ratio) || std::abs(ratio) == 0.0) break;
        // Newton on log(Q(e^zeta)/target) in zeta = log z: the smooth part of
        // the residual is exp(D*dh)-sized, so Newton in z either creeps (deep,
        // |z|/D steps at a time) or overflows the basin (shallow, where the
        // log-residual per degree is O(1) and a linear step flips the sheet).
        // The multiplicative update z *= exp(-logres/(d log Q/d log z)) does
        // neither and settles in a handful of steps at any depth.
        Complex logres = std::log(ratio);
        if (std::abs(logres) <= tol) {
            out.ok = true;
            return out;
        }
        double scale = D_approx * std::max(std::abs(ev.value), target_mod) /
                       std::max(std::abs(out.z), 0.05);
        min_rel_deriv = std::min(min_rel_deriv, std::abs(ev.derivative) / scale);
        if (std::abs(out.z) == 0.0) break;
        Complex dzeta = logres * ev.value / (ev.derivative * out.z);
        if (!finite_c(dzeta)) break;
        Complex znew = out.z * std::exp(-dzeta);
        if (!finite_c(znew)) break;
        double s = std::abs(znew - out.z);
        out.z = znew;
        if (s <= 4.0 * kEps * (std::abs(out.z) + 0.01)) {
            out.ok = true; // stagnated at machine resolution
            return out;
        }
    }
    out.precritical = min_rel_deriv < 1e-8;
    return out;
}

// Shared state of a march down the potential scale.
struct Marcher {
    const PolynomialSequence& seq;
    long m;
    Angle theta;
    TraceParams params;
    double record_cap; // record only points at potential <= this
    double near_radius; // branch-jump guard active below this |z|

    long n;   // composition horizon: least n with D_{m,n} * h >= handoff
    BigInt D; // exact D_{m,n}
    double h_cur;
    Complex z_cur;
    long steps = 0;
    std::vector<RayPoint>* record = nullptr;

    void raise_horizon(double h, long& n_io, BigInt& D_io) const {
        while (D_io.convert_to<double>() * h < params.handoff) {
            ++n_io;
            D_io *= seq.at(n_io).degree();
        }
    }

    Complex target_at(double h, const BigInt& Dn) const {
        double Dh = Dn.convert_to<double>() * h;
        if (Dh > 700.0)
            throw ParseError("far-field target exp(" + fmt_h(Dh) +
                             ") overflows; degree growth too steep for the "
                             "potential grid");
        return std::polar(std::exp(Dh), target_argument(Dn, theta));
    }

    // March from h_cur down to h_next, inserting geometric midpoints whenever
    // Newton fails or the solution jumps branches.
    void advance(double h_next) {
        int budget = params.refine_depth;
        bool last_jumped = false;
        bool last_precritical = false;
        double last_h = h_next;
        while (h_cur > h_next) {
            double attempt = h_next;
            for (;;) {
                long n_try = n;
                BigInt D_try = D;
                raise_horizon(attempt, n_try, D_try);
                Complex target = target_at(attempt, D_try);
                SolveOutcome sol = newton_solve(seq, m, n_try, target,
                                                D_try.convert_to<double>(),
                                                z_cur, params);
                steps += sol.iters;
                bool jumped = false;
                if (sol.ok && std::abs(z_cur) < near_radius &&
                    std::abs(sol.z - z_cur) > 0.25 * (1.0 + std::abs(z_cur)))
                    jumped = true;
                if (sol.ok && !jumped) {
                    n = n_try;
                    D = std::move(D_try);
                    h_cur = attempt;
                    z_cur = sol.z;
                    if (record && h_cur <= record_cap)
                        record->push_back({h_cur, z_cur});
                    break;
                }
                last_jumped = jumped;
                last_precritical = !sol.ok && sol.precritical;
                last_h = attempt;
                if (--budget < 0) fail(last_jumped, last_precritical, last_h);
                attempt = std::sqrt(attempt * h_cur);
                if (!(attempt < h_cur * (1.0 - 1e-12)))
                    fail(last_jumped, last_precritical, last_h);
            }
        }
    }

    [[noreturn]] void fail(bool jumped, bool precritical, double h) const {
        std::string where = "ray " + theta.str() + " at time " +
                            std::to_string(m) + ", potential " + fmt_h(h);
        if (jumped)
            throw StepTooLarge(where + ": every refinement jumps to another "
                                       "preimage branch");
        if (precritical)
            throw PrecriticalHit(where + ": composition derivative collapsed "
                                         "(ray meets a precritical point)");
        throw NewtonDiverged(where + ": Newton failed after grid refinement");
    }
};

// Last four points whose potentials sit on the rho-grid (refinement can
// interleave extra points at other potentials; extrapolating needs the
// constant ratio). pts holds potentials in decreasing order.
bool tail_chain(const std::vector<RayPoint>& pts, double rho,
                RayPoint out[4]) {
    if (pts.empty()) return false;
    out[3] = pts.back();
    int found = 1;
    double want = pts.back().h / rho;
    for (int i = int(pts.size()) - 2; i >= 0 && found < 4; --i) {
        if (std::abs(pts[i].h - want) <= 0.01 * want) {
            out[4 - found - 1] = pts[i];
            ++found;
            want = pts[i].h / rho;
        } else if (pts[i].h > want * 1.01) {
            break;
        }
    }
    return found == 4;
}

Complex aitken_step(Complex a, Complex b, Complex c, bool& ok) {
    Complex num = c - b;
    Complex den = (c - b) - (b - a);
    ok = false;
    if (std::abs(den) == 0.0) return c;
    Complex corr = num * num / den;
    if (!finite_c(corr)) return c;
    ok = true;
    return c - corr;
}

// A rational angle is eventually periodic under the degree maps, jointly with
// the phase of the sequence: after s steps the pair (angle, phase) repeats
// with period t, so the ray at time m+s is fixed under the t-step return.
// Preperiod indices of the sequence get unique negative phases (they cannot
// recur). False when no repeat shows up within the cap.
bool angle_return(const PolynomialSequence& seq, long m, const Angle& theta,
                  long& s, long& t) {
    const long cap = 4096;
    long pre = seq.preperiod();
    long per = std::max<long>(seq.period(), 1);
    std::map<std::pair<Angle, long>, long> seen;
    Angle th = theta;
    for (long j = 0; j <= cap; ++j) {
        long idx = m + j + 1; // the map applied next
        long phase = idx <= pre ? -idx : (idx - pre - 1) % per;
        auto key = std::make_pair(th, phase);
        auto it = seen.find(key);
        if (it != seen.end()) {
            s = it->second;
            t = j - it->second;
            return true;
        }
        seen.emplace(key, j);
        th = dmap(th, seq.at(idx).degree());
    }
    return false;
}

// Newton for the fixed point of Q_{time,time+t} from a seed on the ray tail.
// Fails (rather than guesses) on a near-parabolic derivative or escape.
bool fixed_point_newton(const PolynomialSequence& seq, long time, long t,
                        Complex seed, double big, Complex& out, long& iters) {
    Complex z = seed;
    for (int it = 0; it < 60; ++it) {
        ++iters;
        EvalResult ev = evaluate(seq, time, time + t, z);
        if (ev.overflow || !finite_c(ev.value) || !finite_c(ev.derivative))
            return false;
        Complex grad = ev.derivative - 1.0;
        if (std::abs(grad) < 1e-9) return false;
        Complex step = (ev.value - z) / grad;
        if (!finite_c(step)) return false;
        z -= step;
        if (!finite_c(z) || std::abs(z) > big) return false;
        if (std::abs(step) <= 32.0 * kEps * (1.0 + std::abs(z))) {
            out = z;
            return true;
        }
    }
    return false;
}

// Sharpen a deep ray-tail point to the exact landing point. The tail point
// says *which* point lands: push it forward s steps to seed Newton on the
// t-step return map, then pull the fixed point back choosing, at each step,
// the preimage branch nearest the forward orbit of the tail. Branch choices
// must be clear-cut (nearest beats runner-up twice over) or we bail out.
bool polish_landing(const PolynomialSequence& seq, long m, const Angle& theta,
                    Complex z_tail, Complex& out, long& iters) {
    long s = 0, t = 0;
    if (!angle_return(seq, m, theta, s, t)) return false;
    double big = 4.0 * escape_radius(seq.bounds());
    std::vector<Complex> anchor(static_cast<size_t>(s) + 1);
    anchor[0] = z_tail;
    for (long j = 0; j < s; ++j) {
        anchor[j + 1] = seq.at(m + j + 1)(anchor[j]);
        if (!finite_c(anchor[j + 1]) || std::abs(anchor[j + 1]) > big)
            return false;
    }
    Complex w;
    if (!fixed_point_newton(seq, m + s, t, anchor[s], big, w, iters))
        return false;
    if (std::abs(w - anchor[s]) > 0.25 * (1.0 + std::abs(anchor[s])))
        return false; // Newton wandered to some other fixed point
    for (long j = s - 1; j >= 0; --j) {
        std::vector<Complex> roots = preimages(seq.at(m + j + 1), w);
        if (roots.empty()) return false;
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        Complex best{};
        for (Complex r : roots) {
            double d = std::abs(r - anchor[j]);
            if (d < d1) {
                d2 = d1;
                d1 = d;
                best = r;
            } else if (d < d2) {
                d2 = d;
            }
        }
        if (roots.size() > 1 && d2 < 2.0 * d1 + 1e-12) return false;
        w = best;
    }
    out = w;
    return true;
}

double segment_distance(Complex q, Complex a, Complex b) {
    Complex ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(q - a);
    double t = ((q.real() - a.real()) * ab.real() +
                (q.imag() - a.imag()) * ab.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(q - (a + t * ab));
}

// Distance from q to the ray polyline extended by its landing point.
double polyline_distance(Complex q, const std::vector<RayPoint>& pts,
                         Complex landing) {
    double best = std::abs(q - landing);
    for (size_t i = 1; i < pts.size(); ++i)
        best = std::min(best, segment_distance(q, pts[i - 1].z, pts[i].z));
    if (!pts.empty())
        best = std::min(best, segment_distance(q, pts.back().z, landing));
    return best;
}

bool point_in_polygon(Complex q, const std::vector<Complex>& poly) {
    bool inside = false;
    size_t nv = poly.size();
    for (size_t i = 0, j = nv - 1; i < nv; j = i++) {
        double xi = poly[i].real(), yi = poly[i].imag();
        double xj = poly[j].real(), yj = poly[j].imag();
        if ((yi > q.imag()) != (yj > q.imag()) &&
            q.real() < (xj - xi) * (q.imag() - yi) / (yj - yi) + xi)
            inside = !inside;
    }
    return inside;
}

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

RayTrace trace_ray(const PolynomialSequence& seq, long m, const Angle& theta,
                   double h_min, double h_max, const TraceParams& params) {
    if (m < 0) throw ParseError("trace_ray: time must be >= 0");
    if (!(h_min > 0) || !(h_max > h_min) || !std::isfinite(h_max))
        throw ParseError("trace_ray: need 0 < h_min < h_max");
    if (h_max > 300.0)
        throw ParseError("trace_ray: h_max too large; exp(h_max) must stay "
                         "representable");
    if (!(params.rho > 0) || !(params.rho < 1))
        throw ParseError("trace_ray: grid ratio must lie in (0,1)");
    if (!seq.monic())
        throw MonicRequired("ray tracing needs a monic sequence");

    // Start in the far field even if the caller's h_max is below the handoff;
    // the extra lead-in points stay aligned with the h_max * rho^j grid and
    // are simply not recorded.
    double h0 = h_max;
    while (h0 < params.handoff) h0 /= params.rho;

    // Purely geometric grid, ending at the first potential <= h_min; the
    // constant ratio is what makes the landing extrapolation legitimate.
    std::vector<double> grid;
    for (double h = h0;; h *= params.rho) {
        grid.push_back(h);
        if (h <= h_min) break;
    }

    RayTrace out;
    out.time = m;
    out.angle = theta;

    Marcher mr{seq,
               m,
               theta,
               params,
               /*record_cap=*/h_max * (1.0 + 1e-12),
               /*near_radius=*/2.0 * escape_radius(seq.bounds()),
               /*n=*/m,
               /*D=*/BigInt(1),
               /*h_cur=*/grid.front(),
               /*z_cur=*/std::polar(std::exp(grid.front()),
                                    kTwoPi * theta.to_double())};
    mr.record = &out.points;

    // At the first grid point the horizon is n = m, so the equation is
    // z = exp(h + 2*pi*i*theta) and the seed already solves it exactly.
    if (grid.front() <= mr.record_cap)
        out.points.push_back({grid.front(), mr.z_cur});
    for (size_t j = 1; j < grid.size(); ++j) mr.advance(grid[j]);

    out.steps = mr.steps;
    out.h_final = out.points.empty() ? mr.h_cur : out.points.back().h;
    return out;
}

LandingResult landing_point(const PolynomialSequence& seq, long m,
                            const Angle& theta, double land_tol,
                            double h_floor, const TraceParams& params) {
    if (!(land_tol > 0) || !(h_floor > 0))
        throw ParseError("landing_point: tolerances must be positive");
    long total_steps = 0;
    // Rational angles are eventually periodic, so the landing point is a
    // (preimage of a) fixed point of a return map and Newton can pin it to
    // machine precision once a moderate-depth trace says which point it is.
    for (double h_tail : {1e-10, 1e-16}) {
        if (h_tail < h_floor) break;
        RayTrace t = trace_ray(seq, m, theta, h_tail, params.handoff, params);
        total_steps += t.steps;
        if (t.points.empty()) break;
        Complex polished;
        if (polish_landing(seq, m, theta, t.points.back().z, polished,
                           total_steps))
            return {polished, true, t.h_final, total_steps};
    }
    // Fallback: extrapolate the tail. Handles angles whose return structure
    // did not resolve (overlong orbits, ambiguous branches near a critical
    // point, near-parabolic return).
    double h_min = std::max(1e-8, h_floor);
    for (;;) {
        RayTrace t = trace_ray(seq, m, theta, h_min, params.handoff, params);
        total_steps += t.steps;
        RayPoint chain[4];
        if (tail_chain(t.points, params.rho, chain)) {
            Complex z0 = chain[0].z, z1 = chain[1].z;
            Complex z2 = chain[2].z, z3 = chain[3].z;
            double d21 = std::abs(z2 - z1), d32 = std::abs(z3 - z2);
            // The approach to a repelling landing point is a power law in the
            // potential, so the raw points converge geometrically with ratio
            // r and the Aitken values with ratio r^2. Two consecutive Aitken
            // values then put the remaining error at |A2-A1| * r^2/(1-r^2),
            // measurable on the spot; converge when that drops under tol.
            if (d21 > 0.0 && d32 / d21 < 0.995) {
                double v = (d32 / d21) * (d32 / d21);
                double amplify = std::max(v / (1.0 - v), 0.25);
                bool ok1 = false, ok2 = false;
                Complex A1 = aitken_step(z0, z1, z2, ok1);
                Complex A2 = aitken_step(z1, z2, z3, ok2);
                if (ok1 && ok2 &&
                    std::abs(A2 - A1) * amplify < 0.5 * land_tol)
                    return {A2, true, t.h_final, total_steps};
            }
            // Flat tail: the points themselves already agree.
            if (d32 + d21 < 0.25 * land_tol) {
                bool ok = false;
                Complex A = aitken_step(z1, z2, z3, ok);
                if (!ok || std::abs(A - z3) > 10.0 * (d32 + d21)) A = z3;
                return {A, true, t.h_final, total_steps};
            }
        }
        if (h_min <= h_floor * (1.0 + 1e-9))
            throw NonConvergent("ray " + theta.str() + " at time " +
                                std::to_string(m) +
                                ": landing Cauchy criterion fails down to "
                                "potential " + fmt_h(h_min));
        h_min = std::max(h_floor, h_min * std::pow(params.rho, 20));
    }
}

MeasuredPortraitSlice coland_clusters(const PolynomialSequence& seq, long m,
                                      const std::vector<Angle>& angles,
                                      double cluster_eps, double land_tol) {
    if (!(cluster_eps > 0))
        throw ParseError("coland_clusters: cluster_eps must be positive");
    {
        std::vector<Angle> sorted = angles;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ParseError("coland_clusters: duplicate angle in grid");
    }

    std::vector<Complex> landings;
    landings.reserve(angles.size());
    for (const Angle& a : angles)
        landings.push_back(landing_point(seq, m, a, land_tol).z);

    DisjointSets sets(angles.size());
    for (size_t i = 0; i < angles.size(); ++i)
        for (size_t j = i + 1; j < angles.size(); ++j) {
            double dist = std::abs(landings[i] - landings[j]);
            if (dist >= cluster_eps && dist < 3.0 * cluster_eps)
                throw AmbiguousClustering(
                    "landing points of " + angles[i].str() + " and " +
                    angles[j].str() + " sit at distance " + fmt_h(dist) +
                    ", inside [eps, 3*eps) for eps = " + fmt_h(cluster_eps));
            if (dist < cluster_eps) sets.unite(int(i), int(j));
        }

    std::vector<ColandCluster> clusters;
    std::vector<int> root_slot(angles.size(), -1);
    for (size_t i = 0; i < angles.size(); ++i) {
        int r = sets.find(int(i));
        if (root_slot[r] < 0) {
            root_slot[r] = int(clusters.size());
            clusters.push_back({});
        }
        ColandCluster& c = clusters[root_slot[r]];
        c.center += landings[i];
        c.angles.push_back(angles[i]);
    }
    for (ColandCluster& c : clusters) {
        c.center /= double(c.angles.size());
        std::sort(c.angles.begin(), c.angles.end());
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const ColandCluster& a, const ColandCluster& b) {
                  return a.angles.front() < b.angles.front();
              });
    return {m, std::move(clusters), cluster_eps};
}

std::string MeasuredPortraitSlice::str() const {
    std::ostringstream os;
    os << "time " << time << ":";
    if (clusters.empty()) {
        os << " (no clusters)";
        return os.str();
    }
    for (size_t i = 0; i < clusters.size(); ++i) {
        os << (i ? "; " : " ") << "{";
        for (size_t j = 0; j < clusters[i].angles.size(); ++j)
            os << (j ? "," : "") << clusters[i].angles[j].str();
        os << "} @ " << fmt_complex(clusters[i].center);
    }
    return os.str();
}

std::string to_string(SectorSide side) {
    return side == SectorSide::First ? "first" : "second";
}

SectorSide sector_membership(const PolynomialSequence& seq, long m,
                             const Angle& theta1, const Angle& theta2,
                             Complex z, double land_tol, double cluster_eps) {
    if (theta1 == theta2)
        throw ParseError("sector_membership: the two ray angles coincide");
    if (!finite_c(z))
        throw ParseError("sector_membership: query point is not finite");
    if (!seq.monic())
        throw MonicRequired("sector membership needs a monic sequence");

    double a1 = theta1.to_double();
    double len = theta2.to_double() - a1;
    len -= std::floor(len);

    // The sector only exists if the two rays actually co-land.
    LandingResult l1 = landing_point(seq, m, theta1, land_tol);
    LandingResult l2 = landing_point(seq, m, theta2, land_tol);
    if (std::abs(l1.z - l2.z) > cluster_eps)
        throw RealizationFailure("rays " + theta1.str() + " and " +
                                 theta2.str() + " at time " +
                                 std::to_string(m) + " do not co-land (" +
                                 fmt_h(std::abs(l1.z - l2.z)) + " apart)");
    Complex landing = 0.5 * (l1.z + l2.z);

    // Escaping points carry their own external angle; read it off when the
    // Bottcher branch reaches z.
    if (green(seq, m, z).escaping) {
        bool lost = false;
        double pos = 0;
        try {
            Complex w = bottcher(seq, m, z);
            pos = std::arg(w) / kTwoPi - a1;
            pos -= std::floor(pos);
        } catch (const BranchLoss&) {
            lost = true;
        }
        if (!lost) {
            double btol = 1e-9;
            if (pos < btol || pos > 1.0 - btol || std::abs(pos - len) < btol)
                throw OnBoundary("point " + fmt_complex(z) +
                                 " lies on a sector ray");
            return pos < len ? SectorSide::First : SectorSide::Second;
        }
    }

    // Otherwise decide geometrically: close the two traced rays through the
    // common landing point and a far-field arc, then use crossing parity.
    TraceParams params;
    RayTrace r1 = trace_ray(seq, m, theta1, 1e-8, params.handoff, params);
    RayTrace r2 = trace_ray(seq, m, theta2, 1e-8, params.handoff, params);
    double boundary_dist = std::min(polyline_distance(z, r1.points, landing),
                                    polyline_distance(z, r2.points, landing));
    if (boundary_dist <= land_tol)
        throw OnBoundary("point " + fmt_complex(z) + " is within " +
                         fmt_h(land_tol) + " of a sector ray");

    std::vector<Complex> poly;
    poly.reserve(r1.points.size() + r2.points.size() + 64);
    poly.push_back(landing);
    for (auto it = r1.points.rbegin(); it != r1.points.rend(); ++it)
        poly.push_back(it->z);
    double R1 = std::abs(r1.points.front().z);
    double R2 = std::abs(r2.points.front().z);
    int arc_samples = std::max(8, int(std::ceil(len / 0.02)));
    for (int k = 1; k < arc_samples; ++k) {
        double s = double(k) / arc_samples;
        double radius = std::pow(R1, 1.0 - s) * std::pow(R2, s);
        poly.push_back(std::polar(radius, kTwoPi * (a1 + s * len)));
    }
    for (const RayPoint& p : r2.points) poly.push_back(p.z);

    return point_in_polygon(z, poly) ? SectorSide::First : SectorSide::Second;
}

std::vector<Matching> measure_matching(const PolynomialSequence& seq,
                                       const FormalPortrait& P, long m,
                                       double cluster_eps) {
    CriticalStructure cs = critical_structure(P, m);
    std::vector<Matching> out;
    out.reserve(cs.critical.size());
    for (const CriticalArcInfo& info : cs.critical) {
        PullbackEndpoints pe =
            pullback_endpoints(info.arc, cs.degree, info.critical_value_arc);
        std::vector<Angle> all = pe.alphas;
        all.insert(all.end(), pe.betas.begin(), pe.betas.end());

        MeasuredPortraitSlice slice;
        try {
            slice = coland_clusters(seq, m, all, cluster_eps);
        } catch (const NonConvergent& e) {
            throw RealizationFailure(
                std::string("pullback endpoint ray failed to land: ") +
                e.what());
        }

        Matching match;
        for (const ColandCluster& c : slice.clusters) {
            if (c.angles.size() != 2) {
                std::string members;
                for (const Angle& a : c.angles)
                    members += (members.empty() ? "" : ",") + a.str();
                throw RealizationFailure(
                    "pullback endpoints do not pair up: cluster {" + members +
                    "} at " + fmt_complex(c.center));
            }
            bool first_alpha = std::find(pe.alphas.begin(), pe.alphas.end(),
                                         c.angles[0]) != pe.alphas.end();
            bool second_alpha = std::find(pe.alphas.begin(), pe.alphas.end(),
                                          c.angles[1]) != pe.alphas.end();
            if (first_alpha == second_alpha)
                throw RealizationFailure(
                    "cluster {" + c.angles[0].str() + "," + c.angles[1].str() +
                    "} pairs two endpoints of the same kind");
            match.emplace_back(c.angles[0], c.angles[1]);
        }
        std::sort(match.begin(), match.end());
        out.push_back(std::move(match));
    }
    return out;
}

std::string MeasuredPortrait::str() const {
    std::ostringstream os;
    for (size_t i = 0; i < slices.size(); ++i) {
        if (i) os << "\n";
        os << slices[i].str();
    }
    for (size_t i = 0; i < next.size(); ++i) {
        os << "\nchain " << slices[i].time << "->" << slices[i + 1].time
           << ":";
        if (next[i].empty()) os << " (none)";
        for (size_t j = 0; j < next[i].size(); ++j) {
            os << " " << j << "->";
            if (next[i][j] < 0)
                os << "x";
            else
                os << next[i][j];
        }
    }
    return os.str();
}

MeasuredPortrait measured_portrait(const PolynomialSequence& seq,
                                   const std::vector<long>& times,
                                   const std::vector<Angle>& angle_grid,
                                   double cluster_eps, double land_tol) {
    MeasuredPortrait mp;
    mp.cluster_eps = cluster_eps;
    for (long t : times)
        mp.slices.push_back(
            coland_clusters(seq, t, angle_grid, cluster_eps, land_tol));
    for (size_t i = 0; i + 1 < mp.slices.size(); ++i) {
        std::vector<int> edges(mp.slices[i].clusters.size(), -1);
        if (times[i + 1] == times[i] + 1) {
            const Polynomial& step = seq.at(times[i] + 1);
            for (size_t j = 0; j < edges.size(); ++j) {
                Complex w = step(mp.slices[i].clusters[j].center);
                for (size_t k = 0; k < mp.slices[i + 1].clusters.size(); ++k)
                    if (std::abs(w - mp.slices[i + 1].clusters[k].center) <
                        cluster_eps) {
                        edges[j] = int(k);
                        break;
                    }
            }
        }
        mp.next.push_back(std::move(edges));
    }
    return mp;
}

} // namespace orbitport
