#include "orbitport/polyseq.hpp"

#include <cmath>
#include <cstdio>

#include "orbitport/roots.hpp"

namespace orbitport {

namespace {

std::string fmt_g(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmt_complex(Complex c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.6g%+.6gi)", c.real(), c.imag());
    return buf;
}

bool finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

std::string join_polys(const std::vector<Polynomial>& ps) {
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += " | ";
        out += ps[i].str();
    }
    return out;
}

} // namespace

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 3)
        throw ParseError("polynomial degree must be >= 2, got " +
                         std::to_string(coeffs_.empty() ? 0 : coeffs_.size() - 1));
    if (std::abs(coeffs_.back()) == 0.0)
        throw ParseError("leading coefficient is zero");
    for (Complex c : coeffs_)
        if (!finite(c)) throw ParseError("non-finite coefficient");
}

Complex Polynomial::operator()(Complex z) const {
    Complex acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * z + coeffs_[k];
    return acc;
}

Complex Polynomial::derivative(Complex z) const {
    Complex acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 1;)
        acc = acc * z + static_cast<double>(k) * coeffs_[k];
    return acc;
}

std::vector<Complex> Polynomial::derivative_coeffs() const {
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
        d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return d;
}

std::string Polynomial::str() const {
    std::string out;
    for (int k = degree(); k >= 0; --k) {
        Complex c = coeffs_[k];
        if (std::abs(c) == 0.0) continue;
        std::string var = k == 0 ? "" : (k == 1 ? "z" : "z^" + std::to_string(k));
        if (c.imag() == 0.0) {
            double a = std::abs(c.real());
            std::string mag = (a == 1.0 && k > 0) ? var : fmt_g(a) + var;
            if (out.empty())
                out += (c.real() < 0 ? "-" : "") + mag;
            else
                out += (c.real() < 0 ? " - " : " + ") + mag;
        } else {
            if (!out.empty()) out += " + ";
            out += fmt_complex(c) + var;
        }
    }
    return out;
}

SequenceBounds::SequenceBounds(int d_, double K_, double M_) : d(d_), K(K_), M(M_) {
    if (d < 2) throw ParseError("bounds need d >= 2, got " + std::to_string(d));
    if (!(K >= 1.0)) throw ParseError("bounds need K >= 1, got " + fmt_g(K));
    if (!(M >= 0.0)) throw ParseError("bounds need M >= 0, got " + fmt_g(M));
}

void SequenceBounds::check(const Polynomial& p) const {
    if (p.degree() > d)
        throw BoundsViolation(p.str() + ": degree " + std::to_string(p.degree()) +
                              " exceeds bound " + std::to_string(d));
    double lead = std::abs(p.lead());
    if (lead < 1.0 / K - 1e-15 || lead > K + 1e-15)
        throw BoundsViolation(p.str() + ": |lead| = " + fmt_g(lead) +
                              " outside [1/K, K] for K = " + fmt_g(K));
    for (int k = 0; k < p.degree(); ++k)
        if (std::abs(p.coeffs()[k]) > M + 1e-15)
            throw BoundsViolation(p.str() + ": |a_" + std::to_string(k) +
                                  "| = " + fmt_g(std::abs(p.coeffs()[k])) +
                                  " exceeds M = " + fmt_g(M));
}

std::string SequenceBounds::str() const {
    return "{d=" + std::to_string(d) + ", K=" + fmt_g(K) + ", M=" + fmt_g(M) + "}";
}

double escape_radius(const SequenceBounds& b) {
    return std::max(1.0, b.K * (b.M * b.d + 2.0));
}

PolynomialSequence::PolynomialSequence(std::vector<Polynomial> pre,
                                       std::vector<Polynomial> per, SequenceBounds b)
    : pre_(std::move(pre)), per_(std::move(per)), bounds_(b) {
    if (per_.empty()) throw ParseError("periodic part of a sequence must be nonempty");
    for (const Polynomial& p : pre_) bounds_.check(p);
    for (const Polynomial& p : per_) bounds_.check(p);
    for (const Polynomial& p : pre_) monic_ = monic_ && p.monic();
    for (const Polynomial& p : per_) monic_ = monic_ && p.monic();
}

PolynomialSequence PolynomialSequence::periodic(std::vector<Polynomial> per,
                                                SequenceBounds b) {
    return PolynomialSequence({}, std::move(per), b);
}

PolynomialSequence PolynomialSequence::preperiodic(std::vector<Polynomial> pre,
                                                   std::vector<Polynomial> per,
                                                   SequenceBounds b) {
    return PolynomialSequence(std::move(pre), std::move(per), b);
}

PolynomialSequence PolynomialSequence::word(const std::string& w,
                                            const Polynomial& letter0,
                                            const Polynomial& letter1,
                                            const Polynomial& odd_poly,
                                            SequenceBounds b) {
    if (w.empty()) throw ParseError("word must be nonempty");
    for (char ch : w)
        if (ch != '0' && ch != '1')
            throw ParseError(std::string("word letters must be 0/1, got '") + ch + "'");
    // Same unrolling convention as DegreeSequence::word: period 2|w|.
    std::vector<Polynomial> per;
    per.reserve(2 * w.size());
    for (std::size_t m = 1; m <= 2 * w.size(); ++m) {
        if (m % 2 == 1)
            per.push_back(odd_poly);
        else
            per.push_back(w[(m / 2 - 1) % w.size()] == '0' ? letter0 : letter1);
    }
    return PolynomialSequence({}, std::move(per), b);
}

const Polynomial& PolynomialSequence::at(long m) const {
    if (m < 1) throw ParseError("sequence index must be >= 1, got " + std::to_string(m));
    if (m <= static_cast<long>(pre_.size())) return pre_[m - 1];
    return per_[(m - pre_.size() - 1) % per_.size()];
}

DegreeSequence PolynomialSequence::degree_sequence() const {
    std::vector<int> pre, per;
    for (const Polynomial& p : pre_) pre.push_back(p.degree());
    for (const Polynomial& p : per_) per.push_back(p.degree());
    if (pre.empty()) return DegreeSequence::periodic(per);
    return DegreeSequence::preperiodic(pre, per);
}

std::string PolynomialSequence::str() const {
    std::string out;
    if (!pre_.empty()) out += "[" + join_polys(pre_) + "] then ";
    out += "periodic [" + join_polys(per_) + "] bounds " + bounds_.str();
    return out;
}

EvalResult evaluate(const PolynomialSequence& seq, long m, long n, Complex z) {
    if (m < 0) throw ParseError("start time must be >= 0, got " + std::to_string(m));
    if (n < m)
        throw ParseError("end time " + std::to_string(n) + " precedes start " +
                         std::to_string(m));
    EvalResult res;
    res.value = z;
    for (long j = m + 1; j <= n; ++j) {
        const Polynomial& p = seq.at(j);
        long long next_D;
        if (__builtin_mul_overflow(res.D, static_cast<long long>(p.degree()), &next_D))
            res.overflow = true;
        else
            res.D = next_D;
        res.derivative *= p.derivative(res.value);
        res.value = p(res.value);
        if (!finite(res.value)) {
            res.overflow = true;
            break;
        }
    }
    return res;
}

namespace {

// Plain iteration hands over to log coordinates past this modulus; beyond it
// the tail correction sum is < 1/2 and contraction per step is certain.
double log_threshold(const SequenceBounds& b) {
    return std::max({1e3, 2.0 * escape_radius(b), 4.0 * b.d * b.M * b.K});
}

// One composition step in log coordinates: given L = log w, returns the
// principal log of r = P(w)/w^deg, exact up to roundoff since the lower-order
// correction sum is tiny out here.
Complex log_ratio(const Polynomial& p, Complex L) {
    const std::vector<Complex>& a = p.coeffs();
    const int d = p.degree();
    Complex c = 0.0;
    for (int k = 0; k < d; ++k)
        if (std::abs(a[k]) != 0.0)
            c += (a[k] / a[d]) * std::exp(static_cast<double>(k - d) * L);
    return std::log(a[d]) + std::log(1.0 + c);
}

} // namespace

GreenResult green(const PolynomialSequence& seq, long m, Complex z, double tol,
                  long cap) {
    if (m < 0) throw ParseError("time must be >= 0, got " + std::to_string(m));
    if (!(tol > 0)) throw ParseError("tolerance must be positive");
    if (!finite(z)) throw ParseError("non-finite input point");

    const double T = log_threshold(seq.bounds());
    Complex w = z;
    long n = m, steps = 0;
    double invD = 1.0;
    while (std::abs(w) <= T) {
        if (steps >= cap) return {0.0, false, steps};
        const Polynomial& p = seq.at(n + 1);
        w = p(w);
        invD /= p.degree();
        ++n;
        ++steps;
    }

    Complex L = std::log(w);
    double G = invD * L.real();
    while (steps < cap) {
        const Polynomial& p = seq.at(n + 1);
        Complex log_r = log_ratio(p, L);
        L = static_cast<double>(p.degree()) * L + log_r;
        invD /= p.degree();
        ++n;
        ++steps;
        double G_new = invD * L.real();
        bool settled = std::abs(G_new - G) < tol;
        G = G_new;
        if (settled || !std::isfinite(L.real())) break;
    }
    return {G, true, steps};
}

Complex bottcher(const PolynomialSequence& seq, long m, Complex z, double tol,
                 long cap) {
    if (!seq.monic()) throw MonicRequired("sequence " + seq.str() + " is not monic");
    if (m < 0) throw ParseError("time must be >= 0, got " + std::to_string(m));
    if (!(tol > 0)) throw ParseError("tolerance must be positive");
    if (!finite(z)) throw ParseError("non-finite input point");

    const double T = log_threshold(seq.bounds());
    Complex w = z, S = 0.0;
    long n = m, steps = 0;
    double invD = 1.0;
    while (std::abs(w) <= T) {
        if (steps >= cap)
            throw BranchLoss("no escape within " + std::to_string(steps) +
                             " steps from " + fmt_complex(z) +
                             "; coordinate undefined this deep");
        const Polynomial& p = seq.at(n + 1);
        const int d = p.degree();
        if (std::abs(w) == 0.0)
            throw BranchLoss("orbit reaches 0 at time " + std::to_string(n));
        Complex wd = 1.0;
        for (int i = 0; i < d; ++i) wd *= w;
        Complex wn = p(w);
        Complex r = wn / wd;
        if (!finite(r) || std::abs(r) == 0.0)
            throw BranchLoss("orbit meets a zero of the time-" +
                             std::to_string(n + 1) + " map");
        if (!(std::abs(std::arg(r)) < M_PI / d))
            throw BranchLoss("argument " + fmt_g(std::arg(r)) + " at time " +
                             std::to_string(n + 1) + " exceeds pi/" +
                             std::to_string(d) + "; too close to the boundary");
        invD /= d;
        S += invD * std::log(r);
        w = wn;
        ++n;
        ++steps;
    }

    Complex L = std::log(w);
    while (steps < cap) {
        const Polynomial& p = seq.at(n + 1);
        const int d = p.degree();
        Complex log_r = log_ratio(p, L);
        if (!(std::abs(log_r.imag()) < M_PI / d))
            throw BranchLoss("argument " + fmt_g(log_r.imag()) + " at time " +
                             std::to_string(n + 1) + " exceeds pi/" +
                             std::to_string(d));
        L = static_cast<double>(d) * L + log_r;
        invD /= d;
        S += invD * log_r;
        ++n;
        ++steps;
        if (std::abs(invD * log_r) < tol) break;
    }
    return z * std::exp(S);
}

std::vector<Complex> critical_points(const Polynomial& p) {
    return poly_roots(p.derivative_coeffs());
}

std::vector<Complex> preimages(const Polynomial& p, Complex target) {
    std::vector<Complex> c = p.coeffs();
    c[0] -= target;
    return poly_roots(c);
}

} // namespace orbitport
