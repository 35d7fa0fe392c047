#pragma once

#include <complex>
#include <string>
#include <vector>

#include "orbitport/errors.hpp"
#include "orbitport/portrait.hpp"

namespace orbitport {

using Complex = std::complex<double>;

// Complex polynomial, coefficients stored low -> high. Degree >= 2 with a
// nonzero leading coefficient (derivatives and differences are handled as raw
// coefficient vectors, not through this type).
class Polynomial {
public:
    explicit Polynomial(std::vector<Complex> coeffs);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    Complex lead() const { return coeffs_.back(); }
    bool monic() const { return std::abs(lead() - 1.0) <= 1e-12; }

    Complex operator()(Complex z) const;
    Complex derivative(Complex z) const;
    std::vector<Complex> derivative_coeffs() const;

    std::string str() const; // "z^3 + 1.5z" style, high powers first

private:
    std::vector<Complex> coeffs_;
};

// Uniform coefficient box for a whole sequence: degrees in [2, d], leading
// coefficient modulus in [1/K, K], every lower coefficient modulus <= M.
struct SequenceBounds {
    int d;
    double K;
    double M;

    SequenceBounds(int d_, double K_, double M_);
    void check(const Polynomial& p) const; // BoundsViolation with the offense
    std::string str() const;               // "{d=3, K=1, M=1.5}"
};

// Smallest radius this library certifies as an escape radius for the bounds:
// R = max(1, K(Md+2)), giving |P(z)| >= 2|z| whenever |z| >= R for every
// polynomial inside the box.
double escape_radius(const SequenceBounds& b);

// The sequence P_1, P_2, ... of maps applied at each time step, presented
// eventually periodically or by a binary word (odd times apply odd_poly, time
// 2k applies the letter polynomial w[(k-1) mod |w|], matching
// DegreeSequence::word). Every generator polynomial is checked against the
// declared bounds up front.
class PolynomialSequence {
public:
    static PolynomialSequence periodic(std::vector<Polynomial> per, SequenceBounds b);
    static PolynomialSequence preperiodic(std::vector<Polynomial> pre,
                                          std::vector<Polynomial> per,
                                          SequenceBounds b);
    static PolynomialSequence word(const std::string& w, const Polynomial& letter0,
                                   const Polynomial& letter1, const Polynomial& odd_poly,
                                   SequenceBounds b);

    const Polynomial& at(long m) const; // P_m, m >= 1
    const SequenceBounds& bounds() const { return bounds_; }
    bool monic() const { return monic_; }
    long preperiod() const { return static_cast<long>(pre_.size()); }
    long period() const { return static_cast<long>(per_.size()); }

    // Degrees d_1, d_2, ... as the exact combinatorial object.
    DegreeSequence degree_sequence() const;
    std::string str() const;

private:
    PolynomialSequence(std::vector<Polynomial> pre, std::vector<Polynomial> per,
                       SequenceBounds b);
    std::vector<Polynomial> pre_, per_;
    SequenceBounds bounds_;
    bool monic_ = true;
};

struct EvalResult {
    Complex value{0.0};
    Complex derivative{1.0};
    long long D = 1;       // product d_{m+1} * ... * d_n
    bool overflow = false; // value left the double range, or D the 64-bit range
};

// Q_{m,n}(z) = P_n(P_{n-1}(...P_{m+1}(z))), Q_{m,m} = identity; derivative by
// the chain rule. Overflow is flagged, never thrown: the value freezes at the
// first non-finite iterate and D at its last representable product.
EvalResult evaluate(const PolynomialSequence& seq, long m, long n, Complex z);

struct GreenResult {
    double value = 0.0;    // G_m(z); 0 when z never escapes (filled set)
    bool escaping = false;
    long steps = 0;
};

// Escape-rate potential G_m(z) = lim (1/D_{m,n}) log|Q_{m,n}(z)|, computed in
// log space once the orbit is safely past the escape radius and stopped when
// successive estimates differ by less than tol. A bounded orbit (cap reached
// inside the escape radius) reports value 0 with escaping = false.
GreenResult green(const PolynomialSequence& seq, long m, Complex z,
                  double tol = 1e-12, long cap = 10000);

// Böttcher coordinate phi_m(z) = lim Q_{m,n}(z)^{1/D_{m,n}}, the branch that
// is tangent to the identity at infinity; requires a monic sequence
// (MonicRequired). Computed as z * exp(sum (1/D_{m,n+1}) log r_n) with
// r_n = P_{n+1}(w_n)/w_n^{d_{n+1}}; a step with |arg r_n| >= pi/d_{n+1}
// (including an orbit point at 0, or no escape within cap) loses the branch
// and throws BranchLoss. |phi_m(z)| = exp(G_m(z)) up to tolerances.
Complex bottcher(const PolynomialSequence& seq, long m, Complex z,
                 double tol = 1e-12, long cap = 10000);

// Roots of P' (there are degree-1 of them, with multiplicity).
std::vector<Complex> critical_points(const Polynomial& p);

// The degree solutions of P(z) = target, with multiplicity.
std::vector<Complex> preimages(const Polynomial& p, Complex target);

} // namespace orbitport
