#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <string>
#include <vector>

#include "orbitport/errors.hpp"

namespace orbitport {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Angle on the circle R/Z, held as an exact reduced rational in [0,1).
// All combinatorial operations on angles are exact; nothing in this header
// touches floating point except the explicit to_double() escape hatch.
class Angle {
public:
    Angle() : value_(0) {}
    Angle(const BigInt& num, const BigInt& den);
    Angle(long num, long den) : Angle(BigInt(num), BigInt(den)) {}
    explicit Angle(const Rational& value);

    static Angle parse(const std::string& text); // "p/q" or "p"

    const Rational& value() const { return value_; }
    BigInt num() const { return numerator(value_); }
    BigInt den() const { return denominator(value_); }

    std::string str() const; // reduced "p/q", integers as "0/1"
    double to_double() const;

    friend bool operator==(const Angle& a, const Angle& b) { return a.value_ == b.value_; }
    friend bool operator!=(const Angle& a, const Angle& b) { return a.value_ != b.value_; }
    friend bool operator<(const Angle& a, const Angle& b) { return a.value_ < b.value_; }
    friend bool operator>(const Angle& a, const Angle& b) { return a.value_ > b.value_; }
    friend bool operator<=(const Angle& a, const Angle& b) { return a.value_ <= b.value_; }
    friend bool operator>=(const Angle& a, const Angle& b) { return a.value_ >= b.value_; }

    // Rotation mod 1.
    friend Angle operator+(const Angle& a, const Angle& b);
    friend Angle operator-(const Angle& a, const Angle& b);

private:
    Rational value_; // invariant: 0 <= value_ < 1, reduced (cpp_rational canonical)
};

std::ostream& operator<<(std::ostream& os, const Angle& a);

// theta |-> d*theta mod 1, exact. Requires d >= 1.
Angle dmap(const Angle& theta, int d);

// The d preimages (theta + k)/d, k = 0..d-1, in increasing order. d >= 2.
std::vector<Angle> preimages(const Angle& theta, int d);

// Open arc (start, end) traversed counterclockwise; start != end, so the
// length lies strictly in (0,1). Arcs never denote the full circle.
struct Arc {
    Angle start, end;

    Arc(Angle s, Angle e);

    Rational length() const;            // (end - start) mod 1, in (0,1)
    bool contains(const Angle& theta) const;         // strict interior
    bool contains_closure(const Angle& theta) const; // endpoints included
    Angle midpoint() const;
    std::string str() const; // "(p/q, p/q)"

    friend bool operator==(const Arc& a, const Arc& b) {
        return a.start == b.start && a.end == b.end;
    }
};

std::ostream& operator<<(std::ostream& os, const Arc& a);

// Finite set of N >= 2 distinct angles in increasing circular order.
class AngleSet {
public:
    explicit AngleSet(std::vector<Angle> angles); // sorts, rejects dupes / N<2

    int size() const { return static_cast<int>(angles_.size()); }
    const Angle& operator[](int i) const { return angles_[i]; }
    const std::vector<Angle>& angles() const { return angles_; }

    // The N complementary arcs (theta_i, theta_{i+1}), indices cyclic.
    std::vector<Arc> complementary_arcs() const;

    bool contains(const Angle& theta) const;
    std::string str() const; // "{p/q, p/q, ...}"

    friend bool operator==(const AngleSet& a, const AngleSet& b) {
        return a.angles_ == b.angles_;
    }
    friend bool operator!=(const AngleSet& a, const AngleSet& b) { return !(a == b); }

private:
    std::vector<Angle> angles_;
};

std::ostream& operator<<(std::ostream& os, const AngleSet& s);

// Number of preimages in I of every point of J under theta |-> d*theta.
// Exact: the count of preimages of a witness point is constant over J unless
// an image of an endpoint of I lies in J's interior, which raises
// NonConstantCover. Counts preimages in the open arc I.
int covering_count(const Arc& I, int d, const Arc& J);

} // namespace orbitport
