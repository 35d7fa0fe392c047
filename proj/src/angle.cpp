#include "orbitport/angle.hpp"

#include <ostream>
#include <sstream>

namespace orbitport {

namespace {

// Reduce a rational to its representative in [0,1).
Rational mod1(const Rational& r) {
    BigInt n = numerator(r), d = denominator(r); // d > 0 in cpp_rational
    BigInt m = n % d;
    if (m < 0) m += d;
    return Rational(m, d);
}

} // namespace

Angle::Angle(const BigInt& num, const BigInt& den) {
    if (den == 0) throw ParseError("angle denominator is zero");
    value_ = mod1(Rational(num, den));
}

Angle::Angle(const Rational& value) : value_(mod1(value)) {}

Angle Angle::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Angle(BigInt(text), BigInt(1));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        return Angle(num, den);
    } catch (const std::runtime_error& e) {
        throw ParseError("bad angle '" + text + "': " + e.what());
    }
}

std::string Angle::str() const {
    std::ostringstream os;
    os << num();
    if (den() != 1) os << "/" << den();
    return os.str();
}

double Angle::to_double() const {
    return static_cast<double>(value_);
}

Angle operator+(const Angle& a, const Angle& b) { return Angle(a.value_ + b.value_); }
Angle operator-(const Angle& a, const Angle& b) { return Angle(a.value_ - b.value_); }

std::ostream& operator<<(std::ostream& os, const Angle& a) { return os << a.str(); }

Angle dmap(const Angle& theta, int d) {
    if (d < 1) throw ParseError("dmap degree must be >= 1");
    return Angle(theta.value() * d);
}

std::vector<Angle> preimages(const Angle& theta, int d) {
    if (d < 2) throw ParseError("preimages degree must be >= 2");
    std::vector<Angle> out;
    out.reserve(d);
    for (int k = 0; k < d; ++k)
        out.push_back(Angle((theta.value() + k) / d));
    return out; // (theta + k)/d with theta in [0,1) is already increasing in k
}

Arc::Arc(Angle s, Angle e) : start(std::move(s)), end(std::move(e)) {
    if (start == end) throw ParseError("arc endpoints coincide: " + start.str());
}

Rational Arc::length() const {
    Rational diff = end.value() - start.value();
    if (diff <= 0) diff += 1;
    return diff;
}

bool Arc::contains(const Angle& theta) const {
    if (theta == start || theta == end) return false;
    Rational offset = theta.value() - start.value();
    if (offset < 0) offset += 1;
    return offset > 0 && offset < length();
}

bool Arc::contains_closure(const Angle& theta) const {
    return theta == start || theta == end || contains(theta);
}

Angle Arc::midpoint() const {
    return Angle(start.value() + length() / 2);
}

std::string Arc::str() const {
    return "(" + start.str() + ", " + end.str() + ")";
}

std::ostream& operator<<(std::ostream& os, const Arc& a) { return os << a.str(); }

AngleSet::AngleSet(std::vector<Angle> angles) : angles_(std::move(angles)) {
    if (angles_.size() < 2) throw ParseError("angle set needs at least 2 angles");
    std::sort(angles_.begin(), angles_.end());
    for (std::size_t i = 1; i < angles_.size(); ++i)
        if (angles_[i - 1] == angles_[i])
            throw ParseError("duplicate angle " + angles_[i].str() + " in set");
}

std::vector<Arc> AngleSet::complementary_arcs() const {
    std::vector<Arc> arcs;
    arcs.reserve(angles_.size());
    for (std::size_t i = 0; i < angles_.size(); ++i)
        arcs.emplace_back(angles_[i], angles_[(i + 1) % angles_.size()]);
    return arcs;
}

bool AngleSet::contains(const Angle& theta) const {
    return std::binary_search(angles_.begin(), angles_.end(), theta);
}

std::string AngleSet::str() const {
    std::string out = "{";
    for (std::size_t i = 0; i < angles_.size(); ++i) {
        if (i) out += ", ";
        out += angles_[i].str();
    }
    return out + "}";
}

std::ostream& operator<<(std::ostream& os, const AngleSet& s) { return os << s.str(); }

int covering_count(const Arc& I, int d, const Arc& J) {
    if (d < 2) throw ParseError("covering_count degree must be >= 2");
    // The preimage count of a moving witness jumps exactly when it crosses an
    // image of an endpoint of I, so the count is constant over the open arc J
    // iff neither image endpoint lies in J's interior. When both images
    // coincide the entering and leaving preimages cancel and no jump happens.
    Angle e1 = dmap(I.start, d), e2 = dmap(I.end, d);
    if (e1 != e2 && (J.contains(e1) || J.contains(e2)))
        throw NonConstantCover("image endpoint " +
                               (J.contains(e1) ? e1.str() : e2.str()) +
                               " lies inside " + J.str());
    // e1 == e2 leaves a removable dip at that single point; witness around it.
    Angle w = J.midpoint();
    if (w == e1) w = Angle(J.start.value() + J.length() / 4);
    int count = 0;
    for (const Angle& pre : preimages(w, d))
        if (I.contains(pre)) ++count;
    return count;
}

} // namespace orbitport
