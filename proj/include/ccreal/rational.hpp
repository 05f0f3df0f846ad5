#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ccreal {

namespace mp = boost::multiprecision;

// Exact arbitrary-precision rational, always in canonical form
// (gcd(num,den)=1, den>0).  Backed by GMP's mpq.
using Integer  = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;

inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw std::invalid_argument("rational: zero denominator");
    // division canonicalizes; the mpq string constructor does not
    return Rational(num) / Rational(den);
}

inline Rational make_rational(long num, long den) {
    return make_rational(Integer(num), Integer(den));
}

inline int sign_of(const Rational& q) { return q.sign(); }

// Exact conversion of a finite double to a dyadic rational.
inline Rational rational_from_double(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("rational_from_double: non-finite");
    if (d == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(d, &exp);     // d = m * 2^exp, 0.5 <= |m| < 1
    auto mant = static_cast<std::int64_t>(std::ldexp(m, 53));  // exact, fits 54 bits
    Integer num(mant);
    int e = exp - 53;
    if (e >= 0) return Rational(num << e);
    return make_rational(num, Integer(1) << (-e));
}

// Gaussian rational a + bi.
struct CRational {
    Rational re;
    Rational im;

    CRational() = default;
    CRational(Rational r) : re(std::move(r)) {}
    CRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    CRational(long n) : re(n) {}

    bool is_zero() const { return re == 0 && im == 0; }

    friend CRational operator+(const CRational& a, const CRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend CRational operator-(const CRational& a, const CRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend CRational operator-(const CRational& a) { return {-a.re, -a.im}; }
    friend CRational operator*(const CRational& a, const CRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend bool operator==(const CRational& a, const CRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    CRational& operator+=(const CRational& o) { *this = *this + o; return *this; }
    CRational& operator*=(const CRational& o) { *this = *this * o; return *this; }
};

inline CRational imaginary_unit() { return CRational(Rational(0), Rational(1)); }

// Scalar helpers shared by the templated polynomial code.
inline bool scalar_is_zero(const Rational& q) { return q == 0; }
inline bool scalar_is_zero(const CRational& z) { return z.is_zero(); }

inline std::string to_string(const Rational& q) { return q.str(); }
inline std::string to_string(const CRational& z) {
    return z.re.str() + (z.im.sign() >= 0 ? "+" : "") + z.im.str() + "i";
}

}  // namespace ccreal
