#pragma once

// Exact-rational and adjustable-precision floating arithmetic used across the
// library. Rationals back every closed form and structural error; mpfr reals
// back the asymptotic tables, where quantities like n^(2/kappa) are
// irrational.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

namespace condquant {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;
using Real = boost::multiprecision::mpfr_float;

inline constexpr unsigned kDefaultDecimalDigits = 50;

// Working precision for Real, in decimal digits. Reads CONDQUANT_PRECISION
// once; call early in main(). Returns the digit count in effect.
inline unsigned init_precision() {
    unsigned digits = kDefaultDecimalDigits;
    if (const char* env = std::getenv("CONDQUANT_PRECISION")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && v >= 10 && v <= 100000) digits = unsigned(v);
    }
    Real::default_precision(digits);
    return digits;
}

inline Int ipow(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

inline Rational rpow(const Rational& base, long e) {
    if (e < 0) {
        Rational p = rpow(base, -e);
        return Rational(denominator(p), numerator(p));
    }
    Rational r = 1, b = base;
    auto u = static_cast<unsigned long>(e);
    while (u) {
        if (u & 1ul) r *= b;
        b *= b;
        u >>= 1ul;
    }
    return r;
}

inline Real to_real(const Rational& q) {
    return Real(numerator(q)) / Real(denominator(q));
}

inline Real to_real(const Int& n) { return Real(n); }

// Fixed-notation decimal rendering with `digits` places after the point,
// correctly rounded; used for CSV columns and JSON "approx" fields so output
// is byte-stable across runs.
inline std::string decimal_string(const Rational& q, unsigned digits) {
    bool neg = q < 0;
    Rational a = neg ? Rational(-q) : q;
    Int scale = ipow(10, digits);
    // round half away from zero on the scaled numerator
    Int num = numerator(a) * scale * 2 + denominator(a);
    Int quo = num / (denominator(a) * 2);
    std::string s = quo.str();
    if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
    s.insert(s.size() - digits, ".");
    return (neg && quo != 0) ? "-" + s : s;
}

inline std::string decimal_string(const Real& x, unsigned digits) {
    std::string s = x.str(digits, std::ios_base::fixed);
    return s;
}

}  // namespace condquant
