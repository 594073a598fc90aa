#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace slowbirkhoff {

// All certificates are comparisons of exact rationals; doubles appear only in
// torus mode and in report columns marked approximate.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int pow2(unsigned bits) { return Int(1) << bits; }

inline std::int64_t pow2_i64(unsigned bits) {
    if (bits >= 63) throw std::overflow_error("pow2_i64: exponent too large");
    return std::int64_t(1) << bits;
}

// exact floor(num/den) for any signs, den != 0
inline Int floor_div(Int num, Int den) {
    if (den == 0) throw std::domain_error("floor_div: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Int q = num / den;
    if (num % den != 0 && num < 0) --q;
    return q;
}

inline Int ceil_div(Int num, Int den) {
    if (den == 0) throw std::domain_error("ceil_div: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Int q = num / den;
    if (num % den != 0 && num > 0) ++q;
    return q;
}

inline Int floor_rat(const Rat& r) { return floor_div(numerator(r), denominator(r)); }
inline Int ceil_rat(const Rat& r) { return ceil_div(numerator(r), denominator(r)); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Accepts "p/q", "p", or "-p/q". No floating point on the exact path.
inline Rat parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(text));
        Int num(text.substr(0, slash));
        Int den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rat(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational: '" + text + "'");
    }
}

inline std::string rat_str(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

// True iff r = c / 2^k for integers c, k >= 0.
inline bool is_dyadic(const Rat& r) {
    Int den = denominator(r);
    while (den % 2 == 0) den /= 2;
    return den == 1;
}

}  // namespace slowbirkhoff
