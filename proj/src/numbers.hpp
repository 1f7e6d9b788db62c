// Exact arithmetic used by the counting oracle: arbitrary-precision integers
// for coloring counts, rationals for marginals. Floats appear only at the
// reporting boundary.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>

namespace ssmix {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }
inline double to_double(const BigInt& z) { return z.template convert_to<double>(); }

// log of a positive rational, robust when numerator/denominator overflow double.
inline double log_rational(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (num <= 0) return -std::numeric_limits<double>::infinity();
    auto log_big = [](const BigInt& z) {
        const auto bits = boost::multiprecision::msb(z);
        if (bits <= 900) return std::log(to_double(z));
        const unsigned shift = static_cast<unsigned>(bits - 900);
        return std::log(to_double(BigInt(z >> shift))) + shift * std::log(2.0);
    };
    return log_big(num) - log_big(den);
}

}  // namespace ssmix
