#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace evade {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/* A number read from a decimal literal, kept both as the exact rational it
 * denotes and as the nearest double. Geometry works on the double view;
 * exact values back equality checks (waypoint times, fence immobility) and
 * rational-coefficient runs. */
struct Decimal {
    double value = 0.0;
    Rational exact = 0;

    Decimal() = default;
    Decimal(double v, Rational e) : value(v), exact(std::move(e)) {}

    static Decimal from_double(double v);

    bool operator==(const Decimal& o) const { return exact == o.exact; }
    bool operator!=(const Decimal& o) const { return exact != o.exact; }
};

/* Parses "-12", "0.375", "6.02e3" into an exact rational plus double.
 * Throws ParseError on anything that is not a plain decimal literal. */
Decimal parse_decimal(const std::string& text);

} // namespace evade
