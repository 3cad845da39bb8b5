#include "evade/decimal.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "evade/errors.hpp"

namespace evade {

Decimal Decimal::from_double(double v) {
    // Shortest round-trip text keeps re-serialized files human readable.
    std::ostringstream os;
    os.precision(17);
    os << v;
    return parse_decimal(os.str());
}

Decimal parse_decimal(const std::string& text) {
    const char* s = text.c_str();
    size_t i = 0, n = text.size();
    auto fail = [&]() -> Decimal {
        throw ParseError("not a decimal literal: '" + text + "'");
    };

    bool neg = false;
    if (i < n && (s[i] == '+' || s[i] == '-')) neg = (s[i++] == '-');

    BigInt mantissa = 0;
    long frac_digits = 0;
    bool any_digit = false;
    while (i < n && std::isdigit((unsigned char)s[i])) {
        mantissa = mantissa * 10 + (s[i++] - '0');
        any_digit = true;
    }
    if (i < n && s[i] == '.') {
        ++i;
        while (i < n && std::isdigit((unsigned char)s[i])) {
            mantissa = mantissa * 10 + (s[i++] - '0');
            ++frac_digits;
            any_digit = true;
        }
    }
    if (!any_digit) fail();

    long expo = 0;
    if (i < n && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < n && (s[i] == '+' || s[i] == '-')) eneg = (s[i++] == '-');
        if (i >= n || !std::isdigit((unsigned char)s[i])) fail();
        while (i < n && std::isdigit((unsigned char)s[i])) {
            expo = expo * 10 + (s[i++] - '0');
            if (expo > 100000) fail();
        }
        if (eneg) expo = -expo;
    }
    if (i != n) fail();

    long p = expo - frac_digits;
    BigInt num = mantissa, den = 1;
    if (p >= 0) {
        num *= boost::multiprecision::pow(BigInt(10), (unsigned)p);
    } else {
        den = boost::multiprecision::pow(BigInt(10), (unsigned)(-p));
    }
    if (neg) num = -num;

    Decimal d;
    d.exact = Rational(num, den);
    d.value = std::strtod(text.c_str(), nullptr);
    return d;
}

} // namespace evade
