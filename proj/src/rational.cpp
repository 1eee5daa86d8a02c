#include "crn/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace crn {

using boost::multiprecision::cpp_int;

Rational rational_from_decimal(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
        negative = text[pos] == '-';
        ++pos;
    }
    cpp_int mantissa = 0;
    cpp_int scale = 1;
    bool seen_digit = false;
    bool seen_dot = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mantissa = mantissa * 10 + (c - '0');
            if (seen_dot) scale *= 10;
            seen_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    // optional exponent part, e.g. "1.5e-3"
    cpp_int exp_scale_num = 1, exp_scale_den = 1;
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        ++pos;
        bool exp_neg = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            exp_neg = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
            throw std::invalid_argument("malformed exponent in decimal literal: " + text);
        long e = 0;
        for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos)
            e = e * 10 + (text[pos] - '0');
        cpp_int p = 1;
        for (long k = 0; k < e; ++k) p *= 10;
        (exp_neg ? exp_scale_den : exp_scale_num) = p;
    }
    if (!seen_digit || pos != text.size())
        throw std::invalid_argument("not a decimal literal: " + text);
    Rational q(mantissa * exp_scale_num, scale * exp_scale_den);
    return negative ? -q : q;
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("cannot convert non-finite double");
    return Rational(x);  // exact for cpp_rational
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

std::string to_fraction_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace crn
