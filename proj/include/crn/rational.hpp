#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace crn {

/// Arbitrary-precision rational, used where results must be exact
/// (conservation bases, convergence-rate constants).
using Rational = boost::multiprecision::cpp_rational;

/// Parses a decimal literal ("1.8", "-0.25", "3") into the exact fraction it denotes.
Rational rational_from_decimal(const std::string& text);

/// Exact conversion of an IEEE double to a fraction.
Rational rational_from_double(double x);

double to_double(const Rational& q);

/// "9/5", or "2" when the denominator is one.
std::string to_fraction_string(const Rational& q);

}  // namespace crn
