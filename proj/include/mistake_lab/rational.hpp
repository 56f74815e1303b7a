#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mistake_lab {

/// Exact arbitrary-precision rational. Every dimension value, weight and loss
/// in the library is carried in this type.
using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "7/8", "-1", "3" or a finite decimal such as "0.7" (exactly 7/10).
/// Throws ParseError on anything else.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" form, or "num" when the denominator is 1.
std::string to_string(const Rational& value);

/// Decimal rendering with 17 significant digits.
std::string to_decimal(const Rational& value);

/// "47/16 (2.9375)"
std::string render(const Rational& value);

double to_double(const Rational& value);

/// Exact binary value of a finite double.
Rational from_double(double value);

/// num/den in lowest terms; den must be nonzero.
Rational ratio(long num, long den);

/// 2^-e as an exact rational.
Rational pow2_inverse(unsigned e);

}  // namespace mistake_lab
