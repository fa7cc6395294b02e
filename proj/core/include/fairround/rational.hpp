#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace fairround {

/// Exact rational scalar used for every instance quantity and LP coefficient.
/// Expression templates are disabled so `auto` never captures a lazy expression.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

/// Parses "p/q", "-p/q", an integer, or a finite decimal such as "0.125".
/// Throws SchemaError on anything else.
Rational parse_rational(std::string_view text);

/// Canonical text form: integers print without a denominator, otherwise "p/q".
std::string to_string(const Rational& value);

BigInt floor(const Rational& value);
BigInt ceil(const Rational& value);

bool is_integer(const Rational& value);

double to_double(const Rational& value);

/// Best rational approximation of `value` whose denominator does not exceed
/// `max_denominator` (continued-fraction convergents and semiconvergents).
Rational snap_to_rational(double value, std::int64_t max_denominator);

}  // namespace fairround
