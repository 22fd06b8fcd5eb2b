#pragma once

// Exact rational scalars. Every energy value, multiplier and skeleton
// coordinate in the library is a Rational; there is no epsilon anywhere.

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lagskel {

using Rational = mpq_class;
using RationalVector = std::vector<Rational>;

/// num/den in lowest terms. den must be nonzero.
Rational make_rational(long num, long den);

/// Parses "7", "-3/4", "0.3", "1.25e-2" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& value);

/// Always "p/q", including integers ("5/1").
std::string to_fraction_string(const Rational& value);

std::string to_string(std::span<const Rational> values, std::string_view sep = ",");

Rational dot(std::span<const Rational> a, std::span<const Rational> b);

/// Parses a comma separated list of rationals ("1,2/3,-0.5").
RationalVector parse_rational_list(std::string_view text);

}  // namespace lagskel
