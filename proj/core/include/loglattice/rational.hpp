#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace loglattice {

/// Arbitrary precision rational. gmpxx keeps values canonical after every operation.
using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p", "p/q" or "-p/q". Throws InvalidArgument on anything else or q == 0.
Rational parse_rational(std::string_view text);

/// "p" when the denominator is 1, otherwise "p/q".
std::string to_string(const Rational& q);

/// floor(q) as a plain int. Throws if it does not fit.
int floor_to_int(const Rational& q);

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace loglattice
