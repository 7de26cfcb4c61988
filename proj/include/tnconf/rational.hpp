#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace tnconf {

/// Exact rational scalar. GMP keeps every value in lowest terms with a
/// positive denominator after each arithmetic operation.
using Rat = mpq_class;
using RatVector = std::vector<Rat>;

/// Parses "p", "-p", "p/q" (decimal integers). Throws std::invalid_argument
/// on malformed input or a zero denominator. The result is canonical.
Rat parse_rat(std::string_view text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string to_string(const Rat& value);

inline int sign(const Rat& value) { return sgn(value); }

Rat dot(const RatVector& a, const RatVector& b);
bool is_zero(const RatVector& v);

RatVector operator+(const RatVector& a, const RatVector& b);
RatVector operator-(const RatVector& a, const RatVector& b);
RatVector operator*(const Rat& s, const RatVector& v);

}  // namespace tnconf
