/* rational.hh -- exact rational numbers and small helpers on top of GMP */
#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace cpa {

/// Exact arbitrary-precision rational.  All probabilities and costs in
/// the library are `Rat`; no floating point is used anywhere.
using Rat = mpq_class;

/// Parse "a/b" or "a" (optionally signed) into a canonical rational.
/// Throws ValidationError on syntax errors or a zero denominator.
Rat parse_rat(const std::string& text);

/// Render canonically: "a/b" when the denominator is not 1, else "a".
std::string rat_str(const Rat& q);

/// Least common multiple of the denominators of `qs` (1 when empty).
mpz_class common_denominator(const std::vector<Rat>& qs);

inline bool is_zero(const Rat& q) { return sgn(q) == 0; }
inline bool is_negative(const Rat& q) { return sgn(q) < 0; }

}  // namespace cpa
