#pragma once

// Exact rational arithmetic, backed by GMP's mpq_class. All numbers in this
// library are exact; nothing is ever rounded to floating point.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace qhom {

using Rational = mpq_class;

/// Build p/q, canonicalized.
Rational rat(long num, long den = 1);

/// Parse "p" or "p/q" (optionally signed). Throws ParseError on anything else.
Rational rat_parse(const std::string& text);

std::optional<Rational> rat_try_parse(const std::string& text);

/// Canonical text form: "p" when the denominator is 1, else "p/q".
std::string rat_str(const Rational& r);

bool rat_is_integer(const Rational& r);

/// Greatest integer <= r. Requires the result to fit in int64.
std::int64_t rat_floor_i64(const Rational& r);

/// Least integer >= r.
std::int64_t rat_ceil_i64(const Rational& r);

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

}  // namespace qhom
