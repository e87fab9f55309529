#pragma once

// The coefficient field R of descending Laurent series over the rationals.
//
// An element is represented either exactly, as a reduced rational function
// num(x)/den(x) (read as its expansion in descending powers of x), or as a
// truncated series: finitely many exact coefficients down to an explicit
// floor, with everything below the floor unknown.
//
// The degree map sigma gives the top exponent of the expansion
// (sigma(0) = -infinity); it is multiplicative and non-Archimedean:
// sigma(a*b) = sigma(a) + sigma(b), sigma(a+b) <= max(sigma(a), sigma(b)).

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "qhom/poly.hpp"
#include "qhom/rational.hpp"

namespace qhom {

using QPoly = Poly<Rational>;

/// Reduced fraction num/den over Q[x]: den monic and nonzero, gcd(num,den)=1.
/// The canonical zero is 0/1.
struct RationalFunction {
  QPoly num;
  QPoly den{Rational(1)};

  bool operator==(const RationalFunction&) const = default;
};

/// Finitely many exact coefficients c_j (all nonzero, j >= floor); the true
/// element may differ from the recorded sum only in degrees < floor.
struct TruncatedSeries {
  std::map<std::int64_t, Rational> coeffs;
  std::int64_t floor = 0;

  bool operator==(const TruncatedSeries&) const = default;
};

class LaurentScalar {
 public:
  /// Exact zero.
  LaurentScalar() : rep_(RationalFunction{}) {}
  LaurentScalar(int v) : LaurentScalar(Rational(v)) {}
  explicit LaurentScalar(const Rational& v);
  explicit LaurentScalar(RationalFunction rf) : rep_(std::move(rf)) {}
  explicit LaurentScalar(TruncatedSeries ts) : rep_(std::move(ts)) {}

  /// Exact monomial x^k.
  static LaurentScalar x_power(std::int64_t k);

  /// Exact num/den; reduces and normalizes. Throws DivisionByZero if den = 0.
  static LaurentScalar fraction(QPoly num, QPoly den);

  /// Exact Laurent polynomial from exponent -> coefficient.
  static LaurentScalar laurent_terms(const std::map<std::int64_t, Rational>& terms);

  static LaurentScalar series(std::map<std::int64_t, Rational> coeffs, std::int64_t floor);

  bool exact() const { return std::holds_alternative<RationalFunction>(rep_); }
  const RationalFunction& as_fraction() const { return std::get<RationalFunction>(rep_); }
  const TruncatedSeries& as_series() const { return std::get<TruncatedSeries>(rep_); }

  /// True only for the canonical exact zero.
  bool exact_zero() const;

  /// True for a truncated series with no retained coefficients: the element is
  /// zero down to its floor and unknown below.
  bool known_empty() const;

  /// Retained coefficient of x^k (zero if the exponent is absent; for series
  /// representations only meaningful at or above the floor).
  Rational coefficient(std::int64_t k) const;

  LaurentScalar operator+(const LaurentScalar& o) const;
  LaurentScalar operator-(const LaurentScalar& o) const;
  LaurentScalar operator-() const;
  LaurentScalar operator*(const LaurentScalar& o) const;

  bool operator==(const LaurentScalar& o) const { return rep_ == o.rep_; }

 private:
  std::variant<RationalFunction, TruncatedSeries> rep_;
};

inline bool is_zero(const LaurentScalar& a) { return a.exact_zero(); }

/// Top exponent of the expansion; nullopt encodes sigma(0) = -infinity.
/// Throws ValBelowFloor for a truncated series with no retained terms (the
/// true degree is below the floor and unknown).
std::optional<std::int64_t> sigma(const LaurentScalar& a);

/// Floor of the representation; nullopt for exact elements (complete data).
std::optional<std::int64_t> floor_of(const LaurentScalar& a);

/// Multiplicative inverse. Exact inputs give an exact result (target_floor is
/// ignored); series inputs give a series truncated at target_floor, provided
/// the input's own floor supports that depth (inverting a series of degree t
/// known to floor f is sound only down to f - 2t; deeper requests throw
/// FloorTooShallow). Throws DivisionByZero on the exact zero.
LaurentScalar invert(const LaurentScalar& a, std::int64_t target_floor);

/// Exact inverse of an exact element.
LaurentScalar invert_exact(const LaurentScalar& a);

/// Coefficient expansion down to target_floor. Exact elements expand to any
/// depth; series cannot be deepened below their own floor (FloorTooShallow).
TruncatedSeries expand(const LaurentScalar& a, std::int64_t target_floor);

/// a and b have the same retained coefficients at every exponent >= floor.
bool agrees_to(const LaurentScalar& a, const LaurentScalar& b, std::int64_t floor);

/// Exact division num/den of rational functions.
LaurentScalar div_exact(const LaurentScalar& a, const LaurentScalar& b);

QPoly qpoly_gcd(QPoly a, QPoly b);
std::pair<QPoly, QPoly> qpoly_divmod(const QPoly& a, const QPoly& b);

/// Canonical text: "(num)/(den)" with descending monomials for exact
/// elements; "c_t*x^t + ... ; floor=m" for series.
std::string to_string(const LaurentScalar& a);
std::string to_string(const QPoly& p, const std::string& var = "x");

}  // namespace qhom
