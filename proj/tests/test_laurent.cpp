// Coefficient-field tests: frozen expansion oracles for specific elements,
// then randomized field axioms, degree-map laws, representation coherence,
// and precision soundness.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>

#include "qhom/laurent.hpp"

#include "helpers.hpp"

using namespace qhom;
using qtest::bounded;
using qtest::frac;

TEST_CASE("oracle: monomials, fractions, and the degree map") {
  const LaurentScalar x3 = LaurentScalar::x_power(3);
  CHECK(sigma(x3) == std::optional<std::int64_t>(3));
  CHECK(x3.coefficient(3) == Rational(1));
  CHECK(x3.coefficient(2) == Rational(0));
  CHECK(x3.exact());

  // (x + 2x^2) / x^5 expands to 2x^{-3} + x^{-4}.
  const LaurentScalar f = LaurentScalar::fraction(QPoly{Rational(0), Rational(1), Rational(2)},
                                                  QPoly::monomial(Rational(1), 5));
  CHECK(sigma(f) == std::optional<std::int64_t>(-3));
  CHECK(f.coefficient(-3) == Rational(2));
  CHECK(f.coefficient(-4) == Rational(1));
  CHECK(f.coefficient(-5) == Rational(0));

  // sigma(0) = -infinity, encoded as nullopt; exact elements have no floor.
  CHECK(!sigma(LaurentScalar(0)).has_value());
  CHECK(!floor_of(LaurentScalar(5)).has_value());
  CHECK(floor_of(LaurentScalar::series({{0, Rational(1)}}, -4)) ==
        std::optional<std::int64_t>(-4));
}

TEST_CASE("oracle: geometric series expansion of 1/(1 - x^{-1})") {
  const LaurentScalar g =
      LaurentScalar::laurent_terms({{0, Rational(1)}, {-1, Rational(-1)}});
  const LaurentScalar inv = invert_exact(g);
  CHECK(inv * g == LaurentScalar(1));
  const TruncatedSeries tail = expand(inv, -6);
  CHECK(tail.floor == -6);
  for (std::int64_t k = 0; k >= -6; --k) {
    CHECK(tail.coeffs.at(k) == Rational(1));
  }

  // The truncated route reaches the same coefficients.
  const LaurentScalar s = LaurentScalar::series(
      std::map<std::int64_t, Rational>{{0, Rational(1)}, {-1, Rational(-1)}}, -6);
  const LaurentScalar si = invert(s, -6);
  CHECK(agrees_to(si, inv, -6));
  CHECK(agrees_to(si * s, LaurentScalar(1), -6));
}

TEST_CASE("oracle: error taxonomy of inversion, division, and empty degrees") {
  const LaurentScalar s = LaurentScalar::series(
      std::map<std::int64_t, Rational>{{0, Rational(1)}, {-1, Rational(-1)}}, -6);

  // Series of top degree 0 and floor -6 supports inversion only down to -6.
  CHECK_THROWS_WITH_AS(invert(s, -7), doctest::Contains("sound only down to"), Error);
  try {
    invert(s, -7);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FloorTooShallow);
  }

  CHECK_THROWS_AS(invert_exact(s), Error);                        // not exact
  CHECK_THROWS_AS(invert_exact(LaurentScalar(0)), Error);         // zero
  CHECK_THROWS_AS(div_exact(s, LaurentScalar(1)), Error);         // not exact
  CHECK_THROWS_AS(invert(LaurentScalar::series({}, -5), -5), Error);  // nothing retained
  try {
    invert_exact(LaurentScalar(0));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivisionByZero);
  }

  // The degree of a series with nothing retained is unknowable, never guessed.
  try {
    sigma(LaurentScalar::series({}, -5));
    CHECK_MESSAGE(false, "sigma of an empty truncation must refuse");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValBelowFloor);
  }
}

TEST_CASE("oracle: agrees_to compares retained coefficients down to the floor") {
  const LaurentScalar one(1);
  const LaurentScalar near = one + LaurentScalar::x_power(-4);
  CHECK(agrees_to(one, near, -3));
  CHECK(!agrees_to(one, near, -4));
  CHECK(agrees_to(LaurentScalar::series({{0, Rational(1)}}, -3), one, -3));
}

TEST_CASE("property: field axioms on random rational functions") {
  std::mt19937_64 rng(0xac1d0001ULL);
  for (int i = 0; i < 220; ++i) {
    CAPTURE(i);
    const LaurentScalar a = qtest::random_fraction(rng, 4);
    const LaurentScalar b = qtest::random_fraction(rng, 4);
    const LaurentScalar c = qtest::random_fraction(rng, 4);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a + b == b + a);
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + LaurentScalar(0) == a);
    CHECK(a * LaurentScalar(1) == a);
    CHECK((a - a).exact_zero());
    CHECK(a - b == a + (-b));
    if (!a.exact_zero()) {
      CHECK(a * invert_exact(a) == LaurentScalar(1));
      if (!b.exact_zero()) {
        CHECK(div_exact(a * b, b) == a);
      }
    }
  }
}

TEST_CASE("property: sigma is multiplicative and ultrametric") {
  std::mt19937_64 rng(0xac1d0002ULL);
  for (int i = 0; i < 220; ++i) {
    CAPTURE(i);
    const LaurentScalar a = qtest::random_nonzero_fraction(rng, 4);
    const LaurentScalar b = qtest::random_nonzero_fraction(rng, 4);
    const std::int64_t sa = *sigma(a);
    const std::int64_t sb = *sigma(b);
    CHECK(sigma(a * b) == std::optional<std::int64_t>(sa + sb));
    const LaurentScalar apb = a + b;
    if (!apb.exact_zero()) {
      CHECK(*sigma(apb) <= std::max(sa, sb));
      if (sa != sb) {
        CHECK(*sigma(apb) == std::max(sa, sb));
      }
    }
    if (!a.exact_zero()) {
      CHECK(sigma(invert_exact(a)) == std::optional<std::int64_t>(-sa));
    }
  }
}

TEST_CASE("property: exact and truncated representations cohere") {
  std::mt19937_64 rng(0xac1d0003ULL);
  for (int i = 0; i < 220; ++i) {
    CAPTURE(i);
    const LaurentScalar a = qtest::random_nonzero_fraction(rng, 4);
    const LaurentScalar b = qtest::random_nonzero_fraction(rng, 4);
    const std::int64_t sa = *sigma(a);
    const std::int64_t sb = *sigma(b);
    const std::int64_t f = sa - 2 - (i % 9);
    const LaurentScalar ta(expand(a, f));

    // The truncation is coefficient-faithful down to its floor...
    CHECK(agrees_to(ta, a, f));
    // ...and arithmetic through it matches the exact model wherever the
    // result floor is still sound.
    CHECK(agrees_to(ta * b, a * b, f + sb));
    CHECK(agrees_to(ta + b, a + b, f));
    CHECK(agrees_to(ta - b, a - b, f));

    // Truncated inversion agrees with the exact inverse over its reach.
    const std::int64_t reach = f - 2 * sa;
    const LaurentScalar tinv = invert(ta, reach);
    CHECK(agrees_to(tinv, invert_exact(a), reach));
    CHECK(agrees_to(ta * tinv, LaurentScalar(1), f - sa));
  }
}

TEST_CASE("property: deeper floors never change already-reported coefficients") {
  std::mt19937_64 rng(0xac1d0004ULL);
  for (int i = 0; i < 220; ++i) {
    CAPTURE(i);
    const LaurentScalar a = qtest::random_nonzero_fraction(rng, 4);
    const std::int64_t sa = *sigma(a);
    const std::int64_t shallow = sa - 1 - (i % 6);
    const std::int64_t deep = shallow - bounded(rng, 1, 12);
    const TruncatedSeries ts = expand(a, shallow);
    const TruncatedSeries td = expand(a, deep);
    for (const auto& [k, c] : ts.coeffs) {
      CHECK(td.coeffs.at(k) == c);
    }
    for (const auto& [k, c] : td.coeffs) {
      if (k >= shallow) {
        CHECK(ts.coeffs.count(k) == 1);
      }
    }

    // Same discipline for series inversion at two depths.
    const LaurentScalar sh(expand(a, shallow));
    const LaurentScalar dp(expand(a, deep));
    const LaurentScalar ish = invert(sh, shallow - 2 * sa);
    const LaurentScalar idp = invert(dp, deep - 2 * sa);
    CHECK(agrees_to(ish, idp, shallow - 2 * sa));
  }
}
