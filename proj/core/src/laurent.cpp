#include "qhom/laurent.hpp"

#include <algorithm>
#include <utility>

namespace qhom {

// ---------------------------------------------------------------------------
// Q[x] division and gcd
// ---------------------------------------------------------------------------

std::pair<QPoly, QPoly> qpoly_divmod(const QPoly& a, const QPoly& b) {
  if (b.zero()) fail(ErrorKind::DivisionByZero, "polynomial division by zero");
  if (a.degree() < b.degree()) return {QPoly(), a};
  std::vector<Rational> rem(a.coefficients());
  const int db = b.degree();
  const Rational lead = b.coeff(db);
  std::vector<Rational> quot(static_cast<std::size_t>(a.degree() - db) + 1, Rational(0));
  for (int i = a.degree(); i >= db; --i) {
    Rational c = rem[static_cast<std::size_t>(i)];
    if (sgn(c) == 0) continue;
    Rational q = c / lead;
    quot[static_cast<std::size_t>(i - db)] = q;
    for (int j = 0; j <= db; ++j)
      rem[static_cast<std::size_t>(i - db + j)] -= q * b.coeff(j);
  }
  return {QPoly(std::move(quot)), QPoly(std::move(rem))};
}

QPoly qpoly_gcd(QPoly a, QPoly b) {
  while (!b.zero()) {
    auto [q, r] = qpoly_divmod(a, b);
    (void)q;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.zero()) return a;
  return a.scaled(Rational(1) / a.leading());
}

// ---------------------------------------------------------------------------
// Construction and canonical forms
// ---------------------------------------------------------------------------

static RationalFunction make_rf(QPoly num, QPoly den) {
  if (den.zero()) fail(ErrorKind::DivisionByZero, "rational function with zero denominator");
  if (num.zero()) return RationalFunction{QPoly(), QPoly{Rational(1)}};
  QPoly g = qpoly_gcd(num, den);
  if (g.degree() > 0) {
    num = qpoly_divmod(num, g).first;
    den = qpoly_divmod(den, g).first;
  }
  const Rational lead = den.leading();
  if (lead != 1) {
    num = num.scaled(Rational(1) / lead);
    den = den.scaled(Rational(1) / lead);
  }
  return RationalFunction{std::move(num), std::move(den)};
}

LaurentScalar::LaurentScalar(const Rational& v) {
  if (sgn(v) == 0)
    rep_ = RationalFunction{};
  else
    rep_ = RationalFunction{QPoly{v}, QPoly{Rational(1)}};
}

LaurentScalar LaurentScalar::x_power(std::int64_t k) {
  if (k >= 0) return LaurentScalar(RationalFunction{QPoly::monomial(Rational(1), static_cast<int>(k)), QPoly{Rational(1)}});
  return LaurentScalar(RationalFunction{QPoly{Rational(1)}, QPoly::monomial(Rational(1), static_cast<int>(-k))});
}

LaurentScalar LaurentScalar::fraction(QPoly num, QPoly den) {
  return LaurentScalar(make_rf(std::move(num), std::move(den)));
}

LaurentScalar LaurentScalar::laurent_terms(const std::map<std::int64_t, Rational>& terms) {
  std::map<std::int64_t, Rational> t;
  for (const auto& [k, c] : terms)
    if (sgn(c) != 0) t.emplace(k, c);
  if (t.empty()) return LaurentScalar();
  const std::int64_t low = t.begin()->first;
  const std::int64_t shift = low < 0 ? -low : 0;
  std::vector<Rational> num(static_cast<std::size_t>(t.rbegin()->first + shift) + 1, Rational(0));
  for (const auto& [k, c] : t) num[static_cast<std::size_t>(k + shift)] = c;
  return fraction(QPoly(std::move(num)), QPoly::monomial(Rational(1), static_cast<int>(shift)));
}

LaurentScalar LaurentScalar::series(std::map<std::int64_t, Rational> coeffs, std::int64_t floor) {
  TruncatedSeries ts;
  ts.floor = floor;
  for (auto& [k, c] : coeffs)
    if (k >= floor && sgn(c) != 0) ts.coeffs.emplace(k, std::move(c));
  return LaurentScalar(std::move(ts));
}

bool LaurentScalar::exact_zero() const {
  return exact() && as_fraction().num.zero();
}

bool LaurentScalar::known_empty() const {
  return !exact() && as_series().coeffs.empty();
}

Rational LaurentScalar::coefficient(std::int64_t k) const {
  if (exact()) {
    if (exact_zero()) return Rational(0);
    auto ts = expand(*this, k);
    auto it = ts.coeffs.find(k);
    return it == ts.coeffs.end() ? Rational(0) : it->second;
  }
  auto it = as_series().coeffs.find(k);
  return it == as_series().coeffs.end() ? Rational(0) : it->second;
}

// ---------------------------------------------------------------------------
// sigma and floors
// ---------------------------------------------------------------------------

std::optional<std::int64_t> sigma(const LaurentScalar& a) {
  if (a.exact()) {
    if (a.exact_zero()) return std::nullopt;
    const auto& rf = a.as_fraction();
    return rf.num.degree() - rf.den.degree();
  }
  const auto& ts = a.as_series();
  if (ts.coeffs.empty())
    fail(ErrorKind::ValBelowFloor,
         "degree of a series that is zero down to floor " + std::to_string(ts.floor));
  return ts.coeffs.rbegin()->first;
}

std::optional<std::int64_t> floor_of(const LaurentScalar& a) {
  if (a.exact()) return std::nullopt;
  return a.as_series().floor;
}

// For floor bookkeeping: the best available upper bound on sigma. Empty
// series bound by their floor (true sigma is strictly below it).
static std::int64_t sigma_bound(const LaurentScalar& a) {
  if (a.known_empty()) return a.as_series().floor;
  return *sigma(a);
}

// ---------------------------------------------------------------------------
// Expansion
// ---------------------------------------------------------------------------

TruncatedSeries expand(const LaurentScalar& a, std::int64_t target_floor) {
  if (!a.exact()) {
    const auto& ts = a.as_series();
    if (target_floor < ts.floor)
      fail(ErrorKind::FloorTooShallow,
           "cannot expand a series with floor " + std::to_string(ts.floor) +
               " down to " + std::to_string(target_floor));
    TruncatedSeries out;
    out.floor = target_floor;
    for (const auto& [k, c] : ts.coeffs)
      if (k >= target_floor) out.coeffs.emplace(k, c);
    return out;
  }
  TruncatedSeries out;
  out.floor = target_floor;
  if (a.exact_zero()) return out;

  const auto& rf = a.as_fraction();
  const int dn = rf.num.degree();
  const int dd = rf.den.degree();
  const std::int64_t top = dn - dd;
  if (top < target_floor) return out;
  const std::int64_t count = top - target_floor + 1;

  // Descending expansion as an ascending power-series division in y = 1/x of
  // the coefficient-reversed polynomials.
  auto p_at = [&](std::int64_t j) { return j <= dn ? rf.num.coeff(static_cast<int>(dn - j)) : Rational(0); };
  auto q_at = [&](std::int64_t j) { return j <= dd ? rf.den.coeff(static_cast<int>(dd - j)) : Rational(0); };
  const Rational q0 = q_at(0);
  std::vector<Rational> c(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j) {
    Rational acc = p_at(j);
    for (std::int64_t i = 0; i < j; ++i) acc -= c[static_cast<std::size_t>(i)] * q_at(j - i);
    c[static_cast<std::size_t>(j)] = acc / q0;
    if (sgn(c[static_cast<std::size_t>(j)]) != 0) out.coeffs.emplace(top - j, c[static_cast<std::size_t>(j)]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

LaurentScalar LaurentScalar::operator-() const {
  if (exact()) {
    if (exact_zero()) return *this;
    const auto& rf = as_fraction();
    return LaurentScalar(RationalFunction{-rf.num, rf.den});
  }
  TruncatedSeries ts = as_series();
  for (auto& [k, c] : ts.coeffs) c = -c;
  return LaurentScalar(std::move(ts));
}

LaurentScalar LaurentScalar::operator+(const LaurentScalar& o) const {
  if (exact() && o.exact()) {
    const auto& a = as_fraction();
    const auto& b = o.as_fraction();
    return fraction(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  if (exact_zero()) return o;
  if (o.exact_zero()) return *this;

  std::int64_t fl = INT64_MIN;
  if (!exact()) fl = std::max(fl, as_series().floor);
  if (!o.exact()) fl = std::max(fl, o.as_series().floor);

  TruncatedSeries lhs = expand(*this, fl);
  TruncatedSeries rhs = expand(o, fl);
  for (const auto& [k, c] : rhs.coeffs) {
    auto [it, inserted] = lhs.coeffs.emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (sgn(it->second) == 0) lhs.coeffs.erase(it);
    }
  }
  return LaurentScalar(std::move(lhs));
}

LaurentScalar LaurentScalar::operator-(const LaurentScalar& o) const { return *this + (-o); }

LaurentScalar LaurentScalar::operator*(const LaurentScalar& o) const {
  if (exact() && o.exact()) {
    const auto& a = as_fraction();
    const auto& b = o.as_fraction();
    return fraction(a.num * b.num, a.den * b.den);
  }
  // A true zero annihilates even unknown tails.
  if (exact_zero() || o.exact_zero()) return LaurentScalar();

  // Truncation algebra: unknown terms of one factor times any term of the
  // other stay below max(floor_a + sigma(b), floor_b + sigma(a)).
  std::int64_t fl = INT64_MIN;
  if (!exact()) fl = std::max(fl, as_series().floor + sigma_bound(o));
  if (!o.exact()) fl = std::max(fl, o.as_series().floor + sigma_bound(*this));

  TruncatedSeries out;
  out.floor = fl;
  if (known_empty() || o.known_empty()) return LaurentScalar(std::move(out));

  const std::int64_t top_a = *sigma(*this);
  const std::int64_t top_b = *sigma(o);
  TruncatedSeries lhs = expand(*this, fl - top_b);
  TruncatedSeries rhs = expand(o, fl - top_a);
  for (const auto& [i, ci] : lhs.coeffs) {
    for (const auto& [j, cj] : rhs.coeffs) {
      const std::int64_t k = i + j;
      if (k < fl) continue;
      auto [it, inserted] = out.coeffs.emplace(k, ci * cj);
      if (!inserted) it->second += ci * cj;
    }
  }
  std::erase_if(out.coeffs, [](const auto& kv) { return sgn(kv.second) == 0; });
  return LaurentScalar(std::move(out));
}

// ---------------------------------------------------------------------------
// Inversion
// ---------------------------------------------------------------------------

LaurentScalar invert_exact(const LaurentScalar& a) {
  if (!a.exact()) fail(ErrorKind::InvalidArgument, "invert_exact requires an exact element");
  if (a.exact_zero()) fail(ErrorKind::DivisionByZero, "inverse of zero");
  const auto& rf = a.as_fraction();
  return LaurentScalar::fraction(rf.den, rf.num);
}

LaurentScalar invert(const LaurentScalar& a, std::int64_t target_floor) {
  if (a.exact()) return invert_exact(a);
  const auto& ts = a.as_series();
  if (ts.coeffs.empty())
    fail(ErrorKind::FloorTooShallow, "cannot invert a series with no retained coefficients");
  const std::int64_t top = ts.coeffs.rbegin()->first;
  const std::int64_t reach = ts.floor - 2 * top;
  if (target_floor < reach)
    fail(ErrorKind::FloorTooShallow,
         "inverting a series of degree " + std::to_string(top) + " with floor " +
             std::to_string(ts.floor) + " is sound only down to " + std::to_string(reach));
  // The retained part is an exact Laurent polynomial; its exact inverse agrees
  // with the true inverse down to `reach`.
  LaurentScalar known = LaurentScalar::laurent_terms(ts.coeffs);
  return LaurentScalar(expand(invert_exact(known), target_floor));
}

LaurentScalar div_exact(const LaurentScalar& a, const LaurentScalar& b) {
  if (!a.exact() || !b.exact()) fail(ErrorKind::InvalidArgument, "div_exact requires exact elements");
  return a * invert_exact(b);
}

bool agrees_to(const LaurentScalar& a, const LaurentScalar& b, std::int64_t floor) {
  return expand(a, floor).coeffs == expand(b, floor).coeffs;
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

static void append_term(std::string& out, const Rational& c, std::int64_t power, const std::string& var) {
  const bool first = out.empty();
  const Rational ac = abs(c);
  std::string term;
  if (ac != 1 || power == 0) term += rat_str(ac);
  if (power != 0) {
    if (!term.empty()) term += "*";
    term += var;
    if (power != 1) term += "^" + std::to_string(power);
  }
  if (first)
    out = (sgn(c) < 0 ? "-" : "") + term;
  else
    out += (sgn(c) < 0 ? " - " : " + ") + term;
}

std::string to_string(const QPoly& p, const std::string& var) {
  if (p.zero()) return "0";
  std::string out;
  for (int i = p.degree(); i >= 0; --i) {
    const Rational c = p.coeff(i);
    if (sgn(c) == 0) continue;
    append_term(out, c, i, var);
  }
  return out;
}

std::string to_string(const LaurentScalar& a) {
  if (a.exact()) {
    const auto& rf = a.as_fraction();
    return "(" + to_string(rf.num) + ")/(" + to_string(rf.den) + ")";
  }
  const auto& ts = a.as_series();
  std::string out;
  for (auto it = ts.coeffs.rbegin(); it != ts.coeffs.rend(); ++it) append_term(out, it->second, it->first, "x");
  if (out.empty()) out = "0";
  out += " ; floor=" + std::to_string(ts.floor);
  return out;
}

}  // namespace qhom
