#include "qhom/rational.hpp"

#include <cctype>

#include "qhom/error.hpp"

namespace qhom {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::FloorTooShallow: return "FloorTooShallow";
    case ErrorKind::ValBelowFloor: return "ValBelowFloor";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::PresetMismatch: return "PresetMismatch";
    case ErrorKind::TruncationUnsound: return "TruncationUnsound";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorKind::ZeroInComponent: return "ZeroInComponent";
    case ErrorKind::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorKind::PairingVanishes: return "PairingVanishes";
    case ErrorKind::SlopeNotStabilized: return "SlopeNotStabilized";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

Rational rat(long num, long den) {
  if (den == 0) fail(ErrorKind::DivisionByZero, "rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

static bool valid_rational_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') ++i;
  if (i == s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == s.size()) return true;
  if (s[i] != '/') return false;
  ++i;
  if (i == s.size()) return false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  return i == s.size();
}

std::optional<Rational> rat_try_parse(const std::string& text) {
  if (!valid_rational_text(text)) return std::nullopt;
  Rational r;
  if (r.set_str(text, 10) != 0) return std::nullopt;
  if (r.get_den() == 0) return std::nullopt;
  r.canonicalize();
  return r;
}

Rational rat_parse(const std::string& text) {
  auto r = rat_try_parse(text);
  if (!r) fail(ErrorKind::ParseError, "expected exact rational \"p\" or \"p/q\", got \"" + text + "\"");
  return *r;
}

std::string rat_str(const Rational& r) { return r.get_str(); }

bool rat_is_integer(const Rational& r) { return r.get_den() == 1; }

std::int64_t rat_floor_i64(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  if (!q.fits_slong_p()) fail(ErrorKind::InvalidArgument, "rational floor out of int64 range");
  return static_cast<std::int64_t>(q.get_si());
}

std::int64_t rat_ceil_i64(const Rational& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  if (!q.fits_slong_p()) fail(ErrorKind::InvalidArgument, "rational ceiling out of int64 range");
  return static_cast<std::int64_t>(q.get_si());
}

}  // namespace qhom
