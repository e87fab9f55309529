#pragma once

// Shared test utilities: exact-rational construction and deterministic
// randomness. Random values come from the raw mt19937_64 stream (reduced by
// modulo), never from <random> distributions, so every platform sees the
// same cases.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "qhom/lattice.hpp"
#include "qhom/laurent.hpp"
#include "qhom/quantum.hpp"

namespace qtest {

inline qhom::Rational frac(long num, long den) {
  qhom::Rational r(num);
  r /= qhom::Rational(den);
  return r;
}

inline int bounded(std::mt19937_64& rng, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

inline qhom::Rational random_nonzero_rational(std::mt19937_64& rng, int mag, int den_max) {
  int n = 0;
  while (n == 0) n = bounded(rng, -mag, mag);
  qhom::Rational r(n);
  r /= qhom::Rational(bounded(rng, 1, den_max));
  return r;
}

inline qhom::Rational random_rational(std::mt19937_64& rng, int mag, int den_max) {
  qhom::Rational r(bounded(rng, -mag, mag));
  r /= qhom::Rational(bounded(rng, 1, den_max));
  return r;
}

/// Finite Laurent polynomial with 1..max_terms nonzero coefficients in the
/// exponent window [exp_lo, exp_hi]. Always nonzero.
inline qhom::LaurentScalar random_exact_scalar(std::mt19937_64& rng, int max_terms, int exp_lo,
                                               int exp_hi) {
  const int n = bounded(rng, 1, max_terms);
  std::map<std::int64_t, qhom::Rational> t;
  for (int i = 0; i < n; ++i) {
    t[bounded(rng, exp_lo, exp_hi)] = random_nonzero_rational(rng, 9, 4);
  }
  return qhom::LaurentScalar::laurent_terms(t);
}

/// Random rational function num/den with deg <= max_deg on both sides,
/// den nonzero; num may vanish, so the result may be the exact zero.
inline qhom::LaurentScalar random_fraction(std::mt19937_64& rng, int max_deg) {
  const auto poly = [&](bool force_nonzero) {
    std::vector<qhom::Rational> c(static_cast<std::size_t>(bounded(rng, 0, max_deg)) + 1);
    for (auto& v : c) v = random_rational(rng, 6, 4);
    if (force_nonzero && qhom::QPoly(c).zero()) c.back() = qhom::Rational(1);
    return qhom::QPoly(c);
  };
  return qhom::LaurentScalar::fraction(poly(false), poly(true));
}

inline qhom::LaurentScalar random_nonzero_fraction(std::mt19937_64& rng, int max_deg) {
  for (;;) {
    qhom::LaurentScalar a = random_fraction(rng, max_deg);
    if (!a.exact_zero()) return a;
  }
}

inline qhom::QuantumClass random_class(std::mt19937_64& rng, int max_terms, int exp_range) {
  qhom::QuantumClass out;
  const int n = bounded(rng, 1, max_terms);
  for (int i = 0; i < n; ++i) {
    const qhom::BasisId cls = static_cast<qhom::BasisId>(bounded(rng, 0, 3));
    const qhom::LatticeVector v{qhom::Rational(bounded(rng, -exp_range, exp_range)),
                                qhom::Rational(bounded(rng, -exp_range, exp_range))};
    out.add_term(cls, v, random_nonzero_rational(rng, 9, 3));
  }
  return out;
}

inline qhom::LatticeVector random_vector(std::mt19937_64& rng, int mag, int den_max) {
  return {random_rational(rng, mag, den_max), random_rational(rng, mag, den_max)};
}

// ---------------------------------------------------------------------------
// Process spawning (CLI tests)
// ---------------------------------------------------------------------------

struct SpawnResult {
  int exit_code = -1;
  std::string out;
};

/// Runs `cmd` through the shell, capturing stdout. Callers append their own
/// stderr redirection when they need it quiet or captured.
inline SpawnResult spawn(const std::string& cmd) {
  SpawnResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) {
    r.out.append(buf, got);
  }
  const int status = ::pclose(pipe);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (const char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  q += "'";
  return q;
}

}  // namespace qtest
