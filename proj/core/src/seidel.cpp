#include "qhom/seidel.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <string>

#include "qhom/error.hpp"
#include "qhom/subalgebra.hpp"

namespace qhom {

SeidelElement seidel_inverse(const ManifoldPreset& p, const Rational& energy_floor) {
  if (p.kind() == PresetKind::SphereProduct) {
    const Rational lam = p.parameter();
    // Top-term exponent alpha*A + beta*B with 2*c1 = 1 and the prescribed
    // energy: alpha + beta = 1/4 and alpha + lam*beta = 1/2 + 1/(6 lam).
    const Rational beta = (Rational(1, 4) + Rational(1) / (6 * lam)) / (lam - 1);
    const Rational alpha = Rational(1, 4) - beta;
    // In (e1, e2) coordinates A = (0,1), B = (1,1): the exponent is
    // (beta, 1/4), and each tail step subtracts e1 = A - B.
    const LatticeVector w{beta, Rational(1, 4)};
    const Rational top = p.omega_of(w);
    QuantumClass base;
    for (std::int64_t j = 0;; ++j) {
      const Rational energy = top - Rational(j) * p.omega_e1();
      if (energy < energy_floor) break;
      const LatticeVector e{w.a1 - Rational(j), w.a2};
      base.add_term(BasisId::H1, e, Rational(1));
      base.add_term(BasisId::H2, e, Rational(-1));
    }
    base.impose_floor(p, energy_floor);
    return {p, base, SphereLoopData{alpha, beta}};
  }
  const Rational mu = p.parameter();
  const Rational delta = (1 - mu) * (1 - mu) / (12 * (1 + mu) * (1 - 3 * mu));
  // Exponent E/2 + 3F/4 - delta*(F - 2E) = (1/2 + 2 delta) E + (3/4 - delta) F;
  // with E = (0,1) and F = (f1, 2) this is ((3/4 - delta) f1, 2).
  const Rational f1 = Rational(p.kappa() < 0 ? 1 : -1);
  const LatticeVector w{(Rational(3, 4) - delta) * f1, Rational(2)};
  const QuantumClass base = QuantumClass::term(BasisId::P, w, Rational(1));
  return {p, base, BlowUpLoopData{delta, w}};
}

Rational default_power_floor(const ManifoldPreset& p, int k_max) {
  if (p.kind() != PresetKind::SphereProduct) return Rational(0);
  const Rational lam = p.parameter();
  const Rational top = Rational(1, 2) + Rational(1) / (6 * lam);
  const Rational unit_scale = std::min(Rational(p.omega_e1()), Rational(1));
  const Rational depth = Rational(k_max) / 2 + 8 + 40 * unit_scale;
  return top - depth;
}

QuantumClass seidel_power(const Algebra& alg, const SeidelElement& s, int k) {
  const ManifoldPreset& p = alg.preset();
  if (!(s.preset == p)) fail(ErrorKind::PresetMismatch, "loop element from a different preset");
  if (k == 0) fail(ErrorKind::InvalidArgument, "power must be nonzero");
  // Memoized: a pure function of (preset, base, k), and spectral-number
  // callers ask for the same handful of powers thousands of times. The
  // rendered base is a faithful deterministic key (ordered terms, exact
  // rationals, energy floor included).
  static std::mutex cache_mutex;
  static std::map<std::string, QuantumClass> cache;
  const std::string key = (p.kind() == PresetKind::SphereProduct ? "s:" : "b:") +
                          rat_str(p.parameter()) + "#" + to_string(p, s.base) + "^" +
                          std::to_string(k);
  {
    const std::lock_guard<std::mutex> lock(cache_mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  QuantumClass base = s.base;
  if (k < 0) {
    std::optional<Rational> inv_floor;
    if (base.energy_floor()) {
      // Mirror the information depth: the inverse's top sits at -val.
      const Rational v = val_finite(p, base);
      inv_floor = *base.energy_floor() - 2 * v;
    }
    base = invert_unit(alg, base, inv_floor);
  }
  unsigned long n = static_cast<unsigned long>(std::abs(static_cast<long>(k)));
  QuantumClass acc = base;
  --n;
  QuantumClass sq = std::move(base);
  while (n > 0) {
    if (n & 1UL) acc = quantum_product(alg, acc, sq);
    n >>= 1UL;
    if (n > 0) sq = quantum_product(alg, sq, sq);
  }
  const std::lock_guard<std::mutex> lock(cache_mutex);
  cache.emplace(key, acc);
  return acc;
}

Rational spectral_number(const ManifoldPreset& p, const QuantumClass& a, const SeidelElement& s,
                         int k) {
  if (k == 0) return val_finite(p, a);
  const Algebra alg(p);
  const QuantumClass pw = seidel_power(alg, s, k);
  const QuantumClass prod = quantum_product(alg, a, pw);
  const std::optional<Rational> v = val(p, prod);
  if (!v) fail(ErrorKind::InvalidArgument, "spectral number of an exactly zero product");
  return *v;
}

ValSequence val_sequence(const ManifoldPreset& p, const SeidelElement& s,
                         const QuantumClass& unit, int k_max, int window) {
  if (k_max < window + 2) {
    fail(ErrorKind::InvalidArgument, "k_max must be at least window + 2");
  }
  if (!(s.preset == p)) fail(ErrorKind::PresetMismatch, "loop element from a different preset");
  const Algebra alg(p);
  ValSequence out;
  out.window = window;
  out.entries.reserve(static_cast<std::size_t>(k_max));
  QuantumClass pw = s.base;
  for (int k = 1; k <= k_max; ++k) {
    if (k > 1) pw = quantum_product(alg, pw, s.base);
    const QuantumClass prod = quantum_product(alg, unit, pw);
    const std::optional<Rational> v = val(p, prod);
    if (!v) fail(ErrorKind::InvalidArgument, "unit component annihilates the loop power");
    out.entries.push_back({k, *v});
  }
  auto entry = [&](int k) -> const Rational& {
    return out.entries[static_cast<std::size_t>(k - 1)].second;
  };
  for (int period = 1; period <= 12; ++period) {
    if (k_max - window - period + 1 < 1) break;
    bool constant = true;
    Rational diff;
    for (int k = k_max - window + 1; k <= k_max; ++k) {
      Rational d = entry(k) - entry(k - period);
      if (k == k_max - window + 1) {
        diff = d;
      } else if (!(d == diff)) {
        constant = false;
        break;
      }
    }
    if (constant) {
      out.detected_period = period;
      out.stabilized_slope = diff / period;
      break;
    }
  }
  return out;
}

namespace {

std::string slope_sign(const std::optional<Rational>& s) {
  if (!s) return "UNSTABILIZED";
  const int sg = sgn(*s);
  if (sg < 0) return "NEGATIVE";
  return sg > 0 ? "POSITIVE" : "ZERO";
}

FormulaComparison compare(std::string source, const Rational& expected,
                          const std::optional<Rational>& computed) {
  FormulaComparison out;
  out.source = std::move(source);
  out.expected = expected;
  out.computed = computed;
  if (computed) {
    out.verdict = (*computed == expected) ? FormulaMatch::Match : FormulaMatch::Mismatch;
  }
  return out;
}

}  // namespace

QuasimorphismReport quasimorphism_restriction(const ManifoldPreset& p, int k_max, int window,
                                              const std::optional<Rational>& energy_floor) {
  QuasimorphismReport rep{p};
  rep.k_max = k_max;
  rep.window = window;
  const bool sphere = p.kind() == PresetKind::SphereProduct;
  const bool split = !sphere && p.kappa() < 0;
  if (sphere) {
    const Rational lam = p.parameter();
    rep.volume_omega_n = 2 * lam;
    rep.volume_omega_n_factorial = lam;
  } else {
    const Rational mu = p.parameter();
    rep.volume_omega_n = 1 - mu * mu;
    rep.volume_omega_n_factorial = (1 - mu * mu) / 2;
  }
  if (k_max < window + 2) {
    // The window can never fill; report the non-stabilization instead of
    // throwing, so callers get the configuration echo as partial data.
    rep.sign = "UNSTABILIZED";
    return rep;
  }

  std::vector<ValSequence> seqs;
  const Rational base_floor = energy_floor ? *energy_floor : default_power_floor(p, k_max);
  const Rational top = sphere ? Rational(1, 2) + Rational(1) / (6 * p.parameter()) : Rational(0);
  Rational depth = top - base_floor;
  // A floor at or above the loop's top term carries no information; start
  // shallow and let the deepen-and-retry policy take over.
  if (sgn(depth) <= 0) depth = Rational(1);
  std::int64_t idem_floor = -40;
  for (int attempt = 0;; ++attempt) {
    try {
      const std::vector<QuantumClass> units =
          split ? unit_idempotents(p, idem_floor)
                : std::vector<QuantumClass>{QuantumClass::unit()};
      const SeidelElement s = seidel_inverse(p, top - depth);
      seqs.clear();
      for (const QuantumClass& u : units) seqs.push_back(val_sequence(p, s, u, k_max, window));
      break;
    } catch (const Error& err) {
      const bool truncation =
          err.kind() == ErrorKind::ValBelowFloor || err.kind() == ErrorKind::FloorTooShallow;
      if (!truncation || attempt >= 6) throw;
      depth = depth * 2;
      idem_floor *= 2;
    }
  }

  for (std::size_t i = 0; i < seqs.size(); ++i) {
    ComponentReport c;
    c.component = i;
    c.seq = seqs[i];
    c.sign = slope_sign(seqs[i].stabilized_slope);
    if (sphere) {
      const Rational lam = p.parameter();
      c.comparisons.push_back(compare("power-valuation-lemma", Rational(1) / (6 * lam),
                                      seqs[i].stabilized_slope));
    } else {
      const Rational mu = p.parameter();
      const Rational delta = (1 - mu) * (1 - mu) / (12 * (1 + mu) * (1 - 3 * mu));
      const LatticeVector f2e = p.named_exponent("F") - p.named_exponent("E").scaled(Rational(2));
      const Rational w_f2e = p.omega_of(f2e);
      if (p.kappa() > 0) {
        c.comparisons.push_back(
            compare("stated-limit", -delta * w_f2e, seqs[i].stabilized_slope));
      } else {
        c.comparisons.push_back(compare("stated-limit", (1 - delta / 12) * w_f2e,
                                        seqs[i].stabilized_slope));
        c.comparisons.push_back(compare("proof-rate", w_f2e / 12, seqs[i].stabilized_slope));
      }
    }
    rep.components.push_back(std::move(c));
  }

  rep.stabilized = !seqs.empty();
  for (const ValSequence& s : seqs) {
    if (!s.stabilized_slope) rep.stabilized = false;
  }
  const std::optional<Rational> primary =
      seqs.empty() ? std::nullopt : seqs[0].stabilized_slope;
  if (!primary) {
    rep.sign = "UNSTABILIZED";
    return rep;
  }
  rep.sign = is_zero(*primary) ? "ZERO" : "NONZERO";
  rep.r_tilde.push_back({"omega_n", -rep.volume_omega_n * *primary});
  rep.r_tilde.push_back({"omega_n_factorial", -rep.volume_omega_n_factorial * *primary});
  if (sphere && !is_zero(*primary)) {
    const Rational lam = p.parameter();
    const Rational published = -(1 + lam) / (6 * lam);
    rep.paper_matching_volume = -published / *primary;
    rep.r_tilde.push_back({"paper-matching", published});
  }
  return rep;
}

Rational duality_defect(const ManifoldPreset& p, const SeidelElement& s, const QuantumClass& gamma,
                        const QuantumClass& delta, int k) {
  const Rational pairing = pairing_pi(p, delta, gamma);
  if (is_zero(pairing)) {
    fail(ErrorKind::PairingVanishes, "intersection pairing of the pair vanishes");
  }
  if (k == 0) return val_finite(p, gamma) + val_finite(p, delta);
  return spectral_number(p, gamma, s, k) + spectral_number(p, delta, s, -k);
}

}  // namespace qhom
