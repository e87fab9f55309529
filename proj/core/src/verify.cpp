#include "qhom/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "qhom/error.hpp"
#include "qhom/seidel.hpp"
#include "qhom/subalgebra.hpp"

namespace qhom {

namespace {

// ---------------------------------------------------------------------------
// Bookkeeping
// ---------------------------------------------------------------------------

class Checker {
 public:
  Checker(int id, std::string name) {
    res_.id = id;
    res_.name = std::move(name);
    res_.passed = true;
  }

  void require(bool ok, const std::string& what) {
    if (ok) return;
    res_.passed = false;
    ++failures_;
    if (failures_ <= kMaxFailureNotes) res_.notes.push_back("violated: " + what);
    if (failures_ == kMaxFailureNotes + 1) res_.notes.push_back("... further violations elided");
  }

  bool failing() const { return !res_.passed; }
  void note(const std::string& s) { res_.notes.push_back(s); }
  CriterionResult take() { return std::move(res_); }

 private:
  static constexpr int kMaxFailureNotes = 6;
  CriterionResult res_;
  int failures_ = 0;
};

CriterionResult guarded(int id, const std::string& name,
                        const std::function<void(Checker&)>& body) {
  Checker c(id, name);
  try {
    body(c);
  } catch (const Error& e) {
    c.require(false, std::string("error: ") + e.what());
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  return c.take();
}

std::string rs(const Rational& r) { return rat_str(r); }

Rational frac(long num, long den) {
  Rational r(num);
  r /= Rational(den);
  return r;
}

// ---------------------------------------------------------------------------
// Deterministic randomness (engine-only, so the stream is identical on every
// platform; distributions from <random> are not pinned by the standard)
// ---------------------------------------------------------------------------

int bounded(std::mt19937_64& rng, int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

Rational random_nonzero_rational(std::mt19937_64& rng, int mag, int den_max) {
  int n = 0;
  while (n == 0) n = bounded(rng, -mag, mag);
  Rational r(n);
  r /= Rational(bounded(rng, 1, den_max));
  return r;
}

LaurentScalar random_exact_scalar(std::mt19937_64& rng, int max_terms, int exp_lo, int exp_hi) {
  const int n = bounded(rng, 1, max_terms);
  std::map<std::int64_t, Rational> t;
  for (int i = 0; i < n; ++i) {
    t[bounded(rng, exp_lo, exp_hi)] = random_nonzero_rational(rng, 9, 4);
  }
  return LaurentScalar::laurent_terms(t);
}

QuantumClass random_class(std::mt19937_64& rng, int max_terms, int exp_range) {
  QuantumClass out;
  const int n = bounded(rng, 1, max_terms);
  for (int i = 0; i < n; ++i) {
    const BasisId cls = static_cast<BasisId>(bounded(rng, 0, 3));
    const LatticeVector v{Rational(bounded(rng, -exp_range, exp_range)),
                          Rational(bounded(rng, -exp_range, exp_range))};
    out.add_term(cls, v, random_nonzero_rational(rng, 9, 3));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

std::optional<TablePerturbation> sphere_perturbation(bool control) {
  if (!control) return std::nullopt;
  // Doubles the single table term of the section self-product.
  return TablePerturbation{BasisId::H1, BasisId::H1, 0, Rational(2)};
}

Algebra sphere_algebra(const Rational& lambda, bool control) {
  return Algebra(ManifoldPreset::sphere_product(lambda), sphere_perturbation(control));
}

QuantumClass basis_class(BasisId b) { return QuantumClass::term(b, {}, Rational(1)); }

/// The coefficient is certified zero at every exponent >= floor.
bool vanishes_to(const LaurentScalar& e, std::int64_t floor) {
  if (e.exact_zero()) return true;
  if (!e.exact()) {
    const auto& ts = e.as_series();
    if (ts.floor > floor) return false;
    return ts.coeffs.empty() || ts.coeffs.rbegin()->first < floor;
  }
  return *sigma(e) < floor;
}

const std::vector<Rational>& sphere_lambdas() {
  static const std::vector<Rational> v = {frac(3, 2), Rational(2), Rational(5)};
  return v;
}

BatteryReport run_battery_impl(bool control, bool include_control_criterion);

// ---------------------------------------------------------------------------
// Criterion 1: the two multiplication tables, term by frozen term
// ---------------------------------------------------------------------------

CriterionResult criterion_tables(bool control) {
  return guarded(1, "table-fidelity", [&](Checker& c) {
    using B_ = BasisId;
    for (const Rational& lam : sphere_lambdas()) {
      const ManifoldPreset p = ManifoldPreset::sphere_product(lam);
      const Algebra alg = sphere_algebra(lam, control);
      try {
        alg.validate();
      } catch (const Error& e) {
        c.require(false, "sphere table audit at lambda=" + rs(lam) + ": " + e.what());
      }
      const LatticeVector A = p.named_exponent("A");
      const LatticeVector B = p.named_exponent("B");
      c.require(A == LatticeVector{Rational(0), Rational(1)} &&
                    B == LatticeVector{Rational(1), Rational(1)},
                "rebased section/fiber exponents at lambda=" + rs(lam));
      c.require(p.omega_e1() == lam - 1 && p.omega_e2() == Rational(1) &&
                    p.minimal_chern() == 2,
                "areas and minimal Chern number at lambda=" + rs(lam));
      const auto expect = [&](B_ x, B_ y, const QuantumClass& want, const char* label) {
        c.require(quantum_product(alg, basis_class(x), basis_class(y)) == want,
                  std::string(label) + " at lambda=" + rs(lam));
      };
      expect(B_::H1, B_::H2, QuantumClass::term(B_::P, {}, 1), "A*B = P");
      expect(B_::H1, B_::H1, QuantumClass::term(B_::M, -B, 1), "A*A = M (x) q^{-B}");
      expect(B_::H2, B_::H2, QuantumClass::term(B_::M, -A, 1), "B*B = M (x) q^{-A}");
      expect(B_::P, B_::H1, QuantumClass::term(B_::H2, -B, 1), "P*A = B (x) q^{-B}");
      expect(B_::P, B_::H2, QuantumClass::term(B_::H1, -A, 1), "P*B = A (x) q^{-A}");
      expect(B_::P, B_::P, QuantumClass::term(B_::M, -A - B, 1), "P*P = M (x) q^{-A-B}");
      for (B_ x : {B_::M, B_::H1, B_::H2, B_::P}) {
        expect(B_::M, x, basis_class(x), "unit row");
      }
    }
    for (const Rational& mu : {frac(1, 4), frac(1, 2), frac(2, 3)}) {
      const ManifoldPreset p = ManifoldPreset::blow_up(mu);
      const Algebra alg(p);  // the control corruption targets the sphere table only
      try {
        alg.validate();
      } catch (const Error& e) {
        c.require(false, "blow-up table audit at mu=" + rs(mu) + ": " + e.what());
      }
      const int kappa = mu > frac(1, 3) ? 1 : -1;
      c.require(p.kappa() == kappa, "kappa sign at mu=" + rs(mu));
      const LatticeVector E = p.named_exponent("E");
      const LatticeVector F = p.named_exponent("F");
      const Rational f1 = kappa < 0 ? 1 : -1;
      c.require(E == LatticeVector{Rational(0), Rational(1)} &&
                    F == LatticeVector{f1, Rational(2)},
                "exceptional/line exponents at mu=" + rs(mu));
      const Rational want_w1 =
          kappa > 0 ? Rational(Rational(3) * mu - 1) : Rational(Rational(1) - Rational(3) * mu);
      c.require(p.omega_e1() == want_w1 && p.omega_e2() == mu && p.minimal_chern() == 1,
                "areas and minimal Chern number at mu=" + rs(mu));
      const auto expect = [&](B_ x, B_ y, const QuantumClass& want, const char* label) {
        c.require(quantum_product(alg, basis_class(x), basis_class(y)) == want,
                  std::string(label) + " at mu=" + rs(mu));
      };
      QuantumClass pp = QuantumClass::term(B_::H1, -E - F, 1);
      pp.add_term(B_::H2, -E - F, 1);
      expect(B_::P, B_::P, pp, "P*P = (E+F) (x) q^{-E-F}");
      expect(B_::P, B_::H1, QuantumClass::term(B_::H2, -F, 1), "P*E = F (x) q^{-F}");
      expect(B_::P, B_::H2, QuantumClass::term(B_::M, -E - F, 1), "P*F = M (x) q^{-E-F}");
      QuantumClass ee = QuantumClass::term(B_::P, {}, Rational(-1));
      ee.add_term(B_::H1, -E, 1);
      ee.add_term(B_::M, -F, 1);
      expect(B_::H1, B_::H1, ee, "E*E = -P + E (x) q^{-E} + M (x) q^{-F}");
      QuantumClass ef = QuantumClass::term(B_::P, {}, 1);
      ef.add_term(B_::H1, -E, Rational(-1));
      expect(B_::H1, B_::H2, ef, "E*F = P - E (x) q^{-E}");
      expect(B_::H2, B_::H2, QuantumClass::term(B_::H1, -E, 1), "F*F = E (x) q^{-E}");
      for (B_ x : {B_::M, B_::H1, B_::H2, B_::P}) {
        expect(B_::M, x, basis_class(x), "unit row");
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 2: splitting certificates for the middle subalgebra
// ---------------------------------------------------------------------------

CriterionResult criterion_splitting() {
  return guarded(2, "splitting-certificates", [](Checker& c) {
    const std::int64_t floor = -40;
    for (const Rational& lam : sphere_lambdas()) {
      const auto cert = split_fields(ManifoldPreset::sphere_product(lam), floor);
      c.require(cert.verdict == SplitVerdict::Field,
                "sphere middle algebra is a field, lambda=" + rs(lam));
      c.require(cert.factors.size() == 1 &&
                    cert.factors[0].reason == IrreducibilityReason::NewtonSlopeDenominator &&
                    cert.factors[0].newton_denominator == 2,
                "quadratic certified by slope denominator 2, lambda=" + rs(lam));
    }
    for (const Rational& mu : {frac(1, 2), frac(2, 3)}) {
      const auto cert = split_fields(ManifoldPreset::blow_up(mu), floor);
      c.require(cert.verdict == SplitVerdict::Field,
                "blow-up middle algebra is a field, mu=" + rs(mu));
      c.require(cert.factors.size() == 1 &&
                    cert.factors[0].reason == IrreducibilityReason::NewtonSlopeDenominator &&
                    cert.factors[0].newton_denominator == 4,
                "quartic certified by slope denominator 4, mu=" + rs(mu));
    }
    {
      const ManifoldPreset p = ManifoldPreset::blow_up(frac(1, 4));
      const auto cert = split_fields(p, floor);
      c.require(cert.verdict == SplitVerdict::SemisimpleSplit,
                "blow-up middle algebra splits, mu=1/4");
      c.require(cert.factors.size() == 2, "two certified factors, mu=1/4");
      if (cert.factors.size() == 2) {
        c.require(effective_degree(cert.factors[0].poly) == 1 &&
                      cert.factors[0].reason == IrreducibilityReason::Linear,
                  "first factor linear, mu=1/4");
        c.require(effective_degree(cert.factors[1].poly) == 3 &&
                      cert.factors[1].reason == IrreducibilityReason::NewtonSlopeDenominator &&
                      cert.factors[1].newton_denominator == 3,
                  "second factor cubic via slope denominator 3, mu=1/4");
        const StructurePolynomial sp = structure_polynomial(p);
        const PolyL err = sp.poly - cert.factors[0].poly * cert.factors[1].poly;
        bool clean = true;
        for (int i = 0; i <= err.degree(); ++i) {
          if (!vanishes_to(err.coeff(i), floor)) clean = false;
        }
        c.require(clean, "re-multiplied factors agree with the quartic down to x^{-40}");
      }
      c.note("split certificate at floor -40: linear x cubic, mu=1/4");
    }
    for (const Rational& mu : {frac(1, 4), frac(1, 2)}) {
      const StructurePolynomial sp = structure_polynomial(ManifoldPreset::blow_up(mu));
      const PolyL g = poly_gcd(sp.poly, sp.poly.derivative());
      c.require(effective_degree(g) == 0 && g.coeff(0) == LaurentScalar(1),
                "gcd(p, p') == 1 exactly, mu=" + rs(mu));
    }
    {
      const StructurePolynomial sp = structure_polynomial(ManifoldPreset::sphere_product(Rational(2)));
      const PolyL g = poly_gcd(sp.poly, sp.poly.derivative());
      c.require(effective_degree(g) == 0 && g.coeff(0) == LaurentScalar(1),
                "gcd(p, p') == 1 exactly, lambda=2");
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 3: the six relations among the shifted blow-up generators
// ---------------------------------------------------------------------------

CriterionResult criterion_middle_relations() {
  return guarded(3, "middle-relations", [](Checker& c) {
    using B_ = BasisId;
    for (const Rational& mu : {frac(1, 4), frac(1, 2)}) {
      const ManifoldPreset p = ManifoldPreset::blow_up(mu);
      const Algebra alg(p);
      const LatticeVector y1{Rational(0), Rational(1)};
      const LatticeVector y2{Rational(0), Rational(2)};
      const QuantumClass b1 = QuantumClass::term(B_::H1, y1, 1);
      const QuantumClass b2 = QuantumClass::term(B_::H2, y1, 1);
      const QuantumClass b3 = QuantumClass::term(B_::P, y2, 1);
      const QuantumClass xk =
          QuantumClass::term(B_::M, LatticeVector{Rational(p.kappa()), Rational(0)}, 1);
      const auto mul = [&](const QuantumClass& a, const QuantumClass& b) {
        return quantum_product(alg, a, b);
      };
      for (const QuantumClass* gen : {&b1, &b2, &b3}) {
        c.require(degree(p, *gen) == std::optional<int>(4),
                  "shifted generators sit in the unit degree, mu=" + rs(mu));
      }
      c.require(mul(b1, b1) == -b3 + b1 + xk,
                "beta1^2 = -beta3 + beta1 + x^kappa, mu=" + rs(mu));
      c.require(mul(b2, b2) == b1, "beta2^2 = beta1, mu=" + rs(mu));
      c.require(mul(b3, b3) == mul(xk, b1 + b2),
                "beta3^2 = x^kappa (beta1 + beta2), mu=" + rs(mu));
      c.require(mul(b1, b2) == b3 - b1, "beta1 beta2 = beta3 - beta1, mu=" + rs(mu));
      c.require(mul(b2, b3) == xk, "beta2 beta3 = x^kappa, mu=" + rs(mu));
      c.require(mul(b1, b3) == mul(xk, b2), "beta1 beta3 = x^kappa beta2, mu=" + rs(mu));
      c.require(mul(mul(b2, b2), b2) + mul(b2, b2) == b3,
                "beta3 = beta2^3 + beta2^2, mu=" + rs(mu));
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 4: closed-form valuations of loop powers (sphere product)
// ---------------------------------------------------------------------------

CriterionResult criterion_powers(bool control) {
  return guarded(4, "power-valuations", [&](Checker& c) {
    using B_ = BasisId;
    for (const Rational& lam : sphere_lambdas()) {
      const ManifoldPreset p = ManifoldPreset::sphere_product(lam);
      const Algebra alg = sphere_algebra(lam, control);
      // The closed form speaks about the true quantum product, so an algebra
      // that fails its own audit cannot witness it.
      alg.validate();
      const int k_max = 24;
      const SeidelElement s = seidel_inverse(p, default_power_floor(p, k_max));
      c.require(val_finite(p, s.base) == frac(1, 2) + Rational(1) / (6 * lam),
                "val of the inverse loop class at lambda=" + rs(lam));
      QuantumClass pw = s.base;
      for (int k = 2; k <= k_max; ++k) {
        pw = quantum_product(alg, pw, s.base);
        if (k % 2 == 0) {
          const Rational n(k / 2);
          const Rational want = Rational(1) + n / (3 * lam);
          const Rational got = val_finite(p, pw);
          c.require(got == want, "val of loop power -" + std::to_string(k) + " at lambda=" +
                                     rs(lam) + ": got " + rs(got) + ", expected " + rs(want));
        }
      }
      const QuantumClass d =
          QuantumClass::term(B_::H1, {}, 1) + QuantumClass::term(B_::H2, {}, Rational(-1));
      QuantumClass dp = d;
      for (int k = 2; k <= 12; ++k) {
        dp = quantum_product(alg, dp, d);
        if (k % 2 == 0) {
          const Rational want(1 - k / 2);
          const Rational got = val_finite(p, dp);
          c.require(got == want, "val((A-B)^" + std::to_string(k) + ") at lambda=" + rs(lam) +
                                     ": got " + rs(got) + ", expected " + rs(want));
        }
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 5: sphere-product slope and the volume question
// ---------------------------------------------------------------------------

CriterionResult criterion_sphere_slope() {
  return guarded(5, "sphere-slope-and-volume", [](Checker& c) {
    for (const Rational& lam : sphere_lambdas()) {
      const ManifoldPreset p = ManifoldPreset::sphere_product(lam);
      const QuasimorphismReport rep = quasimorphism_restriction(p, 40);
      c.require(rep.stabilized, "valuation sequence stabilizes, lambda=" + rs(lam));
      if (!rep.stabilized) continue;
      const Rational want = Rational(1) / (6 * lam);
      const Rational got = *rep.components[0].seq.stabilized_slope;
      c.require(got == want, "stabilized slope at lambda=" + rs(lam) + ": got " + rs(got) +
                                 ", expected " + rs(want));
      c.require(rep.components[0].comparisons.size() == 1 &&
                    rep.components[0].comparisons[0].verdict == FormulaMatch::Match,
                "closed form confirmed by the computed sequence, lambda=" + rs(lam));
      c.require(rep.volume_omega_n == 2 * lam && rep.volume_omega_n_factorial == lam,
                "normalized volumes, lambda=" + rs(lam));
      const Rational published = -(1 + lam) / (6 * lam);
      c.require(rep.paper_matching_volume.has_value() &&
                    *rep.paper_matching_volume == 1 + lam,
                "effective volume matching the published constant is 1+lambda, lambda=" + rs(lam));
      for (const auto& [convention, value] : rep.r_tilde) {
        if (convention == "paper-matching") continue;
        c.require(!(value == published),
                  "standard volume convention '" + convention +
                      "' must not reproduce the published constant, lambda=" + rs(lam));
      }
      c.note("lambda=" + rs(lam) + ": slope " + rs(got) + ", published constant " +
             rs(published) + " needs effective volume " + rs(1 + lam) +
             " (neither 2*lambda nor lambda)");
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 6: blow-up slopes above the threshold
// ---------------------------------------------------------------------------

CriterionResult criterion_blowup_upper() {
  return guarded(6, "blowup-slope-upper", [](Checker& c) {
    const std::map<std::string, Rational> frozen = {
        {"1/2", frac(-1, 72)}, {"2/3", frac(-1, 180)}, {"5/6", frac(-1, 792)}};
    for (const Rational& mu : {frac(1, 2), frac(2, 3), frac(5, 6)}) {
      const ManifoldPreset p = ManifoldPreset::blow_up(mu);
      const QuasimorphismReport rep = quasimorphism_restriction(p, 40);
      c.require(rep.stabilized, "valuation sequence stabilizes, mu=" + rs(mu));
      if (!rep.stabilized) continue;
      const Rational got = *rep.components[0].seq.stabilized_slope;
      const Rational want = frozen.at(rs(mu));
      c.require(got == want, "stabilized slope at mu=" + rs(mu) + ": got " + rs(got) +
                                 ", expected " + rs(want));
      c.require(sgn(got) < 0 && rep.components[0].sign == "NEGATIVE",
                "slope negative, mu=" + rs(mu));
      const auto& cmp = rep.components[0].comparisons;
      c.require(cmp.size() == 1 && cmp[0].source == "stated-limit" &&
                    cmp[0].verdict == FormulaMatch::Match,
                "published closed form confirmed, mu=" + rs(mu));
      c.note("mu=" + rs(mu) + ": slope " + rs(got));
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 7: blow-up slopes below the threshold, and the arbitration
// between computed rates and the two published closed forms
// ---------------------------------------------------------------------------

CriterionResult criterion_blowup_lower() {
  return guarded(7, "blowup-slope-lower", [](Checker& c) {
    // Frozen computed slopes: component 0 is the line-component (linear
    // factor), component 1 the complementary cubic component.
    const std::map<std::string, std::pair<Rational, Rational>> frozen = {
        {"1/4", {frac(-1, 10), frac(-1, 60)}},
        {"1/5", {frac(-13, 90), frac(-1, 90)}}};
    for (const Rational& mu : {frac(1, 4), frac(1, 5)}) {
      const ManifoldPreset p = ManifoldPreset::blow_up(mu);
      const QuasimorphismReport rep = quasimorphism_restriction(p, 40);
      c.require(rep.stabilized, "every component sequence stabilizes, mu=" + rs(mu));
      c.require(rep.components.size() == 2, "two field components, mu=" + rs(mu));
      if (!rep.stabilized || rep.components.size() != 2) continue;
      const auto& want = frozen.at(rs(mu));
      const Rational got0 = *rep.components[0].seq.stabilized_slope;
      const Rational got1 = *rep.components[1].seq.stabilized_slope;
      c.require(got0 == want.first, "component-0 slope at mu=" + rs(mu) + ": got " + rs(got0) +
                                        ", expected " + rs(want.first));
      c.require(got1 == want.second, "component-1 slope at mu=" + rs(mu) + ": got " + rs(got1) +
                                         ", expected " + rs(want.second));
      c.require(sgn(got0) < 0 && sgn(got1) < 0,
                "both computed slopes are negative, mu=" + rs(mu));
      for (const auto& comp : rep.components) {
        c.require(comp.comparisons.size() == 2, "two published forms compared per component");
        for (const auto& f : comp.comparisons) {
          c.require(f.verdict != FormulaMatch::Undetermined,
                    "arbitration is definite for '" + f.source + "', mu=" + rs(mu));
          c.note("mu=" + rs(mu) + " component " + std::to_string(comp.component) + " '" +
                 f.source + "': expected " + rs(f.expected) + ", computed " +
                 (f.computed ? rs(*f.computed) : std::string("unstabilized")) + " -> " +
                 (f.verdict == FormulaMatch::Match ? "MATCH" : "MISMATCH"));
          c.require(sgn(f.expected) > 0,
                    "published closed forms are positive here, mu=" + rs(mu));
          c.require(f.verdict == FormulaMatch::Mismatch,
                    "computed negative rate contradicts '" + f.source + "', mu=" + rs(mu));
        }
      }
    }
    c.note("the computed sequences, not the published forms, carry the verdict");
  });
}

// ---------------------------------------------------------------------------
// Criterion 8: eventual linearity (up to a periodic residual) of every
// valuation sequence the battery produces
// ---------------------------------------------------------------------------

CriterionResult criterion_linearity() {
  return guarded(8, "valuation-linearity", [](Checker& c) {
    std::vector<ManifoldPreset> presets;
    for (const Rational& lam : sphere_lambdas()) {
      presets.push_back(ManifoldPreset::sphere_product(lam));
    }
    for (const Rational& mu : {frac(1, 4), frac(1, 2), frac(2, 3), frac(5, 6)}) {
      presets.push_back(ManifoldPreset::blow_up(mu));
    }
    for (const ManifoldPreset& p : presets) {
      const std::string tag = (p.kind() == PresetKind::SphereProduct ? "lambda=" : "mu=") +
                              rs(p.parameter());
      const QuasimorphismReport rep = quasimorphism_restriction(p, 40);
      c.require(rep.stabilized, "stabilized at " + tag);
      if (!rep.stabilized) continue;
      for (const auto& comp : rep.components) {
        const auto& seq = comp.seq;
        const Rational slope = *seq.stabilized_slope;
        const int period = seq.detected_period;
        c.require(sgn(slope) != 0, "slope nonzero at " + tag);
        c.require(period >= 1 && period <= 12, "detected stride in range at " + tag);
        // Residual e_k - k*slope must repeat with the detected stride over
        // the whole stabilized tail, not merely have constant differences.
        const int n = static_cast<int>(seq.entries.size());
        const int tail = std::min(n - period, seq.window + 2 * period);
        bool periodic = tail > period;
        for (int i = n - tail; i + period < n; ++i) {
          const Rational r1 =
              seq.entries[static_cast<std::size_t>(i)].second -
              Rational(seq.entries[static_cast<std::size_t>(i)].first) * slope;
          const Rational r2 =
              seq.entries[static_cast<std::size_t>(i + period)].second -
              Rational(seq.entries[static_cast<std::size_t>(i + period)].first) * slope;
          if (!(r1 == r2)) periodic = false;
        }
        c.require(periodic, "residual is stride-periodic over the tail at " + tag +
                                " (component " + std::to_string(comp.component) + ")");
        c.note(tag + " component " + std::to_string(comp.component) + ": slope " + rs(slope) +
               ", stride " + std::to_string(period));
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Criterion 9: randomized property suites
// ---------------------------------------------------------------------------

void suite_field_axioms(Checker& c, int scale) {
  std::mt19937_64 rng(0x5eed0001ULL);
  const int cases = 220 / scale;
  for (int i = 0; i < cases && !c.failing(); ++i) {
    const LaurentScalar a = random_exact_scalar(rng, 3, -5, 5);
    const LaurentScalar b = random_exact_scalar(rng, 3, -5, 5);
    const LaurentScalar d = random_exact_scalar(rng, 3, -5, 5);
    const std::string at = " (field case " + std::to_string(i) + ")";
    c.require((a + b) + d == a + (b + d), "addition associativity" + at);
    c.require(a + b == b + a, "addition commutativity" + at);
    c.require(a * b == b * a, "multiplication commutativity" + at);
    c.require((a * b) * d == a * (b * d), "multiplication associativity" + at);
    c.require(a * (b + d) == a * b + a * d, "distributivity" + at);
    c.require(a + LaurentScalar(0) == a && a * LaurentScalar(1) == a, "identities" + at);
    c.require((a - a).exact_zero(), "additive inverse" + at);
    c.require((a * invert_exact(a) - LaurentScalar(1)).exact_zero(), "exact inversion" + at);
    // Degree map: multiplicative, and ultrametric for sums.
    const std::optional<std::int64_t> sa = sigma(a), sb = sigma(b);
    c.require(sigma(a * b) == std::optional<std::int64_t>(*sa + *sb),
              "degree multiplicativity" + at);
    const LaurentScalar apb = a + b;
    if (!apb.exact_zero()) {
      c.require(*sigma(apb) <= std::max(*sa, *sb), "ultrametric bound" + at);
      if (*sa != *sb) {
        c.require(*sigma(apb) == std::max(*sa, *sb), "ultrametric equality" + at);
      }
    }
    // Truncated arithmetic stays faithful to the exact model.
    const std::int64_t f = *sb - 2 - (i % 9);
    const LaurentScalar tb(expand(b, f));
    c.require(agrees_to(tb * a, a * b, f + *sa), "truncated product agreement" + at);
    const std::int64_t reach = f - 2 * (*sb);
    const LaurentScalar tinv = invert(tb, reach);
    c.require(agrees_to(tb * tinv, LaurentScalar(1), f - *sb),
              "truncated inversion postcondition" + at);
  }
  // sigma of a series with nothing retained is unknowable, never guessed.
  bool threw = false;
  try {
    sigma(LaurentScalar::series({}, -5));
  } catch (const Error& e) {
    threw = e.kind() == ErrorKind::ValBelowFloor;
  }
  c.require(threw, "degree of an empty truncation refuses with the precision error");
  c.note("field axioms: " + std::to_string(cases) + " randomized cases");
}

void suite_quantum(Checker& c, bool control, int scale) {
  std::mt19937_64 rng(0x5eed0002ULL);
  {
    // One deterministic associativity instance pinned on the sphere table.
    const Algebra alg = sphere_algebra(Rational(2), control);
    const QuantumClass a = basis_class(BasisId::H1);
    const QuantumClass b = basis_class(BasisId::H2);
    c.require(quantum_product(alg, quantum_product(alg, a, a), b) ==
                  quantum_product(alg, a, quantum_product(alg, a, b)),
              "associativity instance (A*A)*B = A*(A*B) at lambda=2");
  }
  std::vector<Algebra> algebras;
  for (const Rational& lam : {frac(3, 2), Rational(2), Rational(5), frac(7, 3)}) {
    algebras.push_back(sphere_algebra(lam, control));
  }
  for (const Rational& mu : {frac(1, 4), frac(1, 2), frac(2, 3), frac(1, 5), frac(5, 6)}) {
    algebras.emplace_back(ManifoldPreset::blow_up(mu));
  }
  const int cases = 230 / scale;
  for (int i = 0; i < cases && !c.failing(); ++i) {
    const Algebra& alg = algebras[static_cast<std::size_t>(i) % algebras.size()];
    const ManifoldPreset& p = alg.preset();
    const QuantumClass a = random_class(rng, 3, 2);
    const QuantumClass b = random_class(rng, 3, 2);
    const QuantumClass d = random_class(rng, 3, 2);
    const std::string at = " (quantum case " + std::to_string(i) + ")";
    const QuantumClass ab = quantum_product(alg, a, b);
    c.require(ab == quantum_product(alg, b, a), "product commutativity" + at);
    c.require(quantum_product(alg, ab, d) == quantum_product(alg, a, quantum_product(alg, b, d)),
              "product associativity" + at);
    c.require(quantum_product(alg, QuantumClass::unit(), a) == a, "unit law" + at);
    // Valuation is submultiplicative (products can only lose energy).
    if (!a.empty() && !b.empty() && !ab.empty()) {
      c.require(val_finite(p, ab) <= val_finite(p, a) + val_finite(p, b),
                "valuation submultiplicativity" + at);
    }
    // Degree additivity on homogeneous terms.
    const QuantumClass ha = random_class(rng, 1, 2);
    const QuantumClass hb = random_class(rng, 1, 2);
    const QuantumClass hab = quantum_product(alg, ha, hb);
    if (!hab.empty()) {
      c.require(degree(p, hab) ==
                    std::optional<int>(*degree(p, ha) + *degree(p, hb) - 4),
                "degree additivity" + at);
    }
    // Frobenius property of the exact pairing.
    c.require(pairing_pi(p, ab, d) == pairing_pi(p, a, quantum_product(alg, b, d)),
              "pairing associativity" + at);
  }
  c.note("quantum algebra: " + std::to_string(cases) + " randomized cases over 9 presets");
}

void suite_nonarch(Checker& c, bool control, int scale) {
  std::mt19937_64 rng(0x5eed0003ULL);
  // (i) The presentation transports the product exactly.
  std::vector<ManifoldPreset> presets = {
      ManifoldPreset::sphere_product(frac(3, 2)), ManifoldPreset::sphere_product(Rational(2)),
      ManifoldPreset::blow_up(frac(1, 4)), ManifoldPreset::blow_up(frac(1, 2)),
      ManifoldPreset::blow_up(frac(2, 3))};
  const int transport_cases = 160 / scale;
  for (int i = 0; i < transport_cases && !c.failing(); ++i) {
    const ManifoldPreset& p = presets[static_cast<std::size_t>(i) % presets.size()];
    const Algebra alg = p.kind() == PresetKind::SphereProduct
                            ? sphere_algebra(p.parameter(), control)
                            : Algebra(p);
    const StructurePolynomial sp = structure_polynomial(p);
    const int deg = effective_degree(sp.poly);
    std::vector<LaurentScalar> ca, cb;
    for (int j = 0; j < deg; ++j) {
      ca.push_back(random_exact_scalar(rng, 2, -3, 3));
      cb.push_back(random_exact_scalar(rng, 2, -3, 3));
    }
    const SubalgebraElement ea = make_element(sp, PolyL(ca));
    const SubalgebraElement eb = make_element(sp, PolyL(cb));
    const QuantumClass qa = from_subalgebra(ea, std::nullopt);
    const QuantumClass qb = from_subalgebra(eb, std::nullopt);
    const SubalgebraElement direct = sub_mul(ea, eb);
    const SubalgebraElement transported = to_subalgebra(sp, quantum_product(alg, qa, qb));
    c.require(trim_known_zero(direct.rep) == trim_known_zero(transported.rep),
              "presentation transports the product (case " + std::to_string(i) + ")");
  }
  // (ii) Idempotent laws below the threshold.
  const std::vector<Rational> mus = {frac(1, 4), frac(1, 5), frac(2, 7), frac(3, 10),
                                     frac(5, 17), frac(1, 6)};
  for (const Rational& mu : mus) {
    if (c.failing()) break;
    const ManifoldPreset p = ManifoldPreset::blow_up(mu);
    const Algebra alg(p);
    const std::vector<QuantumClass> es = unit_idempotents(p, -40);
    c.require(es.size() == 2, "two idempotents, mu=" + rs(mu));
    if (es.size() != 2) continue;
    c.require(sub(p, sum(p, es[0], es[1]), QuantumClass::unit()).empty(),
              "idempotents sum to the unit, mu=" + rs(mu));
    for (int i = 0; i < 2; ++i) {
      const QuantumClass sq = quantum_product(alg, es[static_cast<std::size_t>(i)],
                                              es[static_cast<std::size_t>(i)]);
      c.require(sub(p, sq, es[static_cast<std::size_t>(i)]).empty(),
                "idempotent squares to itself, mu=" + rs(mu));
    }
    c.require(quantum_product(alg, es[0], es[1]).empty(),
              "idempotents are orthogonal to working precision, mu=" + rs(mu));
  }
  // (iii) Component-wise inversion postconditions at floor -40.
  const int inv_cases = 48 / scale;
  int skipped = 0;
  for (int i = 0; i < inv_cases && !c.failing(); ++i) {
    const Rational& mu = mus[static_cast<std::size_t>(i) % mus.size()];
    const ManifoldPreset p = ManifoldPreset::blow_up(mu);
    const StructurePolynomial sp = structure_polynomial(p);
    const std::size_t component = static_cast<std::size_t>(i) % 2;
    std::vector<LaurentScalar> cs;
    for (int j = 0; j < 4; ++j) cs.push_back(random_exact_scalar(rng, 2, -3, 3));
    const SubalgebraElement g = make_element(sp, PolyL(cs));
    const std::vector<QuantumClass> es = unit_idempotents(p, -52);
    const SubalgebraElement e_rep = to_subalgebra(sp, es[component]);
    SubalgebraElement h{sp, PolyL()};
    try {
      h = invert_in_subalgebra(p, g, component, -52);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ZeroInComponent) {
        ++skipped;
        continue;
      }
      throw;
    }
    const PolyL err = sub_mul(g, h).rep - e_rep.rep;
    bool clean = true;
    for (int j = 0; j <= err.degree(); ++j) {
      if (!vanishes_to(err.coeff(j), -40)) clean = false;
    }
    c.require(clean, "g * g^{-1} = e_component down to x^{-40} (case " + std::to_string(i) +
                         ", mu=" + rs(mu) + ")");
  }
  c.require(skipped <= inv_cases / 4, "most random elements are units in each component");
  c.note("presentation/idempotent/inversion: " + std::to_string(transport_cases) + "+" +
         std::to_string(mus.size() * 4) + "+" + std::to_string(inv_cases) +
         " cases, floors -40 and deeper");
}

void suite_duality(Checker& c, int scale) {
  std::mt19937_64 rng(0x5eed0004ULL);
  const std::vector<ManifoldPreset> presets = {ManifoldPreset::sphere_product(Rational(2)),
                                               ManifoldPreset::blow_up(frac(1, 2))};
  std::vector<SeidelElement> loops;
  for (const ManifoldPreset& p : presets) {
    loops.push_back(seidel_inverse(p, default_power_floor(p, 12)));
  }
  const int cases = 208 / scale;
  for (int i = 0; i < cases && !c.failing(); ++i) {
    const std::size_t pi = static_cast<std::size_t>(i) % presets.size();
    const ManifoldPreset& p = presets[pi];
    const int k = i % 11;
    QuantumClass gamma, delta;
    bool found = false;
    for (int attempt = 0; attempt < 60 && !found; ++attempt) {
      gamma = random_class(rng, 2, 1);
      delta = random_class(rng, 2, 1);
      if (gamma.empty() || delta.empty()) continue;
      found = !is_zero(pairing_pi(p, delta, gamma));
    }
    if (!found) {
      gamma = QuantumClass::unit();
      delta = basis_class(BasisId::P);
    }
    const Rational defect = duality_defect(p, loops[pi], gamma, delta, k);
    c.require(sgn(defect) >= 0, "duality defect nonnegative (case " + std::to_string(i) +
                                    ", k=" + std::to_string(k) + ")");
  }
  c.note("duality defect: " + std::to_string(cases) + " randomized pairs, |k| <= 10");
}

CriterionResult criterion_properties(bool control, int scale) {
  return guarded(9, "property-suites", [&](Checker& c) {
    const bool timings = std::getenv("QHOM_BATTERY_TIMINGS") != nullptr;
    const auto timed = [&](const char* label, auto&& suite) {
      const auto start = std::chrono::steady_clock::now();
      suite();
      if (timings) {
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        std::fprintf(stderr, "[battery] criterion 9 suite %s: %lld ms\n", label,
                     static_cast<long long>(ms));
      }
    };
    timed("field", [&] { suite_field_axioms(c, scale); });
    timed("quantum", [&] { suite_quantum(c, control, scale); });
    timed("nonarch", [&] { suite_nonarch(c, control, scale); });
    timed("duality", [&] { suite_duality(c, scale); });
  });
}

// ---------------------------------------------------------------------------
// Criterion 10: the inversion defect over the sphere middle algebra
// ---------------------------------------------------------------------------

CriterionResult criterion_defect() {
  return guarded(10, "inversion-defect-stability", [](Checker& c) {
    const ManifoldPreset p = ManifoldPreset::sphere_product(Rational(2));
    const StructurePolynomial sp = structure_polynomial(p);
    const auto run = [&](std::uint64_t seed) {
      std::mt19937_64 rng(seed);
      std::optional<Rational> sup;
      for (int i = 0; i < 500; ++i) {
        std::vector<LaurentScalar> cs = {random_exact_scalar(rng, 2, -3, 3),
                                         random_exact_scalar(rng, 2, -3, 3)};
        const Rational d = inversion_defect(p, make_element(sp, PolyL(cs)));
        if (!sup || d > *sup) sup = d;
      }
      return *sup;
    };
    const Rational s1 = run(1337);
    const Rational s2 = run(4242);
    c.require(s1 == s2,
              "sup of the defect agrees across seeds 1337/4242: " + rs(s1) + " vs " + rs(s2));
    c.require(s1 == Rational(3), "sup of the defect over 500 exact samples is 3, got " + rs(s1));
    c.note("defect exact and finite on every sample (1000 total); sup " + rs(s1));
  });
}

// ---------------------------------------------------------------------------
// Criterion 11: determinism and the corrupted-table control
// ---------------------------------------------------------------------------

CriterionResult criterion_control() {
  return guarded(11, "determinism-and-negative-control", [](Checker& c) {
    const BatteryReport control = run_battery_impl(true, false);
    std::set<int> failed;
    for (const CriterionResult& r : control.criteria) {
      if (!r.passed) failed.insert(r.id);
    }
    const std::set<int> expected = {1, 4, 9};
    std::ostringstream got;
    for (int id : failed) got << " " << id;
    c.require(failed == expected,
              "corrupted-table run fails exactly criteria {1 4 9}; got {" + got.str() + " }");
    c.require(!control.all_passed, "corrupted-table run reports overall failure");
    c.note("the corrupted table flips the table audit (1), the power valuations consuming "
           "that algebra (4), and the quantum property suite (9); criteria that never touch "
           "the corrupted products stay green");
    const std::string first = battery_to_json(control).dump(2);
    const std::string second = battery_to_json(run_battery_impl(true, false)).dump(2);
    c.require(first == second, "two in-process control runs serialize byte-identically");
  });
}

BatteryReport run_battery_impl(bool control, bool include_control_criterion) {
  // The control run exists to watch criteria flip; it keeps every criterion
  // but samples the randomized suites at a quarter of the main volume.
  const int scale = control ? 4 : 1;
  // Wall-clock telemetry on stderr, opt-in so report bytes stay
  // deterministic. QHOM_BATTERY_TIMINGS=1 enables it.
  const bool timings = std::getenv("QHOM_BATTERY_TIMINGS") != nullptr;
  const auto timed = [&](const std::function<CriterionResult()>& f) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = f();
    if (timings) {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      std::fprintf(stderr, "[battery%s] criterion %d: %lld ms\n", control ? " control" : "",
                   r.id, static_cast<long long>(ms));
    }
    return r;
  };
  BatteryReport rep;
  rep.negative_control = control;
  rep.criteria.push_back(timed([&] { return criterion_tables(control); }));
  rep.criteria.push_back(timed([&] { return criterion_splitting(); }));
  rep.criteria.push_back(timed([&] { return criterion_middle_relations(); }));
  rep.criteria.push_back(timed([&] { return criterion_powers(control); }));
  rep.criteria.push_back(timed([&] { return criterion_sphere_slope(); }));
  rep.criteria.push_back(timed([&] { return criterion_blowup_upper(); }));
  rep.criteria.push_back(timed([&] { return criterion_blowup_lower(); }));
  rep.criteria.push_back(timed([&] { return criterion_linearity(); }));
  rep.criteria.push_back(timed([&] { return criterion_properties(control, scale); }));
  rep.criteria.push_back(timed([&] { return criterion_defect(); }));
  if (include_control_criterion) {
    rep.criteria.push_back(timed([&] { return criterion_control(); }));
  } else {
    CriterionResult skipped;
    skipped.id = 11;
    skipped.name = "determinism-and-negative-control";
    skipped.passed = true;
    skipped.notes = {"skipped inside the negative-control run"};
    rep.criteria.push_back(std::move(skipped));
  }
  rep.all_passed = std::all_of(rep.criteria.begin(), rep.criteria.end(),
                               [](const CriterionResult& r) { return r.passed; });
  return rep;
}

}  // namespace

BatteryReport run_battery(bool negative_control) {
  return run_battery_impl(negative_control, !negative_control);
}

nlohmann::json battery_to_json(const BatteryReport& r) {
  nlohmann::json j;
  j["negative_control"] = r.negative_control;
  j["all_passed"] = r.all_passed;
  nlohmann::json arr = nlohmann::json::array();
  for (const CriterionResult& cr : r.criteria) {
    nlohmann::json cj;
    cj["id"] = cr.id;
    cj["name"] = cr.name;
    cj["passed"] = cr.passed;
    cj["notes"] = cr.notes;
    arr.push_back(std::move(cj));
  }
  j["criteria"] = std::move(arr);
  return j;
}

std::string battery_text(const BatteryReport& r) {
  std::ostringstream out;
  if (r.negative_control) {
    out << "negative control: sphere table deliberately corrupted; criteria 1, 4 and 9 "
           "are expected to fail\n";
  }
  for (const CriterionResult& cr : r.criteria) {
    out << "criterion " << cr.id << " (" << cr.name << "): " << (cr.passed ? "PASS" : "FAIL")
        << "\n";
    for (const std::string& n : cr.notes) out << "    - " << n << "\n";
  }
  out << (r.all_passed ? "ALL CRITERIA PASSED" : "BATTERY FAILED") << " (" << r.criteria.size()
      << " criteria)\n";
  return out.str();
}

}  // namespace qhom
