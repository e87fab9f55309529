#pragma once

// Inverse Seidel elements of the two preset circle actions, spectral numbers
// on loops, valuation asymptotics of their powers, and the values of the
// induced quasimorphism restriction, with comparisons against the published
// closed forms.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qhom/quantum.hpp"

namespace qhom {

// Defining data of the inverse loop element, kept for reporting.
struct SphereLoopData {
  Rational alpha;  // exponent = alpha*A + beta*B, solved from the two
  Rational beta;   // linear constraints (degree and energy of the top term)
};

struct BlowUpLoopData {
  Rational delta;
  LatticeVector exponent;  // single-term exponent in the (e1, e2) basis
};

struct SeidelElement {
  ManifoldPreset preset;
  QuantumClass base;  // the INVERSE loop image
  std::variant<SphereLoopData, BlowUpLoopData> provenance;
};

// Inverse Seidel element of the preset loop. The sphere-product element
// carries an infinite geometric tail, truncated at energy_floor; the blow-up
// element is a single exact term and ignores the floor.
SeidelElement seidel_inverse(const ManifoldPreset& p, const Rational& energy_floor);

// Tail depth adequate for powers up to k_max: the valuation of the 2n-th
// power sits n-1 below n times the base valuation, so the floor must deepen
// linearly with the target power.
Rational default_power_floor(const ManifoldPreset& p, int k_max);

// s^|k| for k > 0 (powers of the inverse loop); k < 0 goes through
// invert_unit with a mirrored floor budget.
QuantumClass seidel_power(const Algebra& alg, const SeidelElement& s, int k);

// val(a * s^k); k = 0 is the identity loop, giving val(a).
Rational spectral_number(const ManifoldPreset& p, const QuantumClass& a, const SeidelElement& s,
                         int k);

struct ValSequence {
  std::vector<std::pair<int, Rational>> entries;  // (k, val), k = 1..k_max
  std::optional<Rational> stabilized_slope;
  int window = 0;
  // Smallest stride whose differences are constant over the last `window`
  // indices; 0 when no stride up to 12 stabilizes. The sequences here are
  // eventually arithmetic only along strides (the residue pattern cycles),
  // so slope detection is stride-aware.
  int detected_period = 0;
};

// Exact valuation sequence val(unit * s^k), k = 1..k_max, with stride-aware
// slope stabilization. Errors from truncation floors propagate; callers own
// the deepen-and-retry policy.
ValSequence val_sequence(const ManifoldPreset& p, const SeidelElement& s,
                         const QuantumClass& unit, int k_max, int window);

enum class FormulaMatch { Match, Mismatch, Undetermined };

struct FormulaComparison {
  std::string source;  // "power-valuation-lemma" | "stated-limit" | "proof-rate"
  Rational expected;
  std::optional<Rational> computed;
  FormulaMatch verdict = FormulaMatch::Undetermined;
};

struct ComponentReport {
  std::size_t component = 0;
  ValSequence seq;
  std::vector<FormulaComparison> comparisons;
  std::string sign;  // slope sign: "NEGATIVE" | "POSITIVE" | "ZERO" | "UNSTABILIZED"
};

struct QuasimorphismReport {
  ManifoldPreset preset;
  int k_max = 0;
  int window = 0;
  bool stabilized = false;
  std::string sign;  // "NONZERO" | "ZERO" | "UNSTABILIZED" (convention-free)
  std::vector<ComponentReport> components;
  // Volume under the two standard conventions, and the constant that would
  // reproduce the published value (sphere product only; no standard
  // convention yields it, which the report records rather than hides).
  Rational volume_omega_n;
  Rational volume_omega_n_factorial;
  std::optional<Rational> paper_matching_volume;
  // Homogeneous value -vol * slope of the first component, per convention.
  std::vector<std::pair<std::string, Rational>> r_tilde;
};

// Runs the valuation sequence on each field component's unit (idempotents
// when the middle algebra splits, the unit class otherwise) and assembles the
// report. Never throws on non-stabilization: the flag carries the outcome,
// including when k_max < window + 2 (the window can never fill). An explicit
// energy_floor seeds the working depth; the adaptive deepening on truncation
// failures still applies on top of it.
QuasimorphismReport quasimorphism_restriction(const ManifoldPreset& p, int k_max, int window = 10,
                                              const std::optional<Rational>& energy_floor =
                                                  std::nullopt);

// c(gamma, loop^k) + c(delta, loop^{-k}); nonnegative whenever the
// intersection pairing of delta and gamma does not vanish.
Rational duality_defect(const ManifoldPreset& p, const SeidelElement& s, const QuantumClass& gamma,
                        const QuantumClass& delta, int k);

}  // namespace qhom
