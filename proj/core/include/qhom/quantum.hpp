#pragma once

// Quantum homology of the two presets: classes are finite rational
// combinations of the four homology basis elements tensored with Novikov
// monomials, optionally carrying an energy floor when a computation had to
// truncate an infinite series. The product is table-driven and validated
// against associativity, the unit law, degree additivity, and the Frobenius
// property of the intersection pairing.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qhom/lattice.hpp"
#include "qhom/laurent.hpp"

namespace qhom {

/// Homology basis: M (fundamental class, degree 4), two degree-2 sphere
/// classes (A,B for the sphere product; E,F for the blow-up), P (point).
enum class BasisId : int { M = 0, H1 = 1, H2 = 2, P = 3 };

inline constexpr std::array<BasisId, 4> kBasis = {BasisId::M, BasisId::H1, BasisId::H2,
                                                  BasisId::P};

int basis_degree(BasisId b);
std::string basis_name(const ManifoldPreset& p, BasisId b);
BasisId basis_from_name(const ManifoldPreset& p, const std::string& name);

struct QKey {
  BasisId cls;
  LatticeVector exp;

  bool operator==(const QKey& o) const { return cls == o.cls && exp == o.exp; }
};

inline bool operator<(const QKey& a, const QKey& b) {
  if (a.cls != b.cls) return static_cast<int>(a.cls) < static_cast<int>(b.cls);
  return a.exp < b.exp;
}

class QuantumClass {
 public:
  QuantumClass() = default;

  static QuantumClass zero() { return QuantumClass(); }
  static QuantumClass term(BasisId cls, LatticeVector exp, Rational coeff);
  static QuantumClass unit() { return term(BasisId::M, {}, Rational(1)); }

  const std::map<QKey, Rational>& terms() const { return terms_; }
  const std::optional<Rational>& energy_floor() const { return floor_; }

  bool empty() const { return terms_.empty(); }
  bool exact() const { return !floor_.has_value(); }

  /// Accumulate c * cls (x) q^exp, erasing the slot if it cancels. Does not
  /// consult the floor; floor discipline is restored by impose_floor.
  void add_term(BasisId cls, const LatticeVector& exp, const Rational& coeff);

  /// Raise the floor to `floor` (floors never deepen) and drop terms whose
  /// energy falls below it.
  void impose_floor(const ManifoldPreset& p, const Rational& floor);

  /// Term-wise sum/difference. Defined when the operands carry identical
  /// floors (or none); use sum()/sub() with a preset otherwise, which know
  /// how to reconcile mismatched floors. Throws InvalidArgument.
  QuantumClass operator+(const QuantumClass& o) const;
  QuantumClass operator-(const QuantumClass& o) const;
  QuantumClass operator-() const;
  QuantumClass scaled(const Rational& s) const;

  /// Tensor with the monomial q^v. Exact classes only (a floor would have to
  /// shift by the energy of v); use tensor_monomial for floored classes.
  QuantumClass shifted(const LatticeVector& v) const;

  bool operator==(const QuantumClass& o) const = default;

 private:
  std::map<QKey, Rational> terms_;
  std::optional<Rational> floor_;
};

QuantumClass sum(const ManifoldPreset& p, const QuantumClass& a, const QuantumClass& b);
QuantumClass sub(const ManifoldPreset& p, const QuantumClass& a, const QuantumClass& b);
QuantumClass tensor_monomial(const ManifoldPreset& p, const QuantumClass& a,
                             const LatticeVector& v);

/// One summand of a basis product: coeff * cls (x) q^exp.
struct TableTerm {
  BasisId cls;
  LatticeVector exp;
  Rational coeff;
};

/// Deliberate corruption of one table entry, for negative-control testing.
struct TablePerturbation {
  BasisId a, b;
  std::size_t term_index;
  Rational coeff;
};

/// A preset together with its quantum multiplication table.
class Algebra {
 public:
  explicit Algebra(ManifoldPreset preset, std::optional<TablePerturbation> perturb = std::nullopt);

  const ManifoldPreset& preset() const { return preset_; }
  const std::vector<TableTerm>& basis_product(BasisId a, BasisId b) const;

  /// Full structural audit of the table: commutativity, unit law, degree
  /// additivity, associativity on all basis triples, agreement of the
  /// energy-zero part with the classical intersection ring, and the Frobenius
  /// property of the pairing. Throws InvalidArgument on any violation.
  void validate() const;

 private:
  ManifoldPreset preset_;
  std::array<std::array<std::vector<TableTerm>, 4>, 4> table_;
};

/// Classical intersection number of two basis classes (zero unless their
/// degrees are complementary).
Rational intersection(const ManifoldPreset& p, BasisId a, BasisId b);

QuantumClass quantum_product(const Algebra& alg, const QuantumClass& a, const QuantumClass& b);

/// Maximal term energy; nullopt encodes val(0) = -infinity. A truncated class
/// with no retained terms has unknown valuation (ValBelowFloor).
std::optional<Rational> val(const ManifoldPreset& p, const QuantumClass& a);

/// val for classes known to be nonzero.
Rational val_finite(const ManifoldPreset& p, const QuantumClass& a);

/// Q-valued intersection pairing: sum over opposite-exponent term pairs of
/// the intersection number. Throws TruncationUnsound if a floor could hide
/// contributing pairs.
Rational pairing_pi(const ManifoldPreset& p, const QuantumClass& a, const QuantumClass& b);

/// Pairing with values in Laurent series in x = q^{e1}: the coefficient of
/// x^j collects intersection numbers of term pairs whose exponents sum to
/// j*e1. Exact inputs give an exact result; floored inputs a truncated
/// series. Contributions off the e1-line (or at fractional multiples of e1)
/// are InvalidArgument.
LaurentScalar pairing_delta(const ManifoldPreset& p, const QuantumClass& a,
                            const QuantumClass& b);

/// Common degree of all terms, nullopt when mixed (or indeterminate: the
/// zero class, or fractional Chern pairing).
std::optional<int> degree(const ManifoldPreset& p, const QuantumClass& a);

/// Multiplicative inverse up to energy_floor, by splitting off the
/// top-energy homogeneous part (inverted exactly through the basis algebra or
/// the degree-4 subalgebra presentation) and summing the geometric series of
/// the remainder. A nullopt floor requests an exact result and fails with
/// FloorTooShallow if truncation is unavoidable.
QuantumClass invert_unit(const Algebra& alg, const QuantumClass& a,
                         std::optional<Rational> energy_floor);

/// Canonical text form, deterministic term order.
// Exponent vector rendered over the preset's named sphere classes
// ("q^{-A - B}", "q^{1/3*B}"); "q^0" for the zero vector.
std::string named_exponent_str(const ManifoldPreset& p, const LatticeVector& v);

std::string to_string(const ManifoldPreset& p, const QuantumClass& a);

}  // namespace qhom
