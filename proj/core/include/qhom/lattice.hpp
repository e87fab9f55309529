#pragma once

// Spherical homology lattice for the two supported manifolds: the product of
// spheres X_lambda = (S^2 x S^2, lambda-weighted form) and the one-point
// blow-up Y_mu of the projective plane. Exponents of Novikov monomials live
// in the rational span of a two-element basis (e1, e2) chosen so that
// c1(e1) = 0 and omega(e1) > 0; x = q^{e1} then generates the degree-0
// coefficient field and y = q^{e2} carries all the Chern grading.

#include <compare>
#include <string>
#include <vector>

#include "qhom/rational.hpp"

namespace qhom {

enum class PresetKind { SphereProduct, BlowUp };

/// Exponent vector a1*e1 + a2*e2 with exact rational coordinates.
struct LatticeVector {
  Rational a1, a2;

  LatticeVector() : a1(0), a2(0) {}
  LatticeVector(Rational c1, Rational c2) : a1(std::move(c1)), a2(std::move(c2)) {}

  LatticeVector operator+(const LatticeVector& o) const { return {a1 + o.a1, a2 + o.a2}; }
  LatticeVector operator-(const LatticeVector& o) const { return {a1 - o.a1, a2 - o.a2}; }
  LatticeVector operator-() const { return {-a1, -a2}; }
  LatticeVector scaled(const Rational& s) const { return {a1 * s, a2 * s}; }

  bool operator==(const LatticeVector& o) const { return a1 == o.a1 && a2 == o.a2; }
  bool is_zero() const { return sgn(a1) == 0 && sgn(a2) == 0; }
};

/// Total order for use as a map key (lexicographic on coordinates).
inline bool operator<(const LatticeVector& u, const LatticeVector& v) {
  const int c = cmp(u.a1, v.a1);
  if (c != 0) return c < 0;
  return cmp(u.a2, v.a2) < 0;
}

/// Exponent addition of Novikov monomials q^u * q^v = q^{u+v}.
inline LatticeVector monomial_mul(const LatticeVector& u, const LatticeVector& v) { return u + v; }

class ManifoldPreset {
 public:
  /// Product of spheres with area weights (lambda, 1); requires lambda > 1.
  static ManifoldPreset sphere_product(const Rational& lambda);

  /// One-point blow-up with exceptional area mu; requires 0 < mu < 1 and
  /// mu != 1/3 (where omega(e1) would degenerate).
  static ManifoldPreset blow_up(const Rational& mu);

  PresetKind kind() const { return kind_; }

  /// lambda for SphereProduct, mu for BlowUp.
  const Rational& parameter() const { return param_; }

  /// Sign of 3*mu - 1 for BlowUp (+1 or -1); 0 for SphereProduct.
  int kappa() const { return kappa_; }

  const Rational& omega_e1() const { return omega_e1_; }
  const Rational& omega_e2() const { return omega_e2_; }
  int c1_e1() const { return 0; }
  int c1_e2() const { return c1_e2_; }

  /// Positive generator of c1 on the lattice.
  int minimal_chern() const { return minimal_chern_; }

  /// Symplectic area of an exponent vector.
  Rational omega_of(const LatticeVector& v) const { return v.a1 * omega_e1_ + v.a2 * omega_e2_; }

  /// First Chern number of an exponent vector (rational for fractional ones).
  Rational chern_of(const LatticeVector& v) const { return v.a2 * c1_e2_; }

  /// Named spherical classes as exponent vectors: A, B for SphereProduct;
  /// E, F, L for BlowUp. Throws PresetMismatch for names of the other preset.
  LatticeVector named_exponent(const std::string& name) const;

  /// Names of the homology basis in degree order 4,2,2,0:
  /// {M, A, B, P} or {M, E, F, P}.
  std::vector<std::string> basis_names() const;

  bool operator==(const ManifoldPreset& o) const {
    return kind_ == o.kind_ && param_ == o.param_;
  }

 private:
  ManifoldPreset() = default;

  PresetKind kind_ = PresetKind::SphereProduct;
  Rational param_;
  Rational omega_e1_, omega_e2_;
  int c1_e2_ = 0;
  int minimal_chern_ = 1;
  int kappa_ = 0;
};

/// True iff every exponent in `terms` lies in the degree-k graded component,
/// i.e. has 2*chern_of(exponent) = k.
bool lambda_component_check(const ManifoldPreset& p, const std::vector<LatticeVector>& terms,
                            const Rational& k);

/// Canonical text of a monomial exponent: "q^{p*e1 + q*e2}" with zero
/// components omitted; "q^0" for the zero vector.
std::string exponent_str(const LatticeVector& v);

}  // namespace qhom
