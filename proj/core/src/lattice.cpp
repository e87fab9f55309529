#include "qhom/lattice.hpp"

#include "qhom/error.hpp"

namespace qhom {

ManifoldPreset ManifoldPreset::sphere_product(const Rational& lambda) {
  if (cmp(lambda, 1) <= 0)
    fail(ErrorKind::InvalidArgument, "sphere product requires lambda > 1, got " + rat_str(lambda));
  ManifoldPreset p;
  p.kind_ = PresetKind::SphereProduct;
  p.param_ = lambda;
  // Basis e1 = B - A, e2 = A where omega(A) = 1, omega(B) = lambda and
  // c1(A) = c1(B) = 2.
  p.omega_e1_ = lambda - 1;
  p.omega_e2_ = Rational(1);
  p.c1_e2_ = 2;
  p.minimal_chern_ = 2;
  p.kappa_ = 0;
  return p;
}

ManifoldPreset ManifoldPreset::blow_up(const Rational& mu) {
  if (cmp(mu, 0) <= 0 || cmp(mu, 1) >= 0)
    fail(ErrorKind::InvalidArgument, "blow-up requires 0 < mu < 1, got " + rat_str(mu));
  const Rational three_mu_minus_1 = 3 * mu - 1;
  if (sgn(three_mu_minus_1) == 0)
    fail(ErrorKind::InvalidArgument,
         "blow-up with mu = 1/3 degenerates the degree-0 lattice direction");
  ManifoldPreset p;
  p.kind_ = PresetKind::BlowUp;
  p.param_ = mu;
  // omega(E) = mu, omega(F) = 1 - mu, c1(E) = 1, c1(F) = 2. The c1-kernel
  // direction is F - 2E; take e1 = sgn(3mu-1) * (2E - F) so omega(e1) > 0,
  // and e2 = E.
  p.kappa_ = sgn(three_mu_minus_1);
  p.omega_e1_ = abs(three_mu_minus_1);
  p.omega_e2_ = mu;
  p.c1_e2_ = 1;
  p.minimal_chern_ = 1;
  return p;
}

LatticeVector ManifoldPreset::named_exponent(const std::string& name) const {
  if (kind_ == PresetKind::SphereProduct) {
    if (name == "A") return {Rational(0), Rational(1)};
    if (name == "B") return {Rational(1), Rational(1)};
  } else {
    // E = e2. For mu < 1/3, e1 = F - 2E so F = e1 + 2*e2; for mu > 1/3,
    // e1 = 2E - F so F = -e1 + 2*e2. L = E + F.
    if (name == "E") return {Rational(0), Rational(1)};
    if (name == "F") return {Rational(kappa_ < 0 ? 1 : -1), Rational(2)};
    if (name == "L") return {Rational(kappa_ < 0 ? 1 : -1), Rational(3)};
  }
  fail(ErrorKind::PresetMismatch, "exponent name \"" + name + "\" is not defined for this preset");
}

std::vector<std::string> ManifoldPreset::basis_names() const {
  if (kind_ == PresetKind::SphereProduct) return {"M", "A", "B", "P"};
  return {"M", "E", "F", "P"};
}

bool lambda_component_check(const ManifoldPreset& p, const std::vector<LatticeVector>& terms,
                            const Rational& k) {
  for (const auto& v : terms)
    if (2 * p.chern_of(v) != k) return false;
  return true;
}

std::string exponent_str(const LatticeVector& v) {
  if (v.is_zero()) return "q^0";
  std::string inner;
  if (sgn(v.a1) != 0) inner = rat_str(v.a1) + "*e1";
  if (sgn(v.a2) != 0) {
    if (!inner.empty()) inner += sgn(v.a2) > 0 ? " + " : " - ";
    const Rational a = inner.empty() ? v.a2 : abs(v.a2);
    inner += rat_str(a) + "*e2";
  }
  return "q^{" + inner + "}";
}

}  // namespace qhom
