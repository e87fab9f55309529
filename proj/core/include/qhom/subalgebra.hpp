#pragma once

// The middle-dimension subalgebra QH_{2n} presented as R[T]/(p) for a single
// generator T, plus everything that lives naturally on that presentation:
// polynomial arithmetic over LaurentScalar coefficients, Newton polygons,
// Hensel lifting, the field-splitting certificate, idempotents, and
// component-wise inversion.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhom/lattice.hpp"
#include "qhom/laurent.hpp"
#include "qhom/quantum.hpp"

namespace qhom {

using PolyL = Poly<LaurentScalar>;

/// Zero for working purposes: the exact zero, or a truncated series with
/// nothing retained (zero down to its floor).
bool known_zero(const LaurentScalar& c);

/// Degree ignoring trailing known_zero coefficients; -1 when all are.
int effective_degree(const PolyL& f);

/// Drop trailing known_zero coefficients.
PolyL trim_known_zero(const PolyL& f);

/// Truncate series coefficients to `floor` (raising shallower floors is a
/// no-op; exact coefficients are left exact unless force_series).
PolyL truncate_poly(const PolyL& f, std::int64_t floor, bool force_series = false);

/// Quotient and remainder by a monic divisor; exact, no coefficient
/// inversions.
std::pair<PolyL, PolyL> divmod_monic(const PolyL& a, const PolyL& b);

/// Fraction-free pseudo-division: mult * a = quo * b + rem with
/// deg(rem) < deg(b), mult a power of b's leading coefficient.
struct PseudoDivision {
  PolyL quo;
  PolyL rem;
  LaurentScalar mult;
};
PseudoDivision pseudo_divmod(const PolyL& a, const PolyL& b);

/// Monic gcd over the fraction field, by pseudo-division with content
/// normalization. Exact for RationalFunction coefficients.
PolyL poly_gcd(PolyL f, PolyL g);

/// Extended Euclid: s*f + t*g = gcd, gcd monic. work_floor bounds the depth
/// of series arithmetic (also used when the final normalization must invert
/// a series scalar).
struct BezoutTriple {
  PolyL gcd;
  PolyL s;
  PolyL t;
};
BezoutTriple ext_euclid(const PolyL& f, const PolyL& g,
                        std::optional<std::int64_t> work_floor = std::nullopt);

/// One segment of the lower Newton polygon: `length` lattice steps of the
/// given slope, slopes strictly ascending across the list.
struct NewtonSegment {
  Rational slope;
  int length = 0;
};

/// Lower convex hull of (i, -sigma(c_i)) over non-vanishing coefficients,
/// after factoring out any power of the generator. Throws ZeroPolynomial.
std::vector<NewtonSegment> newton_polygon(const PolyL& f);

/// The presentation of QH_{2n} as R[T]/(poly): T = P (x) y for the sphere
/// product (poly = T^2 - x^{-1}), T = F (x) y for the blow-up
/// (poly = T^4 + T^3 - x^kappa).
struct StructurePolynomial {
  ManifoldPreset preset;
  PolyL poly;
  std::string generator_name;
};

StructurePolynomial structure_polynomial(const ManifoldPreset& p);

/// An element of R[T]/(poly), reduced to degree < deg(poly).
struct SubalgebraElement {
  StructurePolynomial context;
  PolyL rep;
};

/// Wrap a polynomial, reducing modulo the structure polynomial.
SubalgebraElement make_element(const StructurePolynomial& sp, const PolyL& rep);

SubalgebraElement sub_mul(const SubalgebraElement& a, const SubalgebraElement& b);
SubalgebraElement sub_add(const SubalgebraElement& a, const SubalgebraElement& b);

/// Presentation map. to_subalgebra accepts exactly the classes whose terms
/// lie in the presentation slots (integral powers of x, the generator's
/// y-shape); anything else is InvalidArgument.
SubalgebraElement to_subalgebra(const StructurePolynomial& sp, const QuantumClass& a);

/// Back to class form. Exact coefficients with monomial denominators convert
/// exactly; everything else needs the requested energy floor (FloorTooShallow
/// when absent or not supported by the element's own floors).
QuantumClass from_subalgebra(const SubalgebraElement& e, std::optional<Rational> energy_floor);

/// val of the image class, computed slotwise from sigma without expanding.
std::optional<Rational> val_of(const SubalgebraElement& e);

bool is_squarefree(const StructurePolynomial& sp);

/// Quadratic Hensel lifting from a residue-level coprime factorization
/// p = f0*g0 (g0 monic) to a factorization correct down to target_floor.
/// Exact inputs that already factor p return untouched (zero iterations).
std::pair<PolyL, PolyL> hensel_lift(const StructurePolynomial& sp, const PolyL& f0,
                                    const PolyL& g0, std::int64_t target_floor);

enum class IrreducibilityReason { Linear, NewtonSlopeDenominator, ResidueIrreducible, Unproven };

enum class SplitVerdict { Field, SemisimpleSplit, NotSemisimple, Undecided };

struct CertifiedFactor {
  PolyL poly;
  int multiplicity = 1;
  IrreducibilityReason reason = IrreducibilityReason::Unproven;
  int newton_denominator = 0;  // set when reason is NewtonSlopeDenominator
};

struct FactorizationCertificate {
  SplitVerdict verdict = SplitVerdict::Undecided;
  std::vector<CertifiedFactor> factors;
  std::int64_t precision_floor = 0;
};

const char* to_string(SplitVerdict v);
const char* to_string(IrreducibilityReason r);

/// Factor the preset's structure polynomial into certified-irreducible
/// pieces. Field when one factor, SemisimpleSplit when several; certificate
/// classes outside the recognized Newton-polygon patterns come back
/// Undecided rather than guessed.
FactorizationCertificate split_fields(const ManifoldPreset& p, std::int64_t target_floor);

/// Pairwise-orthogonal idempotents summing to the unit, one per factor,
/// ordered as the certificate's factors. target_floor is the series depth
/// (in powers of x) carried through the computation.
std::vector<QuantumClass> unit_idempotents(const ManifoldPreset& p, std::int64_t target_floor);

/// Inverse of g within the chosen field component: returns h with
/// g*h = e_component up to the working floor. ZeroInComponent when g's
/// projection there vanishes to working precision.
SubalgebraElement invert_in_subalgebra(const ManifoldPreset& p, const SubalgebraElement& g,
                                       std::size_t component, std::int64_t target_floor);

/// val(g) + val(g^{-1}) for a unit g of QH_{2n}, both vals taken through the
/// presentation map.
Rational inversion_defect(const ManifoldPreset& p, const SubalgebraElement& g);

std::string to_string(const PolyL& f, const std::string& var);

}  // namespace qhom
