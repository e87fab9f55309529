#include "qhom/quantum.hpp"

#include <sstream>

#include "qhom/error.hpp"

namespace qhom {

int basis_degree(BasisId b) {
  switch (b) {
    case BasisId::M:
      return 4;
    case BasisId::H1:
    case BasisId::H2:
      return 2;
    case BasisId::P:
      return 0;
  }
  fail(ErrorKind::InvalidArgument, "unknown basis id");
}

std::string basis_name(const ManifoldPreset& p, BasisId b) {
  const bool sphere = p.kind() == PresetKind::SphereProduct;
  switch (b) {
    case BasisId::M:
      return "M";
    case BasisId::H1:
      return sphere ? "A" : "E";
    case BasisId::H2:
      return sphere ? "B" : "F";
    case BasisId::P:
      return "P";
  }
  fail(ErrorKind::InvalidArgument, "unknown basis id");
}

BasisId basis_from_name(const ManifoldPreset& p, const std::string& name) {
  for (BasisId b : kBasis) {
    if (basis_name(p, b) == name) return b;
  }
  fail(ErrorKind::PresetMismatch, "class name '" + name + "' is not in the basis of this preset");
}

QuantumClass QuantumClass::term(BasisId cls, LatticeVector exp, Rational coeff) {
  QuantumClass out;
  out.add_term(cls, exp, coeff);
  return out;
}

void QuantumClass::add_term(BasisId cls, const LatticeVector& exp, const Rational& coeff) {
  if (is_zero(coeff)) return;
  QKey key{cls, exp};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(key, coeff);
    return;
  }
  it->second += coeff;
  if (is_zero(it->second)) terms_.erase(it);
}

void QuantumClass::impose_floor(const ManifoldPreset& p, const Rational& floor) {
  if (floor_ && *floor_ >= floor) return;
  floor_ = floor;
  for (auto it = terms_.begin(); it != terms_.end();) {
    Rational energy = p.omega_of(it->first.exp);
    if (energy < floor) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
}

namespace {

void merge_into(QuantumClass& acc, const QuantumClass& src, int sign) {
  for (const auto& [key, coeff] : src.terms()) {
    Rational c = sign * coeff;
    acc.add_term(key.cls, key.exp, c);
  }
}

}  // namespace

QuantumClass QuantumClass::operator+(const QuantumClass& o) const {
  if (floor_ != o.floor_ && floor_ && o.floor_) {
    fail(ErrorKind::InvalidArgument,
         "adding classes with different floors requires a preset; use sum()");
  }
  if (floor_.has_value() != o.floor_.has_value()) {
    // One side is exact: safe only if every exact-side term clears the floor,
    // which we cannot check without a preset.
    fail(ErrorKind::InvalidArgument,
         "adding an exact class to a floored one requires a preset; use sum()");
  }
  QuantumClass out = *this;
  merge_into(out, o, +1);
  return out;
}

QuantumClass QuantumClass::operator-(const QuantumClass& o) const { return *this + (-o); }

QuantumClass QuantumClass::operator-() const {
  QuantumClass out;
  out.floor_ = floor_;
  for (const auto& [key, coeff] : terms_) {
    Rational c = -coeff;
    out.terms_.emplace(key, c);
  }
  return out;
}

QuantumClass QuantumClass::scaled(const Rational& s) const {
  if (is_zero(s)) return QuantumClass::zero();
  QuantumClass out;
  out.floor_ = floor_;
  for (const auto& [key, coeff] : terms_) {
    Rational c = s * coeff;
    out.terms_.emplace(key, c);
  }
  return out;
}

QuantumClass QuantumClass::shifted(const LatticeVector& v) const {
  if (floor_) {
    fail(ErrorKind::InvalidArgument,
         "shifting a floored class requires a preset; use tensor_monomial()");
  }
  QuantumClass out;
  for (const auto& [key, coeff] : terms_) {
    out.terms_.emplace(QKey{key.cls, key.exp + v}, coeff);
  }
  return out;
}

QuantumClass sum(const ManifoldPreset& p, const QuantumClass& a, const QuantumClass& b) {
  QuantumClass out;
  merge_into(out, a, +1);
  merge_into(out, b, +1);
  std::optional<Rational> fl;
  if (a.energy_floor()) fl = *a.energy_floor();
  if (b.energy_floor() && (!fl || *b.energy_floor() > *fl)) fl = *b.energy_floor();
  if (fl) out.impose_floor(p, *fl);
  return out;
}

QuantumClass sub(const ManifoldPreset& p, const QuantumClass& a, const QuantumClass& b) {
  return sum(p, a, -b);
}

QuantumClass tensor_monomial(const ManifoldPreset& p, const QuantumClass& a,
                             const LatticeVector& v) {
  QuantumClass out;
  for (const auto& [key, coeff] : a.terms()) {
    out.add_term(key.cls, key.exp + v, coeff);
  }
  if (a.energy_floor()) {
    Rational fl = *a.energy_floor() + p.omega_of(v);
    out.impose_floor(p, fl);
  }
  return out;
}

namespace {

// Energies of table exponents are expressed through named classes of the
// preset for readability at the call sites below.
std::array<std::array<std::vector<TableTerm>, 4>, 4> build_table(const ManifoldPreset& p) {
  std::array<std::array<std::vector<TableTerm>, 4>, 4> t;
  const Rational one(1);
  auto set = [&](BasisId a, BasisId b, std::vector<TableTerm> terms) {
    t[static_cast<int>(a)][static_cast<int>(b)] = terms;
    t[static_cast<int>(b)][static_cast<int>(a)] = std::move(terms);
  };
  for (BasisId b : kBasis) {
    set(BasisId::M, b, {{b, LatticeVector{}, one}});
  }
  if (p.kind() == PresetKind::SphereProduct) {
    const LatticeVector A = p.named_exponent("A");
    const LatticeVector B = p.named_exponent("B");
    set(BasisId::H1, BasisId::H1, {{BasisId::M, -B, one}});
    set(BasisId::H1, BasisId::H2, {{BasisId::P, LatticeVector{}, one}});
    set(BasisId::H2, BasisId::H2, {{BasisId::M, -A, one}});
    set(BasisId::P, BasisId::H1, {{BasisId::H2, -B, one}});
    set(BasisId::P, BasisId::H2, {{BasisId::H1, -A, one}});
    set(BasisId::P, BasisId::P, {{BasisId::M, -A - B, one}});
  } else {
    const LatticeVector E = p.named_exponent("E");
    const LatticeVector F = p.named_exponent("F");
    set(BasisId::H1, BasisId::H1,
        {{BasisId::P, LatticeVector{}, -one},
         {BasisId::H1, -E, one},
         {BasisId::M, -F, one}});
    set(BasisId::H1, BasisId::H2,
        {{BasisId::P, LatticeVector{}, one}, {BasisId::H1, -E, -one}});
    set(BasisId::H2, BasisId::H2, {{BasisId::H1, -E, one}});
    set(BasisId::P, BasisId::H1, {{BasisId::H2, -F, one}});
    set(BasisId::P, BasisId::H2, {{BasisId::M, -E - F, one}});
    set(BasisId::P, BasisId::P, {{BasisId::H1, -E - F, one}, {BasisId::H2, -E - F, one}});
  }
  return t;
}

QuantumClass class_of(const std::vector<TableTerm>& terms) {
  QuantumClass out;
  for (const TableTerm& t : terms) out.add_term(t.cls, t.exp, t.coeff);
  return out;
}

}  // namespace

Algebra::Algebra(ManifoldPreset preset, std::optional<TablePerturbation> perturb)
    : preset_(std::move(preset)), table_(build_table(preset_)) {
  if (perturb) {
    auto& fwd = table_[static_cast<int>(perturb->a)][static_cast<int>(perturb->b)];
    if (perturb->term_index >= fwd.size()) {
      fail(ErrorKind::InvalidArgument, "perturbation index out of range");
    }
    fwd[perturb->term_index].coeff = perturb->coeff;
    if (perturb->a != perturb->b) {
      auto& rev = table_[static_cast<int>(perturb->b)][static_cast<int>(perturb->a)];
      rev[perturb->term_index].coeff = perturb->coeff;
    }
  }
}

const std::vector<TableTerm>& Algebra::basis_product(BasisId a, BasisId b) const {
  return table_[static_cast<int>(a)][static_cast<int>(b)];
}

Rational intersection(const ManifoldPreset& p, BasisId a, BasisId b) {
  if (basis_degree(a) + basis_degree(b) != 4) return Rational(0);
  if (a == BasisId::M || b == BasisId::M) return Rational(1);  // M . P
  // Both degree 2 now.
  if (p.kind() == PresetKind::SphereProduct) {
    return a != b ? Rational(1) : Rational(0);
  }
  if (a == BasisId::H1 && b == BasisId::H1) return Rational(-1);  // exceptional sphere
  if (a == BasisId::H2 && b == BasisId::H2) return Rational(0);
  return Rational(1);  // E . F
}

void Algebra::validate() const {
  const ManifoldPreset& p = preset_;
  auto name = [&](BasisId b) { return basis_name(p, b); };
  for (BasisId a : kBasis) {
    for (BasisId b : kBasis) {
      const QuantumClass ab = class_of(basis_product(a, b));
      // Commutativity of the stored table.
      if (ab != class_of(basis_product(b, a))) {
        fail(ErrorKind::InvalidArgument,
             "table is not symmetric at " + name(a) + "*" + name(b));
      }
      // Unit law.
      if (a == BasisId::M && ab != QuantumClass::term(b, {}, Rational(1))) {
        fail(ErrorKind::InvalidArgument, "M does not act as unit on " + name(b));
      }
      // Degree additivity term by term.
      const int expected = basis_degree(a) + basis_degree(b) - 4;
      for (const auto& [key, coeff] : ab.terms()) {
        Rational d = Rational(basis_degree(key.cls)) + 2 * p.chern_of(key.exp);
        if (d != expected) {
          fail(ErrorKind::InvalidArgument,
               "degree additivity fails at " + name(a) + "*" + name(b));
        }
      }
      // The energy-zero part must be the classical intersection product.
      QuantumClass classical;
      for (const auto& [key, coeff] : ab.terms()) {
        if (key.exp.is_zero()) classical.add_term(key.cls, key.exp, coeff);
      }
      QuantumClass want;
      if (a == BasisId::M) {
        want = QuantumClass::term(b, {}, Rational(1));
      } else if (b == BasisId::M) {
        want = QuantumClass::term(a, {}, Rational(1));
      } else if (basis_degree(a) == 2 && basis_degree(b) == 2) {
        want = QuantumClass::term(BasisId::P, {}, intersection(p, a, b));
      }  // else: a point-class factor caps everything of lower degree to zero
      if (classical != want) {
        fail(ErrorKind::InvalidArgument,
             "classical limit fails at " + name(a) + "*" + name(b));
      }
    }
  }
  for (BasisId a : kBasis) {
    for (BasisId b : kBasis) {
      for (BasisId c : kBasis) {
        const QuantumClass ea = QuantumClass::term(a, {}, Rational(1));
        const QuantumClass eb = QuantumClass::term(b, {}, Rational(1));
        const QuantumClass ec = QuantumClass::term(c, {}, Rational(1));
        const QuantumClass lhs = quantum_product(*this, quantum_product(*this, ea, eb), ec);
        const QuantumClass rhs = quantum_product(*this, ea, quantum_product(*this, eb, ec));
        if (lhs != rhs) {
          fail(ErrorKind::InvalidArgument, "associativity fails at (" + name(a) + "*" +
                                               name(b) + ")*" + name(c));
        }
        if (pairing_pi(p, quantum_product(*this, ea, eb), ec) !=
            pairing_pi(p, ea, quantum_product(*this, eb, ec))) {
          fail(ErrorKind::InvalidArgument, "Frobenius property fails at (" + name(a) + "," +
                                               name(b) + "," + name(c) + ")");
        }
      }
    }
  }
}

namespace {

// Upper bound on the energy of every term a conceptually holds, including
// ones hidden below its floor; nullopt for the exact zero class.
std::optional<Rational> energy_bound(const ManifoldPreset& p, const QuantumClass& a) {
  if (!a.empty()) return val_finite(p, a);
  if (a.energy_floor()) return *a.energy_floor();
  return std::nullopt;
}

}  // namespace

QuantumClass quantum_product(const Algebra& alg, const QuantumClass& a, const QuantumClass& b) {
  const ManifoldPreset& p = alg.preset();
  if ((a.exact() && a.empty()) || (b.exact() && b.empty())) return QuantumClass::zero();
  std::optional<Rational> fl;
  auto hidden_bound = [&](const std::optional<Rational>& floor, const QuantumClass& other) {
    if (!floor) return;
    Rational bound = *floor + *energy_bound(p, other);
    if (!fl || bound > *fl) fl = bound;
  };
  hidden_bound(a.energy_floor(), b);
  hidden_bound(b.energy_floor(), a);
  QuantumClass out;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      const Rational c = ca * cb;
      for (const TableTerm& t : alg.basis_product(ka.cls, kb.cls)) {
        Rational tc = t.coeff * c;
        out.add_term(t.cls, t.exp + ka.exp + kb.exp, tc);
      }
    }
  }
  if (fl) out.impose_floor(p, *fl);
  return out;
}

std::optional<Rational> val(const ManifoldPreset& p, const QuantumClass& a) {
  if (a.empty()) {
    if (a.exact()) return std::nullopt;
    fail(ErrorKind::ValBelowFloor,
         "class has no terms above its floor; val is below " + rat_str(*a.energy_floor()));
  }
  std::optional<Rational> best;
  for (const auto& [key, coeff] : a.terms()) {
    Rational e = p.omega_of(key.exp);
    if (!best || e > *best) best = e;
  }
  return best;
}

Rational val_finite(const ManifoldPreset& p, const QuantumClass& a) {
  auto v = val(p, a);
  if (!v) fail(ErrorKind::InvalidArgument, "val of the zero class is -infinity");
  return *v;
}

Rational pairing_pi(const ManifoldPreset& p, const QuantumClass& a, const QuantumClass& b) {
  // A floor on one side hides pairs whose partner exponents have energy below
  // it; the pairing is only trustworthy if every potential partner of the
  // other side's terms is visible.
  auto check_partners = [&](const QuantumClass& floored, const QuantumClass& other) {
    if (!floored.energy_floor()) return;
    for (const auto& [key, coeff] : other.terms()) {
      Rational partner_energy = -p.omega_of(key.exp);
      if (partner_energy < *floored.energy_floor()) {
        fail(ErrorKind::TruncationUnsound,
             "pairing partner may be hidden below floor " +
                 rat_str(*floored.energy_floor()));
      }
    }
  };
  check_partners(a, b);
  check_partners(b, a);
  if (a.energy_floor() && b.energy_floor() && *a.energy_floor() + *b.energy_floor() > 0) {
    fail(ErrorKind::TruncationUnsound,
         "both floors truncate a region where hidden terms could pair");
  }
  Rational acc(0);
  for (const auto& [ka, ca] : a.terms()) {
    for (BasisId cls : kBasis) {
      Rational ix = intersection(p, ka.cls, cls);
      if (is_zero(ix)) continue;
      auto it = b.terms().find(QKey{cls, -ka.exp});
      if (it == b.terms().end()) continue;
      acc += ca * it->second * ix;
    }
  }
  return acc;
}

LaurentScalar pairing_delta(const ManifoldPreset& p, const QuantumClass& a,
                            const QuantumClass& b) {
  if ((a.exact() && a.empty()) || (b.exact() && b.empty())) return LaurentScalar();
  std::map<std::int64_t, Rational> acc;
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      Rational ix = intersection(p, ka.cls, kb.cls);
      if (is_zero(ix)) continue;
      LatticeVector w = ka.exp + kb.exp;
      if (!is_zero(w.a2)) {
        fail(ErrorKind::InvalidArgument,
             "pairing contribution off the e1-line (nonzero Chern offset)");
      }
      if (!rat_is_integer(w.a1)) {
        fail(ErrorKind::InvalidArgument, "pairing contribution at fractional power of q^{e1}");
      }
      std::int64_t j = rat_floor_i64(w.a1);
      Rational c = ca * cb * ix;
      acc[j] += c;
    }
  }
  for (auto it = acc.begin(); it != acc.end();) {
    if (is_zero(it->second)) {
      it = acc.erase(it);
    } else {
      ++it;
    }
  }
  if (a.exact() && b.exact()) return LaurentScalar::laurent_terms(acc);
  std::optional<Rational> fl;
  auto hidden_bound = [&](const std::optional<Rational>& floor, const QuantumClass& other) {
    if (!floor) return;
    Rational bound = *floor + *energy_bound(p, other);
    if (!fl || bound > *fl) fl = bound;
  };
  hidden_bound(a.energy_floor(), b);
  hidden_bound(b.energy_floor(), a);
  Rational scaled = *fl / p.omega_e1();
  return LaurentScalar::series(acc, rat_ceil_i64(scaled));
}

std::optional<int> degree(const ManifoldPreset& p, const QuantumClass& a) {
  if (a.empty()) return std::nullopt;
  std::optional<Rational> common;
  for (const auto& [key, coeff] : a.terms()) {
    Rational d = Rational(basis_degree(key.cls)) + 2 * p.chern_of(key.exp);
    if (!common) {
      common = d;
    } else if (*common != d) {
      return std::nullopt;
    }
  }
  if (!rat_is_integer(*common)) return std::nullopt;
  return static_cast<int>(rat_floor_i64(*common));
}

std::string named_exponent_str(const ManifoldPreset& p, const LatticeVector& v) {
  // Coordinates in the preset's named sphere-class basis: for the sphere
  // product A = (0,1), B = (1,1); for the blow-up E = (0,1), F = (f1, 2).
  Rational a, b;
  const char* first_name;
  const char* second_name;
  if (p.kind() == PresetKind::SphereProduct) {
    b = v.a1;
    a = v.a2 - v.a1;
    first_name = "A";
    second_name = "B";
  } else {
    const Rational f1 = p.named_exponent("F").a1;
    b = v.a1 / f1;
    a = v.a2 - 2 * b;
    first_name = "E";
    second_name = "F";
  }
  std::ostringstream os;
  os << "q^{";
  bool wrote = false;
  auto emit = [&](const Rational& c, const char* name) {
    if (is_zero(c)) return;
    Rational mag = c;
    if (wrote) {
      os << (sgn(c) < 0 ? " - " : " + ");
      if (sgn(c) < 0) mag = -c;
    } else if (sgn(c) < 0) {
      os << "-";
      mag = -c;
    }
    if (mag != 1) os << rat_str(mag) << "*";
    os << name;
    wrote = true;
  };
  emit(a, first_name);
  emit(b, second_name);
  if (!wrote) return "q^0";
  os << "}";
  return os.str();
}

std::string to_string(const ManifoldPreset& p, const QuantumClass& a) {
  std::ostringstream os;
  if (a.empty()) {
    os << "0";
  } else {
    bool first = true;
    for (const auto& [key, coeff] : a.terms()) {
      Rational c = coeff;
      if (first) {
        if (sgn(c) < 0) {
          os << "-";
          c = -c;
        }
        first = false;
      } else if (sgn(c) < 0) {
        os << " - ";
        c = -c;
      } else {
        os << " + ";
      }
      if (c != 1) os << rat_str(c) << "*";
      os << basis_name(p, key.cls);
      if (!key.exp.is_zero()) os << " ⊗ " << named_exponent_str(p, key.exp);
    }
  }
  if (a.energy_floor()) os << " ; floor=" << rat_str(*a.energy_floor());
  return os.str();
}

}  // namespace qhom
