#pragma once

// Infix expressions over a preset's quantum classes: named classes, exact
// rational scalars, exponent monomials q^{...}, products, sums, differences,
// parentheses. Diagnostics carry byte positions.

#include <string>

#include "qhom/quantum.hpp"

namespace qhom {

// Parses and evaluates in one pass. Scalars act through the unit class;
// exponent vectors accept the preset's named classes plus e1/e2.
QuantumClass eval_expression(const Algebra& alg, const std::string& text);

}  // namespace qhom
