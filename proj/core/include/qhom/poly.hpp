#pragma once

// Dense univariate polynomials over a commutative coefficient ring. Used with
// Rational coefficients (inside rational functions) and with LaurentScalar
// coefficients (structure polynomials, Hensel lifting). Division and gcd live
// with the coefficient semantics, not here.

#include <initializer_list>
#include <vector>

#include "qhom/error.hpp"
#include "qhom/rational.hpp"

namespace qhom {

template <class T>
concept coefficient_ring = requires(T a, T b) {
  { a + b };
  { a - b };
  { a * b };
  { -a };
  { a == b };
  T(0);
  { is_zero(a) };  // customization point; true only for the exact zero
};

template <coefficient_ring T>
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { normalize(); }
  Poly(std::initializer_list<T> coeffs) : c_(coeffs) { normalize(); }

  static Poly monomial(const T& coeff, int power) {
    std::vector<T> c(static_cast<std::size_t>(power) + 1, T(0));
    c.back() = coeff;
    return Poly(std::move(c));
  }

  /// Degree of the zero polynomial is -1.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool zero() const { return c_.empty(); }

  T coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return T(0);
    return c_[static_cast<std::size_t>(i)];
  }

  const T& leading() const {
    if (c_.empty()) fail(ErrorKind::ZeroPolynomial, "leading coefficient of zero polynomial");
    return c_.back();
  }

  const std::vector<T>& coefficients() const { return c_; }

  Poly operator+(const Poly& o) const {
    std::vector<T> r(std::max(c_.size(), o.c_.size()), T(0));
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i < c_.size()) r[i] = r[i] + c_[i];
      if (i < o.c_.size()) r[i] = r[i] + o.c_[i];
    }
    return Poly(std::move(r));
  }

  Poly operator-(const Poly& o) const { return *this + (-o); }

  Poly operator-() const {
    std::vector<T> r(c_);
    for (auto& v : r) v = -v;
    return Poly(std::move(r));
  }

  Poly operator*(const Poly& o) const {
    if (c_.empty() || o.c_.empty()) return Poly();
    std::vector<T> r(c_.size() + o.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j)
        r[i + j] = r[i + j] + c_[i] * o.c_[j];
    return Poly(std::move(r));
  }

  Poly scaled(const T& s) const {
    std::vector<T> r(c_);
    for (auto& v : r) v = v * s;
    return Poly(std::move(r));
  }

  /// Multiply by the k-th power of the variable.
  Poly shifted_up(int k) const {
    if (c_.empty() || k == 0) return *this;
    std::vector<T> r(c_.size() + static_cast<std::size_t>(k), T(0));
    for (std::size_t i = 0; i < c_.size(); ++i) r[i + static_cast<std::size_t>(k)] = c_[i];
    return Poly(std::move(r));
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<T> r(c_.size() - 1, T(0));
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = T(static_cast<int>(i)) * c_[i];
    return Poly(std::move(r));
  }

  T eval(const T& x) const {
    T acc(0);
    for (std::size_t i = c_.size(); i > 0; --i) acc = acc * x + c_[i - 1];
    return acc;
  }

  bool operator==(const Poly& o) const { return c_ == o.c_; }

 private:
  void normalize() {
    while (!c_.empty() && is_zero(c_.back())) c_.pop_back();
  }

  std::vector<T> c_;
};

}  // namespace qhom
