#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace roughkit {

/// Monomials h^a in `vars` variables of total degree <= `order`, graded then
/// lexicographic (x1 highest). Instances are interned and immutable.
class MonomialBasis {
 public:
  static std::shared_ptr<const MonomialBasis> get(int vars, int order);

  int vars() const { return vars_; }
  int order() const { return order_; }
  std::size_t size() const { return degrees_.size(); }
  std::span<const int> exponents(std::size_t i) const {
    return {exponents_.data() + i * static_cast<std::size_t>(vars_), static_cast<std::size_t>(vars_)};
  }
  int degree(std::size_t i) const { return degrees_[i]; }
  std::size_t degree_end(int p) const { return degree_end_[static_cast<std::size_t>(p)]; }
  std::size_t index(std::span<const int> exps) const;
  // a! = prod a_j!
  double multi_factorial(std::size_t i) const { return multi_factorial_[i]; }

  struct Product {
    std::size_t a, b, out;
  };
  const std::vector<Product>& products() const { return products_; }

  struct Shift {
    std::size_t from, to;
    double factor;
  };
  // d/dh_v maps monomial `from` to factor * monomial `to`
  const std::vector<Shift>& derivative(int v) const { return derivatives_[static_cast<std::size_t>(v)]; }

  // Index of the monomial h^a with one fewer power of its first used variable,
  // and that variable; used to build powers incrementally.
  std::size_t parent(std::size_t i) const { return parent_[i]; }
  int parent_var(std::size_t i) const { return parent_var_[i]; }

  MonomialBasis(int vars, int order);

 private:
  int vars_;
  int order_;
  std::vector<int> exponents_;
  std::vector<int> degrees_;
  std::vector<std::size_t> degree_end_;
  std::vector<double> multi_factorial_;
  std::vector<Product> products_;
  std::vector<std::vector<Shift>> derivatives_;
  std::vector<std::size_t> parent_;
  std::vector<int> parent_var_;
  std::map<std::vector<int>, std::size_t> lookup_;
};

using BasisPtr = std::shared_ptr<const MonomialBasis>;

/// Truncated multivariate Taylor polynomial sum_a c_a h^a. Coefficients above
/// `order()` are zero and carry no information.
class Jet {
 public:
  Jet() = default;
  Jet(BasisPtr basis, int order);

  static Jet constant(BasisPtr basis, double value);
  // value + h_v
  static Jet variable(BasisPtr basis, int v, double value);

  const BasisPtr& basis() const { return basis_; }
  int order() const { return order_; }
  double value() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }
  double coeff(std::size_t i) const { return coeffs_[i]; }
  double& coeff(std::size_t i) { return coeffs_[i]; }
  std::span<const double> coeffs() const { return coeffs_; }
  // d^a / dh^a at h = 0
  double partial(std::span<const int> exps) const;

  Jet derivative(int v) const;
  Jet truncated(int order) const;
  // Same polynomial over another basis in the same variables, truncated to its order.
  Jet in_basis(BasisPtr basis) const;
  Jet without_constant() const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double s);
  Jet& add_scaled(const Jet& o, double s);
  // this += s * a * b
  Jet& add_product(const Jet& a, const Jet& b, double s = 1.0);
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);

 private:
  void zero_above_order();
  BasisPtr basis_;
  int order_ = 0;
  std::vector<double> coeffs_;
};

// Power series of elementary functions applied to a jet.
Jet jet_sin(const Jet& x);
Jet jet_cos(const Jet& x);
Jet jet_exp(const Jet& x);

/// Evaluate the Taylor polynomial `taylor` (in args.size() variables,
/// expanded at the constant terms of args) at the jets args.
Jet taylor_substitute(const Jet& taylor, std::span<const Jet> args);
std::vector<Jet> taylor_substitute(std::span<const Jet> taylor, std::span<const Jet> args);

// Identity jets x_j + h_j in basis (x.size(), order).
std::vector<Jet> identity_jets(std::span<const double> x, int order);

}  // namespace roughkit
