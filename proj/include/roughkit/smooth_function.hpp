#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "roughkit/algebra.hpp"
#include "roughkit/jet.hpp"

namespace roughkit {

// Declared derivative order of functions with closed-form derivatives of all orders.
inline constexpr int kAnalytic = 1 << 20;

struct Monomial {
  double coeff = 0.0;
  std::vector<int> powers;
};

struct TrigTerm {
  double coeff = 0.0;
  std::vector<double> freq;
  double phase = 0.0;  // coeff * sin(freq . x + phase)
};

struct GaussianTerm {
  double coeff = 0.0;
  std::vector<double> center;
  double width = 1.0;  // coeff * exp(-|x - center|^2 / (2 width^2))
};

/// A map R^n_in -> R^n_out with derivatives up to a declared order.
///
/// Derivatives come from Taylor jets: taylor(x, K) returns the degree-K
/// Taylor polynomial of each output component at x, and substitute() composes
/// the function with jets (a truncated Taylor map).
class SmoothFunction {
 public:
  class Impl;

  SmoothFunction() = default;
  explicit SmoothFunction(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static SmoothFunction polynomial(int n_in, std::vector<std::vector<Monomial>> components);
  static SmoothFunction affine(std::vector<std::vector<double>> matrix, std::vector<double> offset);
  static SmoothFunction linear(std::vector<std::vector<double>> matrix);
  static SmoothFunction constant(int n_in, std::vector<double> value);
  static SmoothFunction identity(int n);
  static SmoothFunction trig(int n_in, std::vector<std::vector<TrigTerm>> components);
  static SmoothFunction gaussian(int n_in, std::vector<std::vector<GaussianTerm>> components);

  using PartialOracle = std::function<double(std::span<const double> x, int component, std::span<const int> exps)>;
  // User-supplied partial derivatives d^a phi_c(x) for |a| <= order.
  static SmoothFunction from_partials(int n_in, int n_out, int order, PartialOracle partials);
  using TaylorMap = std::function<std::vector<Jet>(std::span<const double> x, int order)>;
  static SmoothFunction from_taylor(int n_in, int n_out, int order, TaylorMap taylor);
  using JetMap = std::function<std::vector<Jet>(std::span<const Jet> args)>;
  static SmoothFunction from_jet_map(int n_in, int n_out, int order, JetMap map);
  // Central finite differences of eval; declared order 2.
  using EvalMap = std::function<std::vector<double>(std::span<const double> x)>;
  static SmoothFunction finite_difference(int n_in, int n_out, EvalMap eval);

  friend SmoothFunction operator+(const SmoothFunction& a, const SmoothFunction& b);
  friend SmoothFunction operator-(const SmoothFunction& a, const SmoothFunction& b);
  friend SmoothFunction operator*(double s, const SmoothFunction& a);
  // scalar a (n_out = 1) times vector b
  static SmoothFunction product(const SmoothFunction& a, const SmoothFunction& b);
  // outer(inner(x))
  static SmoothFunction compose(const SmoothFunction& outer, const SmoothFunction& inner);
  // Component c of the output.
  SmoothFunction component(int c) const;
  // Stacks the outputs of functions with equal n_in.
  static SmoothFunction stack(const std::vector<SmoothFunction>& parts);

  bool valid() const { return impl_ != nullptr; }
  int n_in() const;
  int n_out() const;
  int order() const;
  const std::string& family() const;

  std::vector<double> operator()(std::span<const double> x) const;
  // Throws OrderError if order exceeds the declared order.
  std::vector<Jet> taylor(std::span<const double> x, int order) const;
  std::vector<Jet> substitute(std::span<const Jet> args) const;

  // d^alpha phi(x), alpha a word over {1..n_in}.
  std::vector<double> partial(std::span<const double> x, const Word& alpha) const;
  // D^k phi(x)(v_1, ..., v_k)
  std::vector<double> derivative(std::span<const double> x, const std::vector<std::vector<double>>& directions) const;

  // Structural description for serialization; empty for opaque families.
  struct Description {
    std::string family;
    std::vector<std::vector<Monomial>> polynomial;
    std::vector<std::vector<TrigTerm>> trig;
    std::vector<std::vector<GaussianTerm>> gaussian;
    std::vector<std::vector<double>> matrix;
    std::vector<double> offset;
  };
  const Description* description() const;

 private:
  std::shared_ptr<const Impl> impl_;
};

class SmoothFunction::Impl {
 public:
  Impl(int n_in, int n_out, int order, std::string family)
      : n_in(n_in), n_out(n_out), order(order), family(std::move(family)) {}
  virtual ~Impl() = default;

  // Each implementation overrides taylor, substitute, or both.
  virtual std::vector<double> eval(std::span<const double> x) const;
  virtual std::vector<Jet> taylor(std::span<const double> x, int k) const;
  virtual std::vector<Jet> substitute(std::span<const Jet> args) const;
  virtual const Description* description() const { return nullptr; }

  int n_in, n_out, order;
  std::string family;
};

// D^k phi(x)(v_1, ..., v_k) from the Taylor jets of phi at x (jet order >= k).
std::vector<double> multilinear(std::span<const Jet> taylor, std::span<const std::span<const double>> directions);

// D^k phi(x + h)(v_1(h), ..., v_k(h)) as jets in h of order `order`, from the
// Taylor jets of phi at x (jet order >= order + k) and direction jets.
std::vector<Jet> multilinear_jets(std::span<const Jet> taylor, std::span<const std::span<const Jet>> directions,
                                  int order);

// Multi-index exponents counting the letters of alpha over {1..n}.
std::vector<int> exponents_of(const Word& alpha, int n);

}  // namespace roughkit
