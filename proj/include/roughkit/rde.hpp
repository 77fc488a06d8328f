#pragma once

#include <memory>
#include <span>
#include <vector>

#include "roughkit/algebra.hpp"
#include "roughkit/controlled.hpp"
#include "roughkit/jet.hpp"
#include "roughkit/order.hpp"
#include "roughkit/rough_path.hpp"
#include "roughkit/smooth_function.hpp"

namespace roughkit {

/// Driving vector fields f_1..f_d : R^n -> R^n.
class VectorFieldSystem {
 public:
  VectorFieldSystem() = default;
  explicit VectorFieldSystem(std::vector<SmoothFunction> fields);
  static VectorFieldSystem zero(int d, int n);

  int d() const { return static_cast<int>(fields_.size()); }
  int n() const { return n_; }
  // smallest declared order among the fields
  int order() const { return order_; }
  // letter i in 1..d
  const SmoothFunction& field(int i) const { return fields_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<SmoothFunction>& fields() const { return fields_; }

 private:
  std::vector<SmoothFunction> fields_;
  int n_ = 0;
  int order_ = 0;
};

/// The derived fields F_w for all words |w| <= level: F_e = id, F_i = f_i and
/// F_{iw} = DF_w f_i. Immutable after construction.
class DerivedFieldTable {
 public:
  DerivedFieldTable() = default;
  DerivedFieldTable(VectorFieldSystem v, int level);

  const VectorFieldSystem& system() const { return v_; }
  int level() const { return shape_.level(); }
  int d() const { return v_.d(); }
  int n() const { return v_.n(); }
  const TensorShape& shape() const { return shape_; }

  // Taylor jets at x valid to order k of F_w for |w| <= max_len (default: level),
  // indexed [word][component], by the recursion.
  std::vector<std::vector<Jet>> taylor(std::span<const double> x, int k, int max_len = -1) const;
  // F_w(x) by the recursion.
  std::vector<std::vector<double>> values(std::span<const double> x) const;
  // F_w(x) by the shuffle form F_{wi} = sum_k 1/k! sum D^k f_i(F_u1, ..., F_uk).
  std::vector<std::vector<double>> shuffle_values(std::span<const double> x) const;
  // F_w as a function, derivatives through the recursion.
  SmoothFunction field(const Word& w) const;

 private:
  VectorFieldSystem v_;
  TensorShape shape_;
};

// sum_{|w| <= table.level()} F_w(x) <g, e_w>; g must reach the table level.
std::vector<double> davie_step(std::span<const double> x, const DerivedFieldTable& table, const GroupTensor& g);

struct RdeOptions {
  bool residual = true;   // a posteriori fixed-point residual
  double blowup = 1e150;  // states beyond this magnitude count as blow-up
};

struct RdeSolution {
  ControlledPath lift;  // <e_w*, X_t> = F_w(X_t), |w| <= N_gamma
  int level = 0;        // words used in each Davie step
  // sup_t |X_t - X_0 - sum_i int_0^t f_i(X) dW^i|, the integrals as compensated sums over
  // every other partition point; NaN when not computed
  double residual = 0.0;

  std::size_t size() const { return lift.size(); }
  const std::vector<double>& times() const { return lift.times(); }
  std::vector<double> state(std::size_t i) const;
  std::vector<double> terminal() const { return state(size() - 1); }
};

// Davie steps over the partition at the driver's level, starting from x0 at partition.front().
RdeSolution solve_rde(std::span<const double> x0, const VectorFieldSystem& v, const RoughPathPtr& w,
                      std::vector<double> partition, const RdeOptions& options = {});

// Terminal state only, no lift; shares the step loop with solve_rde.
std::vector<double> flow(std::span<const double> x0, const DerivedFieldTable& table, const GeometricRoughPath& w,
                         std::span<const double> partition);

// {s} u {k h : s < k h < t} u {t}
std::vector<double> mesh_partition(double s, double t, double h);

/// Coordinates of S_k = R^n + L(R^n, R^n) + ... + L((R^n)^{k-1}, R^n), keeping
/// the symmetric tensors D^p X by their partial derivatives: entry (c, a) is
/// d^a X_c for multi-indices |a| <= k - 1.
class ExtendedSpace {
 public:
  ExtendedSpace() = default;
  ExtendedSpace(int n, int k);

  int n() const { return n_; }
  int k() const { return k_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * basis_->size(); }
  const BasisPtr& basis() const { return basis_; }
  std::size_t index(int component, std::span<const int> exps) const;

  // (x, I, 0, ..., 0)
  std::vector<double> canonical(std::span<const double> x) const;
  // X(h) = sum_a d^a X / a! h^a per component
  std::vector<Jet> to_jets(std::span<const double> state) const;
  std::vector<double> from_jets(std::span<const Jet> jets) const;

  // The lifted field on S_k, p-th component
  // sum_{j=1..p} sum_r p! / (prod r_i! (i!)^{r_i}) D^{p-j+1} f(x)(y_1^{r_1}, ..., y_j^{r_j}),
  // r_1 + ... + r_j = p - j + 1, r_1 + 2 r_2 + ... + j r_j = p.
  SmoothFunction lift(const SmoothFunction& f) const;
  VectorFieldSystem lift(const VectorFieldSystem& v) const;

 private:
  int n_ = 1;
  int k_ = 1;
  BasisPtr basis_;
};

struct FlowJetPath {
  ExtendedSpace space;
  std::vector<double> times;
  std::vector<std::vector<double>> states;  // flattened S_k coordinates

  // d^alpha X_t, alpha a word over {1..n}
  std::vector<double> partial(std::size_t ti, const Word& alpha) const;
  std::vector<Jet> jets(std::size_t ti) const { return space.to_jets(states[ti]); }
};

// Solves the lifted RDE in S_k from (x0, I, 0, ..., 0) by Davie steps.
FlowJetPath solve_flow_jets(std::span<const double> x0, const VectorFieldSystem& v, const RoughPathPtr& w,
                            std::vector<double> partition, int k);

// Taylor map of x -> X^{s,x}_t at x0 to order k, composing the Taylor maps of
// the Davie steps. Same numbers as the lifted system, at a fraction of the cost.
std::vector<Jet> flow_taylor(std::span<const double> x0, const DerivedFieldTable& table, const GeometricRoughPath& w,
                             std::span<const double> partition, int k);

struct DavieCheck {
  Word alpha;
  OrderFit fit;
};

// Regression of |d^alpha X^{s,x0}_t - sum_w d^alpha F_w(x0) <W_st, e_w>| over
// dyadic pairs of the uniform grid; each flow solved on mesh_partition(s, t, mesh).
std::vector<DavieCheck> partial_davie_check(std::span<const double> x0, const VectorFieldSystem& v,
                                            const RoughPathPtr& w, const std::vector<Word>& alphas,
                                            std::span<const double> grid, double mesh);

// Gamma_w phi by the shuffle formula; Gamma_e phi = phi.
SmoothFunction gamma_operator(const Word& w, const VectorFieldSystem& v, const SmoothFunction& phi);
// Gamma_{i1} o ... o Gamma_{im} phi, each Gamma_i psi = D psi f_i.
SmoothFunction gamma_composed(const Word& w, const VectorFieldSystem& v, const SmoothFunction& phi);
// Gamma_w phi(x) for all |w| <= table.level(), from the Taylor jets of phi at x
// (order >= level) and F_u(x). Indexed [word][component].
std::vector<std::vector<double>> gamma_values(const DerivedFieldTable& table, std::span<const Jet> phi_taylor,
                                              std::span<const std::vector<double>> fields);

struct ItoReport {
  double identity_residual = 0.0;  // sup_t |phi(X_t) - phi(X_0) - sum_i int Gamma_i phi(X) dW^i|
  std::vector<WordOrder> graded;   // Gamma_w phi(X_t) vs sum_v Gamma_{vw} phi(X_s) <W_st, e_v>
  bool graded_pass = true;
};

// x from solve_rde on a uniform partition.
ItoReport ito_check(const SmoothFunction& phi, const RdeSolution& x, const VectorFieldSystem& v);

// d^alpha (f o g)(x) = sum_k 1/k! sum D^k f(g(x))(d^b1 g(x), ..., d^bk g(x)) over deshuffles of alpha.
std::vector<double> faa_di_bruno(const SmoothFunction& f, const SmoothFunction& g, const Word& alpha,
                                 std::span<const double> x);

}  // namespace roughkit
