#pragma once

#include <memory>
#include <span>
#include <vector>

#include "roughkit/algebra.hpp"
#include "roughkit/order.hpp"
#include "roughkit/rough_path.hpp"
#include "roughkit/smooth_function.hpp"

namespace roughkit {

using RoughPathPtr = std::shared_ptr<const GeometricRoughPath>;

/// Sampled controlled rough path of order N: at each sample time the
/// Gubinelli coefficients <e_w*, X_t> in R^width for all |w| <= N-1.
class ControlledPath {
 public:
  ControlledPath() = default;
  // All coefficients zero.
  ControlledPath(RoughPathPtr reference, int order, int width, std::vector<double> times);

  static ControlledPath constant(RoughPathPtr reference, int order, std::vector<double> times, std::vector<double> value);
  // X_t = x0 + A (W_0t projected to level one): coefficient of e_j is column j of A.
  static ControlledPath linear_in_driver(RoughPathPtr reference, int order, std::vector<double> times,
                                        std::vector<double> x0, std::vector<std::vector<double>> matrix);

  const GeometricRoughPath& reference() const { return *reference_; }
  const RoughPathPtr& reference_ptr() const { return reference_; }
  int order() const { return order_; }
  int width() const { return width_; }
  int dim() const { return shape_.dim(); }
  // words of length <= order - 1
  const TensorShape& shape() const { return shape_; }
  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }

  std::span<const double> coeff(std::size_t ti, std::size_t word) const;
  std::span<double> coeff(std::size_t ti, std::size_t word);
  std::span<const double> coeff(std::size_t ti, const Word& w) const { return coeff(ti, shape_.index(w)); }
  std::span<double> coeff(std::size_t ti, const Word& w) { return coeff(ti, shape_.index(w)); }
  std::span<const double> primal(std::size_t ti) const { return coeff(ti, std::size_t{0}); }
  // Index of an exact sample time, throws if absent.
  std::size_t time_index(double t) const;

  // <e_w*, X_t> - sum_v <e_{vw}*, X_s><W_st, e_v> for sample indices a < b.
  std::vector<double> remainder(std::size_t a, std::size_t b, std::size_t word, const GroupTensor& increment) const;

  ControlledPath& operator+=(const ControlledPath& o);
  ControlledPath& operator*=(double s);
  friend ControlledPath operator+(ControlledPath a, const ControlledPath& b) { return a += b; }
  friend ControlledPath operator*(double s, ControlledPath a) { return a *= s; }

 private:
  RoughPathPtr reference_;
  int order_ = 1;
  int width_ = 1;
  TensorShape shape_;
  std::vector<double> times_;
  std::vector<double> data_;  // [time][word][component]
};

struct ControlledNorms {
  std::vector<double> per_word;  // sup of the scaled remainder, canonical word order
  double seminorm = 0.0;         // sum over words
  double norm = 0.0;             // max |<e_w*, X_0>| + seminorm
};

// Grid version of the seminorm and norm, over all sample pairs s < t.
ControlledNorms controlled_norms(const ControlledPath& x);

struct WordOrder {
  Word word;
  OrderFit fit;
};

// Per-word dyadic regression of the remainder against |t - s|; expects a uniform grid.
std::vector<WordOrder> check_controlled(const ControlledPath& x);

// <e_w*, Phi(X)_t> = sum_k 1/k! sum over deshuffles of w, weighted by multiplicity,
// of D^k phi(X_t)(<e_u1*, X_t>, ..., <e_uk*, X_t>)
ControlledPath compose(const SmoothFunction& phi, const ControlledPath& x);

struct RoughIntegral {
  std::vector<double> times;                // partition
  std::vector<std::vector<double>> values;  // int_0^t X dW^i at each partition point
  ControlledPath lift;
  int sum_order = 0;  // largest |w| in the compensated sums
};

// Compensated Riemann sums over the partition (a subset of X's sample times).
RoughIntegral rough_integral(const ControlledPath& x, int letter, std::span<const double> partition);
RoughIntegral rough_integral(const ControlledPath& x, int letter);

// Regression of |int_s^t X dW^i - sum_w <e_w*, X_s><W_st, e_wi>| over dyadic partition strides.
OrderFit integral_remainder_order(const ControlledPath& x, int letter, const RoughIntegral& integral);

}  // namespace roughkit
