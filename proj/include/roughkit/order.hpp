#pragma once

#include <functional>
#include <span>
#include <vector>

namespace roughkit {

inline constexpr double kSlopeTolerance = 0.15;
inline constexpr double kDefectFloor = 1e-12;

/// Least-squares slope of log(defect) against log(scale). Defects at or below
/// the floor carry no order information and are dropped; with fewer than two
/// informative scales the slope is +inf (the defect vanishes).
struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double expected = 0.0;
  double tolerance = kSlopeTolerance;
  std::vector<double> scales;
  std::vector<double> defects;
  int used = 0;
  bool pass = false;  // slope >= expected - tolerance

  bool within(double tol) const;  // |slope - expected| <= tol
};

OrderFit fit_order(std::span<const double> scales, std::span<const double> defects, double expected,
                   double tolerance = kSlopeTolerance, double floor = kDefectFloor);

// Disjoint windows of the coarsest stride; fewer makes the max a poor scale estimate.
inline constexpr std::size_t kMinWindows = 8;

// Strides 1, 2, 4, ... up to n/8 on an index grid of n+1 points.
std::vector<std::size_t> dyadic_strides(std::size_t n);

/// For every dyadic stride h over the uniform grid `times`, the maximum of
/// defect(i, i + h) over all admissible i; then fit_order on the result.
OrderFit dyadic_order(std::span<const double> times, const std::function<double(std::size_t, std::size_t)>& defect,
                      double expected, double tolerance = kSlopeTolerance, double floor = kDefectFloor);

// Several defect series in one pass over the dyadic pairs; defects(i, j, out)
// writes one value per series.
std::vector<OrderFit> dyadic_orders(std::span<const double> times, std::size_t series,
                                    const std::function<void(std::size_t, std::size_t, std::span<double>)>& defects,
                                    std::span<const double> expected, double tolerance = kSlopeTolerance,
                                    double floor = kDefectFloor);

}  // namespace roughkit
