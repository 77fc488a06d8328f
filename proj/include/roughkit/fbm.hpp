#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "roughkit/rough_path.hpp"

namespace roughkit {

// Exact fBm covariance (s^2H + t^2H - |t-s|^2H) / 2.
double fbm_covariance(double hurst, double s, double t);

/// Samples fBm on the uniform grid {k T / (knots - 1)} through a cached
/// Cholesky factor of the covariance at the nonzero grid points.
class FbmSampler {
 public:
  FbmSampler(double hurst, int knots, double horizon = 1.0);

  double hurst() const { return hurst_; }
  int knots() const { return knots_; }
  const std::vector<double>& times() const { return times_; }

  // One path with d independent components; draws from rng.
  PiecewiseLinearPath sample(int d, std::mt19937_64& rng) const;

 private:
  double hurst_;
  int knots_;
  std::vector<double> times_;
  std::vector<double> factor_;  // lower-triangular, row-major (knots-1)^2
};

PiecewiseLinearPath sample_fbm(double hurst, int d, int knots, std::uint64_t seed, double horizon = 1.0);

}  // namespace roughkit
