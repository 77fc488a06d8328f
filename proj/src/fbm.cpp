#include "roughkit/fbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>

#include "roughkit/errors.hpp"

namespace roughkit {

double fbm_covariance(double hurst, double s, double t) {
  const double h2 = 2 * hurst;
  return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

FbmSampler::FbmSampler(double hurst, int knots, double horizon) : hurst_(hurst), knots_(knots) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw InputError("roughpath", "sample_fbm", "Hurst index must lie in (0,1)");
  if (knots < 2) throw InputError("roughpath", "sample_fbm", "need at least 2 knots");
  if (!(horizon > 0.0)) throw InputError("roughpath", "sample_fbm", "horizon must be positive");
  const int m = knots - 1;
  for (int k = 0; k <= m; ++k) times_.push_back(k == m ? horizon : horizon * k / m);
  Eigen::MatrixXd cov(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) cov(i, j) = fbm_covariance(hurst, times_[i + 1], times_[j + 1]);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalError("roughpath", "sample_fbm", "Cholesky factorization of the fBm covariance failed");
  const Eigen::MatrixXd l = llt.matrixL();
  factor_.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) factor_[static_cast<std::size_t>(i * m + j)] = l(i, j);
}

PiecewiseLinearPath FbmSampler::sample(int d, std::mt19937_64& rng) const {
  if (d < 1) throw InputError("roughpath", "sample_fbm", "dimension must be positive");
  const std::size_t m = static_cast<std::size_t>(knots_ - 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> values(m + 1, std::vector<double>(static_cast<std::size_t>(d), 0.0));
  std::vector<double> z(m);
  for (int c = 0; c < d; ++c) {
    for (auto& v : z) v = normal(rng);
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j <= i; ++j) s += factor_[i * m + j] * z[j];
      values[i + 1][static_cast<std::size_t>(c)] = s;
    }
  }
  return PiecewiseLinearPath(times_, std::move(values));
}

PiecewiseLinearPath sample_fbm(double hurst, int d, int knots, std::uint64_t seed, double horizon) {
  std::mt19937_64 rng(seed);
  return FbmSampler(hurst, knots, horizon).sample(d, rng);
}

}  // namespace roughkit
