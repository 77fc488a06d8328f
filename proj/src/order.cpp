#include "roughkit/order.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "roughkit/errors.hpp"

namespace roughkit {

bool OrderFit::within(double tol) const { return std::abs(slope - expected) <= tol; }

OrderFit fit_order(std::span<const double> scales, std::span<const double> defects, double expected, double tolerance,
                   double floor) {
  if (scales.size() != defects.size()) throw InputError("controlled", "fit_order", "scales and defects differ in size");
  OrderFit fit;
  fit.expected = expected;
  fit.tolerance = tolerance;
  fit.scales.assign(scales.begin(), scales.end());
  fit.defects.assign(defects.begin(), defects.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!std::isfinite(defects[i])) {
      fit.slope = -std::numeric_limits<double>::infinity();
      fit.used = n;
      fit.pass = false;
      return fit;
    }
    if (!(defects[i] > floor) || !(scales[i] > 0)) continue;
    const double x = std::log(scales[i]), y = std::log(defects[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  fit.used = n;
  if (n < 2) {
    fit.slope = std::numeric_limits<double>::infinity();
    fit.pass = true;
    return fit;
  }
  const double den = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.pass = fit.slope >= expected - tolerance;
  return fit;
}

std::vector<std::size_t> dyadic_strides(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t h = 1; kMinWindows * h <= n; h *= 2) out.push_back(h);
  return out;
}

OrderFit dyadic_order(std::span<const double> times, const std::function<double(std::size_t, std::size_t)>& defect,
                      double expected, double tolerance, double floor) {
  if (times.size() < 2 * kMinWindows + 1) throw InputError("controlled", "dyadic_order", "grid too small");
  const std::size_t n = times.size() - 1;
  std::vector<double> scales, defects;
  for (std::size_t h : dyadic_strides(n)) {
    double worst = 0.0;
    for (std::size_t i = 0; i + h <= n; ++i) worst = std::max(worst, defect(i, i + h));
    scales.push_back(times[h] - times[0]);
    defects.push_back(worst);
  }
  return fit_order(scales, defects, expected, tolerance, floor);
}

std::vector<OrderFit> dyadic_orders(std::span<const double> times, std::size_t series,
                                    const std::function<void(std::size_t, std::size_t, std::span<double>)>& defects,
                                    std::span<const double> expected, double tolerance, double floor) {
  if (times.size() < 2 * kMinWindows + 1) throw InputError("controlled", "dyadic_orders", "grid too small");
  if (expected.size() != series) throw InputError("controlled", "dyadic_orders", "one expected order per series");
  const std::size_t n = times.size() - 1;
  const auto strides = dyadic_strides(n);
  std::vector<double> scales;
  std::vector<std::vector<double>> worst(series, std::vector<double>(strides.size(), 0.0));
  std::vector<double> buf(series);
  for (std::size_t k = 0; k < strides.size(); ++k) {
    const std::size_t h = strides[k];
    scales.push_back(times[h] - times[0]);
    for (std::size_t i = 0; i + h <= n; ++i) {
      std::fill(buf.begin(), buf.end(), 0.0);
      defects(i, i + h, buf);
      for (std::size_t q = 0; q < series; ++q) {
        // NaN must survive the max so the fit reports it
        if (!(buf[q] <= worst[q][k])) worst[q][k] = std::isnan(worst[q][k]) ? worst[q][k] : buf[q];
      }
    }
  }
  std::vector<OrderFit> out;
  for (std::size_t q = 0; q < series; ++q) out.push_back(fit_order(scales, worst[q], expected[q], tolerance, floor));
  return out;
}

}  // namespace roughkit
