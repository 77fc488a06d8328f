#pragma once

#include <optional>
#include <span>
#include <vector>

#include "roughkit/algebra.hpp"

namespace roughkit {

class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath() = default;
  // values[j] is the point at times[j]
  PiecewiseLinearPath(std::vector<double> times, std::vector<std::vector<double>> values);

  int dim() const { return static_cast<int>(values_.front().size()); }
  std::size_t knots() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::vector<double>>& values() const { return values_; }
  double horizon() const { return times_.back(); }
  std::vector<double> operator()(double t) const;

 private:
  std::vector<double> times_;
  std::vector<std::vector<double>> values_;
};

/// A geometric rough path sampled at `times`. Between consecutive times the
/// path is the geodesic exp(theta * log W_{t_j t_{j+1}}), which for lifts of
/// piecewise-linear paths is the exact signature of the sub-segment.
class GeometricRoughPath {
 public:
  GeometricRoughPath() = default;

  static GeometricRoughPath from_basepoints(double gamma, std::vector<double> times, std::vector<GroupTensor> basepoints);

  double gamma() const { return gamma_; }
  int level() const { return level_; }
  int dim() const { return dim_; }
  const std::vector<double>& times() const { return times_; }
  double horizon() const { return times_.back(); }
  const std::optional<PiecewiseLinearPath>& generator() const { return generator_; }

  // W_{st}
  GroupTensor increment(double s, double t) const;
  // W_{0t}
  GroupTensor value(double t) const { return increment(times_.front(), t); }
  std::vector<GroupTensor> basepoints() const;

  // Re-lift at another level: exact for generated paths, truncation only otherwise.
  GeometricRoughPath with_level(int level) const;

 private:
  friend GeometricRoughPath lift_pl(const PiecewiseLinearPath&, double, int);
  void build_tree();
  GroupTensor segment_power(std::size_t j, double theta) const;
  GroupTensor range_product(std::size_t a, std::size_t b) const;

  double gamma_ = 0.5;
  int level_ = 2;
  int dim_ = 1;
  std::vector<double> times_;
  std::vector<TruncatedTensor> logs_;  // per segment
  std::vector<GroupTensor> tree_;      // segment products, heap layout
  std::size_t leaves_ = 0;
  std::optional<PiecewiseLinearPath> generator_;
};

int default_level(double gamma);

// level <= 0 selects the default floor(1/gamma).
GeometricRoughPath lift_pl(const PiecewiseLinearPath& path, double gamma, int level = 0);

struct HolderEntry {
  Word word;
  double constant = 0.0;
};
std::vector<HolderEntry> holder_diagnostic(const GeometricRoughPath& w, std::span<const double> grid);

}  // namespace roughkit
