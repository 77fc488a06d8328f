#include "roughkit/rough_path.hpp"

#include <algorithm>
#include <cmath>

#include "roughkit/errors.hpp"

namespace roughkit {

namespace {

void check_times(const std::vector<double>& times, const char* op) {
  if (times.size() < 2) throw InputError("roughpath", op, "need at least two sample times");
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!std::isfinite(times[j])) throw InputError("roughpath", op, "non-finite time");
    if (j > 0 && !(times[j] > times[j - 1]))
      throw InputError("roughpath", op, "times must be strictly increasing (index " + std::to_string(j) + ")");
  }
}

void check_gamma(double gamma, const char* op) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InputError("roughpath", op, "gamma must lie in (0,1]");
}

}  // namespace

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> times, std::vector<std::vector<double>> values)
    : times_(std::move(times)), values_(std::move(values)) {
  check_times(times_, "PiecewiseLinearPath");
  if (times_.front() != 0.0) throw InputError("roughpath", "PiecewiseLinearPath", "first time must be 0");
  if (values_.size() != times_.size()) throw InputError("roughpath", "PiecewiseLinearPath", "one value per time required");
  const std::size_t d = values_.front().size();
  if (d == 0) throw InputError("roughpath", "PiecewiseLinearPath", "empty values");
  for (const auto& v : values_) {
    if (v.size() != d) throw InputError("roughpath", "PiecewiseLinearPath", "inconsistent dimension");
    for (double c : v)
      if (!std::isfinite(c)) throw InputError("roughpath", "PiecewiseLinearPath", "non-finite value");
  }
}

std::vector<double> PiecewiseLinearPath::operator()(double t) const {
  if (t < times_.front() || t > times_.back()) throw InputError("roughpath", "evaluate", "time outside [0,T]");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t j = static_cast<std::size_t>(it - times_.begin());
  j = std::min(j, times_.size() - 1);
  const std::size_t i = j - 1;
  const double th = (t - times_[i]) / (times_[j] - times_[i]);
  std::vector<double> out(values_[i].size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = values_[i][c] + th * (values_[j][c] - values_[i][c]);
  return out;
}

int default_level(double gamma) {
  check_gamma(gamma, "default_level");
  return static_cast<int>(std::floor(1.0 / gamma + 1e-12));
}

GeometricRoughPath lift_pl(const PiecewiseLinearPath& path, double gamma, int level) {
  check_gamma(gamma, "lift_pl");
  if (level <= 0) level = default_level(gamma);
  GeometricRoughPath w;
  w.gamma_ = gamma;
  w.level_ = level;
  w.dim_ = path.dim();
  w.times_ = path.times();
  const auto& v = path.values();
  std::vector<double> dx(static_cast<std::size_t>(w.dim_));
  for (std::size_t j = 0; j + 1 < v.size(); ++j) {
    for (std::size_t c = 0; c < dx.size(); ++c) dx[c] = v[j + 1][c] - v[j][c];
    w.logs_.push_back(TruncatedTensor::level_one(w.dim_, level, dx));
  }
  w.generator_ = path;
  w.build_tree();
  return w;
}

GeometricRoughPath GeometricRoughPath::from_basepoints(double gamma, std::vector<double> times,
                                                       std::vector<GroupTensor> basepoints) {
  check_gamma(gamma, "from_basepoints");
  check_times(times, "from_basepoints");
  if (basepoints.size() != times.size()) throw InputError("roughpath", "from_basepoints", "one basepoint per time required");
  GeometricRoughPath w;
  w.gamma_ = gamma;
  w.level_ = basepoints.front().level();
  w.dim_ = basepoints.front().dim();
  w.times_ = std::move(times);
  if (max_abs_diff(basepoints.front().tensor(), TruncatedTensor::unit(w.dim_, w.level_)) > 1e-12)
    throw InputError("roughpath", "from_basepoints", "first basepoint must be the unit");
  for (std::size_t j = 0; j < basepoints.size(); ++j) {
    const auto& b = basepoints[j];
    if (b.dim() != w.dim_ || b.level() != w.level_)
      throw InputError("roughpath", "from_basepoints", "basepoints have inconsistent shapes");
    GroupTensor::checked(b.tensor(), 1e-10);
  }
  for (std::size_t j = 0; j + 1 < basepoints.size(); ++j)
    w.logs_.push_back((basepoints[j].inverse() * basepoints[j + 1]).log());
  w.build_tree();
  return w;
}

void GeometricRoughPath::build_tree() {
  const std::size_t m = logs_.size();
  leaves_ = 1;
  while (leaves_ < m) leaves_ *= 2;
  tree_.assign(2 * leaves_, GroupTensor(dim_, level_));
  for (std::size_t j = 0; j < m; ++j) tree_[leaves_ + j] = GroupTensor::exp_lie(logs_[j]);
  for (std::size_t k = leaves_ - 1; k >= 1; --k) tree_[k] = tree_[2 * k] * tree_[2 * k + 1];
}

GroupTensor GeometricRoughPath::segment_power(std::size_t j, double theta) const {
  if (theta == 1.0) return tree_[leaves_ + j];
  if (theta == 0.0) return GroupTensor(dim_, level_);
  return GroupTensor::exp_lie(logs_[j] * theta);
}

GroupTensor GeometricRoughPath::range_product(std::size_t a, std::size_t b) const {
  GroupTensor left(dim_, level_), right(dim_, level_);
  std::size_t lo = a + leaves_, hi = b + leaves_;
  while (lo < hi) {
    if (lo & 1) left = left * tree_[lo++];
    if (hi & 1) right = tree_[--hi] * right;
    lo /= 2;
    hi /= 2;
  }
  return left * right;
}

GroupTensor GeometricRoughPath::increment(double s, double t) const {
  if (times_.empty()) throw InputError("roughpath", "increment", "empty rough path");
  if (!(s >= times_.front() && t <= times_.back()))
    throw InputError("roughpath", "increment", "times outside [0,T]");
  if (s > t) throw InputError("roughpath", "increment", "s > t");
  if (s == t) return GroupTensor(dim_, level_);
  const std::size_t m = logs_.size();
  // segment i holds s with t_i <= s < t_{i+1}; segment k holds t with t_k < t <= t_{k+1}
  std::size_t i = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), s) - times_.begin()) - 1;
  i = std::min(i, m - 1);
  std::size_t k = static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), t) - times_.begin());
  k = std::min(std::max<std::size_t>(k, 1), m) - 1;
  auto len = [&](std::size_t j) { return times_[j + 1] - times_[j]; };
  if (i == k) {
    if (s == times_[i] && t == times_[i + 1]) return tree_[leaves_ + i];
    return segment_power(i, (t - s) / len(i));
  }
  const GroupTensor left = s == times_[i] ? tree_[leaves_ + i] : segment_power(i, (times_[i + 1] - s) / len(i));
  const GroupTensor right = t == times_[k + 1] ? tree_[leaves_ + k] : segment_power(k, (t - times_[k]) / len(k));
  return left * range_product(i + 1, k) * right;
}

std::vector<GroupTensor> GeometricRoughPath::basepoints() const {
  std::vector<GroupTensor> out{GroupTensor(dim_, level_)};
  for (std::size_t j = 0; j < logs_.size(); ++j) out.push_back(out.back() * tree_[leaves_ + j]);
  return out;
}

GeometricRoughPath GeometricRoughPath::with_level(int level) const {
  if (level == level_) return *this;
  if (generator_) return lift_pl(*generator_, gamma_, level);
  if (level > level_)
    throw InputError("roughpath", "with_level", "a sampled rough path cannot be extended above its level");
  GeometricRoughPath w = *this;
  w.level_ = level;
  for (auto& l : w.logs_) l = l.truncated(level);
  w.build_tree();
  return w;
}

std::vector<HolderEntry> holder_diagnostic(const GeometricRoughPath& w, std::span<const double> grid) {
  const TensorShape shape(w.dim(), w.level());
  std::vector<HolderEntry> out;
  for (std::size_t idx = 1; idx < shape.size(); ++idx) out.push_back({shape.word(idx), 0.0});
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = a + 1; b < grid.size(); ++b) {
      const double h = grid[b] - grid[a];
      if (!(h > 0)) continue;
      const auto g = w.increment(grid[a], grid[b]);
      for (std::size_t idx = 1; idx < shape.size(); ++idx) {
        const double r = std::abs(g.at(idx)) / std::pow(h, shape.length_of(idx) * w.gamma());
        out[idx - 1].constant = std::max(out[idx - 1].constant, r);
      }
    }
  }
  return out;
}

}  // namespace roughkit
