#include "roughkit/controlled.hpp"

#include <algorithm>
#include <cmath>

#include "roughkit/errors.hpp"

namespace roughkit {

namespace {

// Index of the concatenation of the words at indices a (in sa) and b (in sb), within sc.
std::size_t concat_index(const TensorShape& sa, std::size_t a, const TensorShape& sb, std::size_t b,
                         const TensorShape& sc) {
  const int la = sa.length_of(a), lb = sb.length_of(b);
  const std::size_t ra = a - sa.offset(la), rb = b - sb.offset(lb);
  return sc.offset(la + lb) + ra * sc.power(lb) + rb;
}

void check_reference(const RoughPathPtr& ref, int order, const char* op) {
  if (!ref) throw InputError("controlled", op, "missing reference rough path");
  if (order < 1) throw InputError("controlled", op, "order must be at least 1");
  if (ref->level() < order - 1)
    throw InputError("controlled", op, "reference level " + std::to_string(ref->level()) + " too low for order " +
                                           std::to_string(order));
}

}  // namespace

ControlledPath::ControlledPath(RoughPathPtr reference, int order, int width, std::vector<double> times)
    : reference_(std::move(reference)), order_(order), width_(width), times_(std::move(times)) {
  check_reference(reference_, order, "ControlledPath");
  if (width < 1) throw InputError("controlled", "ControlledPath", "width must be positive");
  if (times_.empty()) throw InputError("controlled", "ControlledPath", "empty time grid");
  for (std::size_t j = 1; j < times_.size(); ++j)
    if (!(times_[j] > times_[j - 1])) throw InputError("controlled", "ControlledPath", "times must be increasing");
  if (times_.front() < reference_->times().front() || times_.back() > reference_->horizon())
    throw InputError("controlled", "ControlledPath", "times outside the reference horizon");
  shape_ = TensorShape(reference_->dim(), order - 1);
  data_.assign(times_.size() * shape_.size() * static_cast<std::size_t>(width), 0.0);
}

ControlledPath ControlledPath::constant(RoughPathPtr reference, int order, std::vector<double> times,
                                        std::vector<double> value) {
  ControlledPath x(std::move(reference), order, static_cast<int>(value.size()), std::move(times));
  for (std::size_t t = 0; t < x.size(); ++t) std::copy(value.begin(), value.end(), x.coeff(t, std::size_t{0}).begin());
  return x;
}

ControlledPath ControlledPath::linear_in_driver(RoughPathPtr reference, int order, std::vector<double> times,
                                                std::vector<double> x0, std::vector<std::vector<double>> matrix) {
  const int d = reference ? reference->dim() : 0;
  if (matrix.size() != x0.size()) throw InputError("controlled", "linear_in_driver", "matrix rows must match x0");
  for (const auto& row : matrix)
    if (static_cast<int>(row.size()) != d) throw InputError("controlled", "linear_in_driver", "matrix columns must match d");
  ControlledPath x(reference, order, static_cast<int>(x0.size()), std::move(times));
  for (std::size_t t = 0; t < x.size(); ++t) {
    const auto g = reference->value(x.times_[t]);
    auto p = x.coeff(t, std::size_t{0});
    for (std::size_t c = 0; c < x0.size(); ++c) {
      p[c] = x0[c];
      for (int j = 0; j < d; ++j) p[c] += matrix[c][static_cast<std::size_t>(j)] * g.at(1 + static_cast<std::size_t>(j));
    }
    if (order >= 2)
      for (int j = 0; j < d; ++j) {
        auto cj = x.coeff(t, 1 + static_cast<std::size_t>(j));
        for (std::size_t c = 0; c < x0.size(); ++c) cj[c] = matrix[c][static_cast<std::size_t>(j)];
      }
  }
  return x;
}

std::span<const double> ControlledPath::coeff(std::size_t ti, std::size_t word) const {
  const std::size_t w = static_cast<std::size_t>(width_);
  return {data_.data() + (ti * shape_.size() + word) * w, w};
}

std::span<double> ControlledPath::coeff(std::size_t ti, std::size_t word) {
  const std::size_t w = static_cast<std::size_t>(width_);
  return {data_.data() + (ti * shape_.size() + word) * w, w};
}

std::size_t ControlledPath::time_index(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t)
    throw InputError("controlled", "time_index", "time " + std::to_string(t) + " is not a sample time");
  return static_cast<std::size_t>(it - times_.begin());
}

std::vector<double> ControlledPath::remainder(std::size_t a, std::size_t b, std::size_t word,
                                              const GroupTensor& g) const {
  const auto& gs = g.tensor().shape();
  if (gs.level() < order_ - 1) throw InputError("controlled", "remainder", "increment level too low");
  std::vector<double> r(coeff(b, word).begin(), coeff(b, word).end());
  const int lw = shape_.length_of(word);
  for (int lv = 0; lv <= order_ - 1 - lw; ++lv) {
    for (std::size_t v = gs.offset(lv); v < gs.offset(lv) + gs.count(lv); ++v) {
      const double gv = g.at(v);
      if (gv == 0.0) continue;
      const auto xs = coeff(a, concat_index(gs, v, shape_, word, shape_));
      for (std::size_t c = 0; c < r.size(); ++c) r[c] -= xs[c] * gv;
    }
  }
  return r;
}

ControlledPath& ControlledPath::operator+=(const ControlledPath& o) {
  if (o.reference_ != reference_ || o.order_ != order_ || o.width_ != width_ || o.times_ != times_)
    throw InputError("controlled", "linear_combination", "paths are not compatible");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ControlledPath& ControlledPath::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

// ---------------------------------------------------------------- diagnostics

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

ControlledNorms controlled_norms(const ControlledPath& x) {
  if (x.size() < 2) throw InputError("controlled", "controlled_norms", "grid needs at least two points");
  const auto& shape = x.shape();
  ControlledNorms out;
  out.per_word.assign(shape.size(), 0.0);
  const auto& w = x.reference();
  for (std::size_t a = 0; a < x.size(); ++a) {
    for (std::size_t b = a + 1; b < x.size(); ++b) {
      const double h = x.times()[b] - x.times()[a];
      const auto g = w.increment(x.times()[a], x.times()[b]);
      for (std::size_t i = 0; i < shape.size(); ++i) {
        const double theta = (x.order() - shape.length_of(i)) * w.gamma();
        out.per_word[i] = std::max(out.per_word[i], max_abs(x.remainder(a, b, i, g)) / std::pow(h, theta));
      }
    }
  }
  double init = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    out.seminorm += out.per_word[i];
    const auto c = x.coeff(0, i);
    for (double v : c) init = std::max(init, std::abs(v));
  }
  out.norm = init + out.seminorm;
  return out;
}

std::vector<WordOrder> check_controlled(const ControlledPath& x) {
  if (x.size() < 2 * kMinWindows + 1) throw InputError("controlled", "check_controlled", "grid too small");
  const auto& shape = x.shape();
  const auto& w = x.reference();
  const std::size_t n = x.size() - 1;
  const auto strides = dyadic_strides(n);
  std::vector<std::vector<double>> defects(shape.size(), std::vector<double>(strides.size(), 0.0));
  std::vector<double> scales;
  for (std::size_t k = 0; k < strides.size(); ++k) {
    const std::size_t h = strides[k];
    scales.push_back(x.times()[h] - x.times()[0]);
    for (std::size_t a = 0; a + h <= n; ++a) {
      const auto g = w.increment(x.times()[a], x.times()[a + h]);
      for (std::size_t i = 0; i < shape.size(); ++i)
        defects[i][k] = std::max(defects[i][k], max_abs(x.remainder(a, a + h, i, g)));
    }
  }
  std::vector<WordOrder> out;
  for (std::size_t i = 0; i < shape.size(); ++i)
    out.push_back({shape.word(i), fit_order(scales, defects[i], (x.order() - shape.length_of(i)) * w.gamma())});
  return out;
}

// ---------------------------------------------------------------- compose

ControlledPath compose(const SmoothFunction& phi, const ControlledPath& x) {
  if (phi.n_in() != x.width()) throw InputError("controlled", "compose", "function input dimension must match width");
  const int n = x.order();
  if (phi.order() < n)
    throw OrderError("controlled", "compose",
                     "function declares order " + std::to_string(phi.order()) + " but " + std::to_string(n) +
                         " is required");
  ControlledPath out(x.reference_ptr(), n, phi.n_out(), x.times());
  const auto& shape = x.shape();
  for (std::size_t t = 0; t < x.size(); ++t) {
    const auto taylor = phi.taylor(x.primal(t), n - 1);
    for (std::size_t c = 0; c < taylor.size(); ++c) out.coeff(t, std::size_t{0})[c] = taylor[c].value();
    for (std::size_t i = 1; i < shape.size(); ++i) {
      const Word word = shape.word(i);
      auto dst = out.coeff(t, i);
      for (int k = 1; k <= static_cast<int>(word.size()); ++k) {
        for (const auto& e : deshuffles(word, k).entries) {
          std::vector<std::span<const double>> dirs;
          for (const auto& u : e.parts) dirs.push_back(x.coeff(t, u));
          const auto v = multilinear(taylor, dirs);
          const double s = e.multiplicity / factorial(k);
          for (std::size_t c = 0; c < v.size(); ++c) dst[c] += s * v[c];
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- rough integral

namespace {

// sum_{|w| <= q} <e_w*, X_a> <g, e_{wi}>
std::vector<double> compensated_term(const ControlledPath& x, std::size_t a, int letter, int q, const GroupTensor& g) {
  const auto& xs = x.shape();
  const auto& gs = g.tensor().shape();
  const std::size_t d = static_cast<std::size_t>(x.dim());
  std::vector<double> out(static_cast<std::size_t>(x.width()), 0.0);
  for (std::size_t w = 0; w < xs.offset(q + 1); ++w) {
    const int lw = xs.length_of(w);
    const std::size_t wi = gs.offset(lw + 1) + (w - xs.offset(lw)) * d + static_cast<std::size_t>(letter - 1);
    const double gv = g.at(wi);
    if (gv == 0.0) continue;
    const auto c = x.coeff(a, w);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += c[k] * gv;
  }
  return out;
}

}  // namespace

RoughIntegral rough_integral(const ControlledPath& x, int letter, std::span<const double> partition) {
  const auto& w = x.reference();
  if (letter < 1 || letter > w.dim()) throw InputError("controlled", "rough_integral", "letter out of range");
  if (partition.size() < 2) throw InputError("controlled", "rough_integral", "empty partition");
  const int n_gamma = default_level(w.gamma());
  if (x.order() < n_gamma)
    throw OrderError("controlled", "rough_integral",
                     "integration needs order >= " + std::to_string(n_gamma) + ", got " + std::to_string(x.order()));
  const int q = std::min(x.order() - 1, w.level() - 1);
  if (q < 0) throw OrderError("controlled", "rough_integral", "reference level too low");
  RoughIntegral out;
  out.sum_order = q;
  out.times.assign(partition.begin(), partition.end());
  std::vector<std::size_t> idx;
  for (double t : partition) idx.push_back(x.time_index(t));
  for (std::size_t j = 1; j < idx.size(); ++j)
    if (!(idx[j] > idx[j - 1])) throw InputError("controlled", "rough_integral", "partition must be increasing");

  const std::size_t n = static_cast<std::size_t>(x.width());
  out.values.assign(partition.size(), std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
    const auto g = w.increment(partition[j], partition[j + 1]);
    const auto term = compensated_term(x, idx[j], letter, q, g);
    for (std::size_t c = 0; c < n; ++c) out.values[j + 1][c] = out.values[j][c] + term[c];
  }

  out.lift = ControlledPath(x.reference_ptr(), q + 2, x.width(), out.times);
  const auto& ls = out.lift.shape();
  const auto& xs = x.shape();
  const std::size_t d = static_cast<std::size_t>(x.dim());
  for (std::size_t j = 0; j < partition.size(); ++j) {
    std::copy(out.values[j].begin(), out.values[j].end(), out.lift.coeff(j, std::size_t{0}).begin());
    for (std::size_t wi = 0; wi < xs.offset(q + 1); ++wi) {
      const int lw = xs.length_of(wi);
      const std::size_t dst = ls.offset(lw + 1) + (wi - xs.offset(lw)) * d + static_cast<std::size_t>(letter - 1);
      const auto src = x.coeff(idx[j], wi);
      std::copy(src.begin(), src.end(), out.lift.coeff(j, dst).begin());
    }
  }
  return out;
}

RoughIntegral rough_integral(const ControlledPath& x, int letter) { return rough_integral(x, letter, x.times()); }

OrderFit integral_remainder_order(const ControlledPath& x, int letter, const RoughIntegral& integral) {
  const auto& w = x.reference();
  const auto& p = integral.times;
  std::vector<std::size_t> idx;
  for (double t : p) idx.push_back(x.time_index(t));
  const double expected = (integral.sum_order + 2) * w.gamma();
  return dyadic_order(
      p,
      [&](std::size_t a, std::size_t b) {
        const auto g = w.increment(p[a], p[b]);
        const auto term = compensated_term(x, idx[a], letter, integral.sum_order, g);
        double m = 0.0;
        for (std::size_t c = 0; c < term.size(); ++c)
          m = std::max(m, std::abs(integral.values[b][c] - integral.values[a][c] - term[c]));
        return m;
      },
      expected);
}

}  // namespace roughkit
