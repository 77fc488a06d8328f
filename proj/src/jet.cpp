#include "roughkit/jet.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <shared_mutex>

#include "roughkit/algebra.hpp"
#include "roughkit/errors.hpp"

namespace roughkit {

namespace {

void compositions(int vars, int total, std::vector<int>& current, int pos, std::vector<std::vector<int>>& out) {
  if (pos == vars - 1) {
    current[static_cast<std::size_t>(pos)] = total;
    out.push_back(current);
    return;
  }
  for (int a = total; a >= 0; --a) {
    current[static_cast<std::size_t>(pos)] = a;
    compositions(vars, total - a, current, pos + 1, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int vars, int order) : vars_(vars), order_(order) {
  if (vars < 1 || order < 0) throw InputError("jet", "MonomialBasis", "invalid shape");
  std::vector<std::vector<int>> all;
  std::vector<int> current(static_cast<std::size_t>(vars), 0);
  for (int p = 0; p <= order; ++p) {
    compositions(vars, p, current, 0, all);
    degree_end_.push_back(all.size());
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    exponents_.insert(exponents_.end(), all[i].begin(), all[i].end());
    int deg = 0;
    double mf = 1.0;
    for (int a : all[i]) {
      deg += a;
      mf *= factorial(a);
    }
    degrees_.push_back(deg);
    multi_factorial_.push_back(mf);
    lookup_.emplace(all[i], i);
  }
  std::vector<int> tmp(static_cast<std::size_t>(vars));
  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = 0; b < all.size(); ++b) {
      if (degrees_[a] + degrees_[b] > order) continue;
      for (int v = 0; v < vars; ++v)
        tmp[static_cast<std::size_t>(v)] = all[a][static_cast<std::size_t>(v)] + all[b][static_cast<std::size_t>(v)];
      products_.push_back({a, b, lookup_.at(tmp)});
    }
  }
  std::stable_sort(products_.begin(), products_.end(), [](const Product& x, const Product& y) { return x.out < y.out; });
  derivatives_.resize(static_cast<std::size_t>(vars));
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (int v = 0; v < vars; ++v) {
      if (all[i][static_cast<std::size_t>(v)] == 0) continue;
      tmp = all[i];
      --tmp[static_cast<std::size_t>(v)];
      derivatives_[static_cast<std::size_t>(v)].push_back(
          {i, lookup_.at(tmp), static_cast<double>(all[i][static_cast<std::size_t>(v)])});
    }
  }
  parent_.assign(all.size(), 0);
  parent_var_.assign(all.size(), -1);
  for (std::size_t i = 1; i < all.size(); ++i) {
    for (int v = 0; v < vars; ++v) {
      if (all[i][static_cast<std::size_t>(v)] == 0) continue;
      tmp = all[i];
      --tmp[static_cast<std::size_t>(v)];
      parent_[i] = lookup_.at(tmp);
      parent_var_[i] = v;
      break;
    }
  }
}

std::size_t MonomialBasis::index(std::span<const int> exps) const {
  auto it = lookup_.find(std::vector<int>(exps.begin(), exps.end()));
  if (it == lookup_.end()) throw InputError("jet", "index", "monomial outside basis");
  return it->second;
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int vars, int order) {
  static std::shared_mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>> cache;
  const auto key = std::make_pair(vars, order);
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto basis = std::make_shared<const MonomialBasis>(vars, order);
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(basis));
  return it->second;
}

// ---------------------------------------------------------------- Jet

Jet::Jet(BasisPtr basis, int order)
    : basis_(std::move(basis)), order_(std::min(order, basis_->order())), coeffs_(basis_->size(), 0.0) {}

Jet Jet::constant(BasisPtr basis, double value) {
  const int order = basis->order();
  Jet j(std::move(basis), order);
  j.coeffs_[0] = value;
  return j;
}

Jet Jet::variable(BasisPtr basis, int v, double value) {
  Jet j = constant(std::move(basis), value);
  if (j.basis_->order() >= 1) j.coeffs_[1 + static_cast<std::size_t>(v)] = 1.0;
  return j;
}

double Jet::partial(std::span<const int> exps) const {
  const std::size_t i = basis_->index(exps);
  if (basis_->degree(i) > order_) throw OrderError("jet", "partial", "derivative beyond jet order");
  return coeffs_[i] * basis_->multi_factorial(i);
}

void Jet::zero_above_order() {
  if (order_ < 0) {
    std::fill(coeffs_.begin(), coeffs_.end(), 0.0);
    return;
  }
  if (order_ < basis_->order())
    std::fill(coeffs_.begin() + static_cast<std::ptrdiff_t>(basis_->degree_end(order_)), coeffs_.end(), 0.0);
}

Jet Jet::derivative(int v) const {
  Jet out(basis_, order_ - 1);
  if (order_ == 0) {
    out.order_ = -1;
    return out;
  }
  for (const auto& s : basis_->derivative(v)) out.coeffs_[s.to] += s.factor * coeffs_[s.from];
  out.zero_above_order();
  return out;
}

Jet Jet::truncated(int order) const {
  Jet out = *this;
  out.order_ = std::min(order_, order);
  out.zero_above_order();
  return out;
}

Jet Jet::in_basis(BasisPtr basis) const {
  if (basis->vars() != basis_->vars()) throw InputError("jet", "in_basis", "variable count mismatch");
  Jet out(basis, order_);
  const std::size_t limit = std::min(out.coeffs_.size(), basis_->degree_end(std::min(order_, basis_->order())));
  std::copy(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(std::min(limit, basis->degree_end(out.order_))),
            out.coeffs_.begin());
  return out;
}

Jet Jet::without_constant() const {
  Jet out = *this;
  out.coeffs_[0] = 0.0;
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (coeffs_.empty()) return *this = o;
  order_ = std::min(order_, o.order_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  zero_above_order();
  return *this;
}

Jet& Jet::operator-=(const Jet& o) { return add_scaled(o, -1.0); }

Jet& Jet::operator*=(double s) {
  for (double& c : coeffs_) c *= s;
  return *this;
}

Jet& Jet::add_scaled(const Jet& o, double s) {
  if (coeffs_.empty()) {
    *this = o;
    return *this *= s;
  }
  order_ = std::min(order_, o.order_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
  zero_above_order();
  return *this;
}

Jet& Jet::add_product(const Jet& a, const Jet& b, double s) {
  const int order = std::min(a.order_, b.order_);
  if (coeffs_.empty()) *this = Jet(a.basis_, order);
  order_ = std::min(order_, order);
  if (order_ < 0) return *this;
  const std::size_t limit = basis_->degree_end(order_);
  const double* ac = a.coeffs_.data();
  const double* bc = b.coeffs_.data();
  for (const auto& p : basis_->products()) {
    if (p.out >= limit) break;
    const double x = ac[p.a];
    if (x == 0.0) continue;
    coeffs_[p.out] += s * x * bc[p.b];
  }
  zero_above_order();
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(a.basis_, std::min(a.order_, b.order_));
  return out.add_product(a, b);
}

namespace {

// sum_k c_k delta^k / k!, delta = x - x(0), with c_k supplied per k
template <class Coef>
Jet series(const Jet& x, Coef coef) {
  const Jet delta = x.without_constant();
  Jet out = Jet::constant(x.basis(), coef(0));
  out = out.truncated(x.order());
  Jet power = Jet::constant(x.basis(), 1.0).truncated(x.order());
  for (int k = 1; k <= x.order(); ++k) {
    power = power * delta;
    out.add_scaled(power, coef(k) / factorial(k));
  }
  return out;
}

}  // namespace

Jet jet_sin(const Jet& x) {
  const double c = x.value();
  return series(x, [c](int k) { return std::sin(c + k * std::numbers::pi / 2); });
}

Jet jet_cos(const Jet& x) {
  const double c = x.value();
  return series(x, [c](int k) { return std::cos(c + k * std::numbers::pi / 2); });
}

Jet jet_exp(const Jet& x) {
  const double e = std::exp(x.value());
  return series(x, [e](int) { return e; });
}

Jet taylor_substitute(const Jet& taylor, std::span<const Jet> args) {
  std::vector<Jet> single{taylor};
  auto res = taylor_substitute(std::span<const Jet>(single), args);
  return res.front();
}

std::vector<Jet> taylor_substitute(std::span<const Jet> taylor, std::span<const Jet> args) {
  if (taylor.empty()) return {};
  const MonomialBasis& tb = *taylor.front().basis();
  if (static_cast<std::size_t>(tb.vars()) != args.size())
    throw InputError("jet", "taylor_substitute", "argument count does not match variable count");
  const BasisPtr& out_basis = args.front().basis();
  int order = out_basis->order();
  for (const auto& a : args) order = std::min(order, a.order());
  int torder = tb.order();
  for (const auto& t : taylor) torder = std::min(torder, t.order());
  order = std::min(order, torder);

  std::vector<Jet> deltas;
  deltas.reserve(args.size());
  for (const auto& a : args) deltas.push_back(a.without_constant().truncated(order));

  const std::size_t limit = tb.degree_end(std::min(order, tb.order()));
  std::vector<Jet> powers;
  powers.reserve(limit);
  powers.push_back(Jet::constant(out_basis, 1.0).truncated(order));
  for (std::size_t i = 1; i < limit; ++i)
    powers.push_back(powers[tb.parent(i)] * deltas[static_cast<std::size_t>(tb.parent_var(i))]);

  std::vector<Jet> out;
  out.reserve(taylor.size());
  for (const auto& t : taylor) {
    Jet r(out_basis, order);
    for (std::size_t i = 0; i < limit; ++i) {
      const double c = t.coeff(i);
      if (c != 0.0) r.add_scaled(powers[i], c);
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Jet> identity_jets(std::span<const double> x, int order) {
  auto basis = MonomialBasis::get(static_cast<int>(x.size()), order);
  std::vector<Jet> out;
  out.reserve(x.size());
  for (std::size_t v = 0; v < x.size(); ++v) out.push_back(Jet::variable(basis, static_cast<int>(v), x[v]));
  return out;
}

}  // namespace roughkit
