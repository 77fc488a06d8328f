#include "roughkit/smooth_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "roughkit/errors.hpp"

namespace roughkit {

std::vector<int> exponents_of(const Word& alpha, int n) {
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  for (int l : alpha) {
    if (l < 1 || l > n) throw InputError("controlled", "partial", "derivative index out of range");
    ++e[static_cast<std::size_t>(l - 1)];
  }
  return e;
}

std::vector<double> multilinear(std::span<const Jet> taylor, std::span<const std::span<const double>> directions) {
  std::vector<double> out(taylor.size(), 0.0);
  if (taylor.empty()) return out;
  const auto& basis = *taylor.front().basis();
  const int n = basis.vars();
  const std::size_t k = directions.size();
  if (k == 0) {
    for (std::size_t c = 0; c < taylor.size(); ++c) out[c] = taylor[c].value();
    return out;
  }
  std::vector<int> idx(k, 0), exps(static_cast<std::size_t>(n), 0);
  while (true) {
    double weight = 1.0;
    std::fill(exps.begin(), exps.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
      weight *= directions[i][static_cast<std::size_t>(idx[i])];
      ++exps[static_cast<std::size_t>(idx[i])];
    }
    if (weight != 0.0) {
      const std::size_t m = basis.index(exps);
      for (std::size_t c = 0; c < taylor.size(); ++c) out[c] += weight * taylor[c].coeff(m) * basis.multi_factorial(m);
    }
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - 1) idx[--pos] = 0;
    if (pos == 0) break;
    ++idx[pos - 1];
  }
  return out;
}

std::vector<Jet> multilinear_jets(std::span<const Jet> taylor, std::span<const std::span<const Jet>> directions,
                                  int order) {
  std::vector<Jet> out;
  if (taylor.empty()) return out;
  const auto& basis = taylor.front().basis();
  const int n = basis->vars();
  const std::size_t k = directions.size();
  for (const auto& t : taylor) {
    if (t.order() < order + static_cast<int>(k))
      throw OrderError("controlled", "multilinear_jets", "Taylor jets too short for the requested order");
    out.push_back(Jet(basis, order));
  }
  if (k == 0) {
    for (std::size_t c = 0; c < taylor.size(); ++c) out[c] = taylor[c].truncated(order);
    return out;
  }
  // d^a phi (x + h) for each multi-index a of degree k, computed once
  std::map<std::size_t, std::vector<Jet>> partials;
  auto partial = [&](const std::vector<int>& exps) -> const std::vector<Jet>& {
    const std::size_t m = basis->index(exps);
    auto it = partials.find(m);
    if (it != partials.end()) return it->second;
    std::vector<Jet> d(taylor.begin(), taylor.end());
    for (int v = 0; v < n; ++v)
      for (int e = 0; e < exps[static_cast<std::size_t>(v)]; ++e)
        for (auto& j : d) j = j.derivative(v);
    for (auto& j : d) j = j.truncated(order);
    return partials.emplace(m, std::move(d)).first->second;
  };
  std::vector<int> idx(k, 0), exps(static_cast<std::size_t>(n), 0);
  while (true) {
    std::fill(exps.begin(), exps.end(), 0);
    Jet weight = directions[0][static_cast<std::size_t>(idx[0])].truncated(order);
    ++exps[static_cast<std::size_t>(idx[0])];
    for (std::size_t i = 1; i < k; ++i) {
      weight = weight * directions[i][static_cast<std::size_t>(idx[i])];
      ++exps[static_cast<std::size_t>(idx[i])];
    }
    bool zero = true;
    for (double c : weight.coeffs())
      if (c != 0.0) {
        zero = false;
        break;
      }
    if (!zero) {
      const auto& d = partial(exps);
      for (std::size_t c = 0; c < out.size(); ++c) out[c].add_product(d[c], weight);
    }
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - 1) idx[--pos] = 0;
    if (pos == 0) break;
    ++idx[pos - 1];
  }
  return out;
}

namespace {

int min_order(std::span<const Jet> args) {
  int k = std::numeric_limits<int>::max();
  for (const auto& a : args) k = std::min(k, a.order());
  return k;
}

Jet constant_like(std::span<const Jet> args, double value) {
  return Jet::constant(args.front().basis(), value).truncated(min_order(args));
}

// Powers args[j]^p, p <= max_power, computed on demand.
class PowerCache {
 public:
  explicit PowerCache(std::span<const Jet> args) : args_(args), powers_(args.size()) {}
  const Jet& get(std::size_t j, int p) {
    auto& v = powers_[j];
    if (v.empty()) v.push_back(constant_like(args_, 1.0));
    while (static_cast<int>(v.size()) <= p) v.push_back(v.back() * args_[j]);
    return v[static_cast<std::size_t>(p)];
  }

 private:
  std::span<const Jet> args_;
  std::vector<std::vector<Jet>> powers_;
};

class DescribedImpl : public SmoothFunction::Impl {
 public:
  DescribedImpl(int n_in, int n_out, SmoothFunction::Description d)
      : Impl(n_in, n_out, kAnalytic, d.family), desc(std::move(d)) {}
  const SmoothFunction::Description* description() const override { return &desc; }
  SmoothFunction::Description desc;
};

class PolynomialImpl final : public DescribedImpl {
 public:
  using DescribedImpl::DescribedImpl;

  std::vector<double> eval(std::span<const double> x) const override {
    std::vector<double> out;
    for (const auto& comp : desc.polynomial) {
      double s = 0.0;
      for (const auto& m : comp) {
        double t = m.coeff;
        for (std::size_t j = 0; j < m.powers.size(); ++j) t *= std::pow(x[j], m.powers[j]);
        s += t;
      }
      out.push_back(s);
    }
    return out;
  }

  std::vector<Jet> substitute(std::span<const Jet> args) const override {
    PowerCache powers(args);
    std::vector<Jet> out;
    for (const auto& comp : desc.polynomial) {
      Jet r = constant_like(args, 0.0);
      for (const auto& m : comp) {
        Jet t = constant_like(args, m.coeff);
        for (std::size_t j = 0; j < m.powers.size(); ++j)
          if (m.powers[j] > 0) t = t * powers.get(j, m.powers[j]);
        r += t;
      }
      out.push_back(std::move(r));
    }
    return out;
  }
};

class AffineImpl final : public DescribedImpl {
 public:
  using DescribedImpl::DescribedImpl;

  std::vector<double> eval(std::span<const double> x) const override {
    std::vector<double> out = desc.offset;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = 0; j < x.size(); ++j) out[i] += desc.matrix[i][j] * x[j];
    return out;
  }

  std::vector<Jet> substitute(std::span<const Jet> args) const override {
    std::vector<Jet> out;
    for (std::size_t i = 0; i < desc.offset.size(); ++i) {
      Jet r = constant_like(args, desc.offset[i]);
      for (std::size_t j = 0; j < args.size(); ++j)
        if (desc.matrix[i][j] != 0.0) r.add_scaled(args[j], desc.matrix[i][j]);
      out.push_back(std::move(r));
    }
    return out;
  }
};

class TrigImpl final : public DescribedImpl {
 public:
  using DescribedImpl::DescribedImpl;

  std::vector<double> eval(std::span<const double> x) const override {
    std::vector<double> out;
    for (const auto& comp : desc.trig) {
      double s = 0.0;
      for (const auto& t : comp) {
        double th = t.phase;
        for (std::size_t j = 0; j < x.size(); ++j) th += t.freq[j] * x[j];
        s += t.coeff * std::sin(th);
      }
      out.push_back(s);
    }
    return out;
  }

  std::vector<Jet> substitute(std::span<const Jet> args) const override {
    std::vector<Jet> out;
    for (const auto& comp : desc.trig) {
      Jet r = constant_like(args, 0.0);
      for (const auto& t : comp) {
        Jet th = constant_like(args, t.phase);
        for (std::size_t j = 0; j < args.size(); ++j)
          if (t.freq[j] != 0.0) th.add_scaled(args[j], t.freq[j]);
        r.add_scaled(jet_sin(th), t.coeff);
      }
      out.push_back(std::move(r));
    }
    return out;
  }
};

class GaussianImpl final : public DescribedImpl {
 public:
  using DescribedImpl::DescribedImpl;

  std::vector<double> eval(std::span<const double> x) const override {
    std::vector<double> out;
    for (const auto& comp : desc.gaussian) {
      double s = 0.0;
      for (const auto& g : comp) {
        double q = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) q += (x[j] - g.center[j]) * (x[j] - g.center[j]);
        s += g.coeff * std::exp(-q / (2 * g.width * g.width));
      }
      out.push_back(s);
    }
    return out;
  }

  std::vector<Jet> substitute(std::span<const Jet> args) const override {
    std::vector<Jet> out;
    for (const auto& comp : desc.gaussian) {
      Jet r = constant_like(args, 0.0);
      for (const auto& g : comp) {
        Jet q = constant_like(args, 0.0);
        for (std::size_t j = 0; j < args.size(); ++j) {
          Jet dj = args[j];
          dj -= constant_like(args, g.center[j]);
          q.add_product(dj, dj);
        }
        r.add_scaled(jet_exp(q * (-1.0 / (2 * g.width * g.width))), g.coeff);
      }
      out.push_back(std::move(r));
    }
    return out;
  }
};

class PartialsImpl final : public SmoothFunction::Impl {
 public:
  PartialsImpl(int n_in, int n_out, int order, SmoothFunction::PartialOracle p)
      : Impl(n_in, n_out, order, "oracle"), partials(std::move(p)) {}

  std::vector<Jet> taylor(std::span<const double> x, int k) const override {
    auto basis = MonomialBasis::get(n_in, k);
    std::vector<Jet> out;
    for (int c = 0; c < n_out; ++c) {
      Jet j(basis, k);
      for (std::size_t i = 0; i < basis->size(); ++i)
        j.coeff(i) = partials(x, c, basis->exponents(i)) / basis->multi_factorial(i);
      out.push_back(std::move(j));
    }
    return out;
  }

  SmoothFunction::PartialOracle partials;
};

class TaylorImpl final : public SmoothFunction::Impl {
 public:
  TaylorImpl(int n_in, int n_out, int order, SmoothFunction::TaylorMap t)
      : Impl(n_in, n_out, order, "taylor"), map(std::move(t)) {}
  std::vector<Jet> taylor(std::span<const double> x, int k) const override { return map(x, k); }
  SmoothFunction::TaylorMap map;
};

class JetMapImpl final : public SmoothFunction::Impl {
 public:
  JetMapImpl(int n_in, int n_out, int order, SmoothFunction::JetMap m, std::string family = "jet_map")
      : Impl(n_in, n_out, order, std::move(family)), map(std::move(m)) {}
  std::vector<Jet> substitute(std::span<const Jet> args) const override { return map(args); }
  SmoothFunction::JetMap map;
};

class FiniteDifferenceImpl final : public SmoothFunction::Impl {
 public:
  FiniteDifferenceImpl(int n_in, int n_out, SmoothFunction::EvalMap e)
      : Impl(n_in, n_out, 2, "finite_difference"), f(std::move(e)) {}

  std::vector<double> eval(std::span<const double> x) const override { return f(x); }

  std::vector<Jet> taylor(std::span<const double> x, int k) const override {
    auto basis = MonomialBasis::get(n_in, k);
    const std::vector<double> x0(x.begin(), x.end());
    std::vector<double> h(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
      h[j] = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x[j]));
    auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
      auto y = x0;
      y[i] += si * h[i];
      y[j] += sj * h[j];
      return f(y);
    };
    const auto f0 = f(x0);
    std::vector<Jet> out;
    for (int c = 0; c < n_out; ++c) {
      out.emplace_back(basis, k);
      out.back().coeff(0) = f0[static_cast<std::size_t>(c)];
    }
    if (k >= 1) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        auto p = at(j, 1, j, 0), m = at(j, -1, j, 0);
        std::vector<int> e(x.size(), 0);
        e[j] = 1;
        const auto idx = basis->index(e);
        for (int c = 0; c < n_out; ++c) {
          const auto cc = static_cast<std::size_t>(c);
          out[cc].coeff(idx) = (p[cc] - m[cc]) / (2 * h[j]);
        }
      }
    }
    if (k >= 2) {
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i; j < x.size(); ++j) {
          std::vector<int> e(x.size(), 0);
          ++e[i];
          ++e[j];
          const auto idx = basis->index(e);
          if (i == j) {
            auto p = at(i, 2, i, 0), m = at(i, -2, i, 0);
            for (int c = 0; c < n_out; ++c) {
              const auto cc = static_cast<std::size_t>(c);
              // (f(x+2h) - 2 f(x) + f(x-2h)) / (2h)^2, halved for the Taylor coefficient
              out[cc].coeff(idx) = (p[cc] - 2 * f0[cc] + m[cc]) / (4 * h[i] * h[i]) / 2;
            }
          } else {
            auto pp = at(i, 1, j, 1), pm = at(i, 1, j, -1), mp = at(i, -1, j, 1), mm = at(i, -1, j, -1);
            for (int c = 0; c < n_out; ++c) {
              const auto cc = static_cast<std::size_t>(c);
              out[cc].coeff(idx) = (pp[cc] - pm[cc] - mp[cc] + mm[cc]) / (4 * h[i] * h[j]);
            }
          }
        }
      }
    }
    return out;
  }

  SmoothFunction::EvalMap f;
};

void check_n_in(int n_in, const char* op) {
  if (n_in < 1) throw InputError("controlled", op, "input dimension must be positive");
}

}  // namespace

// ---------------------------------------------------------------- Impl defaults

std::vector<double> SmoothFunction::Impl::eval(std::span<const double> x) const {
  auto t = taylor(x, 0);
  std::vector<double> out;
  for (const auto& j : t) out.push_back(j.value());
  return out;
}

std::vector<Jet> SmoothFunction::Impl::taylor(std::span<const double> x, int k) const {
  auto id = identity_jets(x, k);
  return substitute(id);
}

std::vector<Jet> SmoothFunction::Impl::substitute(std::span<const Jet> args) const {
  std::vector<double> x;
  for (const auto& a : args) x.push_back(a.value());
  auto t = taylor(x, std::max(0, min_order(args)));
  return taylor_substitute(std::span<const Jet>(t), args);
}

// ---------------------------------------------------------------- factories

SmoothFunction SmoothFunction::polynomial(int n_in, std::vector<std::vector<Monomial>> components) {
  check_n_in(n_in, "polynomial");
  for (const auto& comp : components)
    for (const auto& m : comp) {
      if (static_cast<int>(m.powers.size()) != n_in)
        throw InputError("controlled", "polynomial", "monomial powers must have one entry per variable");
      for (int p : m.powers)
        if (p < 0) throw InputError("controlled", "polynomial", "negative power");
    }
  Description d;
  d.family = "polynomial";
  const int n_out = static_cast<int>(components.size());
  d.polynomial = std::move(components);
  return SmoothFunction(std::make_shared<PolynomialImpl>(n_in, n_out, std::move(d)));
}

SmoothFunction SmoothFunction::affine(std::vector<std::vector<double>> matrix, std::vector<double> offset) {
  if (matrix.size() != offset.size() || matrix.empty())
    throw InputError("controlled", "affine", "matrix rows must match offset size");
  const std::size_t n_in = matrix.front().size();
  for (const auto& row : matrix)
    if (row.size() != n_in) throw InputError("controlled", "affine", "ragged matrix");
  check_n_in(static_cast<int>(n_in), "affine");
  Description d;
  d.family = "affine";
  const int n_out = static_cast<int>(offset.size());
  d.matrix = std::move(matrix);
  d.offset = std::move(offset);
  return SmoothFunction(std::make_shared<AffineImpl>(static_cast<int>(n_in), n_out, std::move(d)));
}

SmoothFunction SmoothFunction::linear(std::vector<std::vector<double>> matrix) {
  std::vector<double> offset(matrix.size(), 0.0);
  return affine(std::move(matrix), std::move(offset));
}

SmoothFunction SmoothFunction::constant(int n_in, std::vector<double> value) {
  check_n_in(n_in, "constant");
  std::vector<std::vector<double>> zero(value.size(), std::vector<double>(static_cast<std::size_t>(n_in), 0.0));
  return affine(std::move(zero), std::move(value));
}

SmoothFunction SmoothFunction::identity(int n) {
  std::vector<std::vector<double>> m(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] = 1.0;
  return linear(std::move(m));
}

SmoothFunction SmoothFunction::trig(int n_in, std::vector<std::vector<TrigTerm>> components) {
  check_n_in(n_in, "trig");
  for (const auto& comp : components)
    for (const auto& t : comp)
      if (static_cast<int>(t.freq.size()) != n_in)
        throw InputError("controlled", "trig", "frequency must have one entry per variable");
  Description d;
  d.family = "trig";
  const int n_out = static_cast<int>(components.size());
  d.trig = std::move(components);
  return SmoothFunction(std::make_shared<TrigImpl>(n_in, n_out, std::move(d)));
}

SmoothFunction SmoothFunction::gaussian(int n_in, std::vector<std::vector<GaussianTerm>> components) {
  check_n_in(n_in, "gaussian");
  for (const auto& comp : components)
    for (const auto& g : comp) {
      if (static_cast<int>(g.center.size()) != n_in)
        throw InputError("controlled", "gaussian", "center must have one entry per variable");
      if (!(g.width > 0)) throw InputError("controlled", "gaussian", "width must be positive");
    }
  Description d;
  d.family = "gaussian";
  const int n_out = static_cast<int>(components.size());
  d.gaussian = std::move(components);
  return SmoothFunction(std::make_shared<GaussianImpl>(n_in, n_out, std::move(d)));
}

SmoothFunction SmoothFunction::from_partials(int n_in, int n_out, int order, PartialOracle partials) {
  check_n_in(n_in, "from_partials");
  return SmoothFunction(std::make_shared<PartialsImpl>(n_in, n_out, order, std::move(partials)));
}

SmoothFunction SmoothFunction::from_taylor(int n_in, int n_out, int order, TaylorMap taylor) {
  check_n_in(n_in, "from_taylor");
  return SmoothFunction(std::make_shared<TaylorImpl>(n_in, n_out, order, std::move(taylor)));
}

SmoothFunction SmoothFunction::from_jet_map(int n_in, int n_out, int order, JetMap map) {
  check_n_in(n_in, "from_jet_map");
  return SmoothFunction(std::make_shared<JetMapImpl>(n_in, n_out, order, std::move(map)));
}

SmoothFunction SmoothFunction::finite_difference(int n_in, int n_out, EvalMap eval) {
  check_n_in(n_in, "finite_difference");
  return SmoothFunction(std::make_shared<FiniteDifferenceImpl>(n_in, n_out, std::move(eval)));
}

// ---------------------------------------------------------------- combinators

namespace {

void require_same_shape(const SmoothFunction& a, const SmoothFunction& b, const char* op) {
  if (a.n_in() != b.n_in() || a.n_out() != b.n_out())
    throw InputError("controlled", op, "functions have different shapes");
}

}  // namespace

SmoothFunction operator+(const SmoothFunction& a, const SmoothFunction& b) {
  require_same_shape(a, b, "sum");
  return SmoothFunction(std::make_shared<JetMapImpl>(
      a.n_in(), a.n_out(), std::min(a.order(), b.order()),
      [a, b](std::span<const Jet> args) {
        auto r = a.substitute(args);
        auto s = b.substitute(args);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += s[i];
        return r;
      },
      "sum"));
}

SmoothFunction operator-(const SmoothFunction& a, const SmoothFunction& b) { return a + (-1.0) * b; }

SmoothFunction operator*(double s, const SmoothFunction& a) {
  return SmoothFunction(std::make_shared<JetMapImpl>(
      a.n_in(), a.n_out(), a.order(),
      [a, s](std::span<const Jet> args) {
        auto r = a.substitute(args);
        for (auto& j : r) j *= s;
        return r;
      },
      "scaled"));
}

SmoothFunction SmoothFunction::product(const SmoothFunction& a, const SmoothFunction& b) {
  if (a.n_out() != 1 || a.n_in() != b.n_in())
    throw InputError("controlled", "product", "expects a scalar factor with matching input dimension");
  return SmoothFunction(std::make_shared<JetMapImpl>(
      a.n_in(), b.n_out(), std::min(a.order(), b.order()),
      [a, b](std::span<const Jet> args) {
        const Jet s = a.substitute(args).front();
        auto r = b.substitute(args);
        for (auto& j : r) j = s * j;
        return r;
      },
      "product"));
}

SmoothFunction SmoothFunction::compose(const SmoothFunction& outer, const SmoothFunction& inner) {
  if (outer.n_in() != inner.n_out()) throw InputError("controlled", "compose", "dimension mismatch");
  return SmoothFunction(std::make_shared<JetMapImpl>(
      inner.n_in(), outer.n_out(), std::min(outer.order(), inner.order()),
      [outer, inner](std::span<const Jet> args) {
        auto mid = inner.substitute(args);
        return outer.substitute(mid);
      },
      "compose"));
}

SmoothFunction SmoothFunction::component(int c) const {
  if (c < 0 || c >= n_out()) throw InputError("controlled", "component", "component out of range");
  SmoothFunction self = *this;
  return SmoothFunction(std::make_shared<JetMapImpl>(
      n_in(), 1, order(),
      [self, c](std::span<const Jet> args) {
        auto r = self.substitute(args);
        return std::vector<Jet>{r[static_cast<std::size_t>(c)]};
      },
      "component"));
}

SmoothFunction SmoothFunction::stack(const std::vector<SmoothFunction>& parts) {
  if (parts.empty()) throw InputError("controlled", "stack", "no parts");
  int n_out = 0, order = kAnalytic;
  for (const auto& p : parts) {
    if (p.n_in() != parts.front().n_in()) throw InputError("controlled", "stack", "input dimensions differ");
    n_out += p.n_out();
    order = std::min(order, p.order());
  }
  return SmoothFunction(std::make_shared<JetMapImpl>(
      parts.front().n_in(), n_out, order,
      [parts](std::span<const Jet> args) {
        std::vector<Jet> out;
        for (const auto& p : parts)
          for (auto& j : p.substitute(args)) out.push_back(std::move(j));
        return out;
      },
      "stack"));
}

// ---------------------------------------------------------------- evaluation

namespace {

const SmoothFunction::Impl& impl_of(const std::shared_ptr<const SmoothFunction::Impl>& p) {
  if (!p) throw InputError("controlled", "SmoothFunction", "empty function");
  return *p;
}

}  // namespace

int SmoothFunction::n_in() const { return impl_of(impl_).n_in; }
int SmoothFunction::n_out() const { return impl_of(impl_).n_out; }
int SmoothFunction::order() const { return impl_of(impl_).order; }
const std::string& SmoothFunction::family() const { return impl_of(impl_).family; }
const SmoothFunction::Description* SmoothFunction::description() const { return impl_of(impl_).description(); }

std::vector<double> SmoothFunction::operator()(std::span<const double> x) const {
  const auto& f = impl_of(impl_);
  if (static_cast<int>(x.size()) != f.n_in) throw InputError("controlled", "eval", "input dimension mismatch");
  return f.eval(x);
}

std::vector<Jet> SmoothFunction::taylor(std::span<const double> x, int order) const {
  const auto& f = impl_of(impl_);
  if (static_cast<int>(x.size()) != f.n_in) throw InputError("controlled", "taylor", "input dimension mismatch");
  if (order > f.order)
    throw OrderError("controlled", "taylor",
                     "order " + std::to_string(order) + " exceeds declared order " + std::to_string(f.order));
  return f.taylor(x, order);
}

std::vector<Jet> SmoothFunction::substitute(std::span<const Jet> args) const {
  const auto& f = impl_of(impl_);
  if (static_cast<int>(args.size()) != f.n_in) throw InputError("controlled", "substitute", "input dimension mismatch");
  const int k = min_order(args);
  if (k > f.order)
    throw OrderError("controlled", "substitute",
                     "order " + std::to_string(k) + " exceeds declared order " + std::to_string(f.order));
  return f.substitute(args);
}

std::vector<double> SmoothFunction::partial(std::span<const double> x, const Word& alpha) const {
  const auto exps = exponents_of(alpha, n_in());
  const auto t = taylor(x, static_cast<int>(alpha.size()));
  std::vector<double> out;
  for (const auto& j : t) out.push_back(j.partial(exps));
  return out;
}

std::vector<double> SmoothFunction::derivative(std::span<const double> x,
                                               const std::vector<std::vector<double>>& directions) const {
  const int k = static_cast<int>(directions.size());
  if (k == 0) return (*this)(x);
  auto basis = MonomialBasis::get(k, k);
  std::vector<Jet> args;
  for (std::size_t j = 0; j < x.size(); ++j) {
    Jet a = Jet::constant(basis, x[j]);
    for (int i = 0; i < k; ++i) a.coeff(1 + static_cast<std::size_t>(i)) = directions[static_cast<std::size_t>(i)][j];
    args.push_back(std::move(a));
  }
  const auto r = substitute(args);
  const std::vector<int> ones(static_cast<std::size_t>(k), 1);
  const auto idx = basis->index(ones);
  std::vector<double> out;
  for (const auto& j : r) out.push_back(j.coeff(idx));
  return out;
}

}  // namespace roughkit
