#include "roughkit/rde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "roughkit/errors.hpp"

namespace roughkit {

namespace {

int reduced_order(int order, int by) { return order >= kAnalytic / 2 ? kAnalytic : order - by; }

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<Jet> rebased(std::vector<Jet> jets, int k) {
  if (jets.empty()) return jets;
  auto basis = MonomialBasis::get(jets.front().basis()->vars(), k);
  for (auto& j : jets) j = j.in_basis(basis);
  return jets;
}

std::size_t words_up_to(const TensorShape& shape, int len) { return shape.offset(len) + shape.count(len); }

void check_partition(std::span<const double> partition, const GeometricRoughPath& w, const char* op) {
  if (partition.empty()) throw InputError("rde", op, "empty partition");
  for (std::size_t j = 1; j < partition.size(); ++j)
    if (!(partition[j] > partition[j - 1])) throw InputError("rde", op, "partition must be strictly increasing");
  if (partition.front() < w.times().front() || partition.back() > w.horizon())
    throw InputError("rde", op, "partition outside the driver horizon");
}

// sum_{|w| <= len} F_w <g, e_w>; shapes share the canonical index for common words
template <class Value>
void accumulate_step(std::vector<Value>& out, const std::vector<std::vector<Value>>& fields, const GroupTensor& g,
                     std::size_t count) {
  for (std::size_t i = 1; i < count; ++i) {
    const double gw = g.at(i);
    if (gw == 0.0) continue;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += fields[i][c] * gw;
  }
}

}  // namespace

// ---------------------------------------------------------------- VectorFieldSystem

VectorFieldSystem::VectorFieldSystem(std::vector<SmoothFunction> fields) : fields_(std::move(fields)) {
  if (fields_.empty()) throw InputError("rde", "VectorFieldSystem", "at least one field required");
  n_ = fields_.front().n_in();
  order_ = kAnalytic;
  for (const auto& f : fields_) {
    if (f.n_in() != n_ || f.n_out() != n_)
      throw InputError("rde", "VectorFieldSystem", "fields must map R^n to R^n with a common n");
    order_ = std::min(order_, f.order());
  }
}

VectorFieldSystem VectorFieldSystem::zero(int d, int n) {
  std::vector<SmoothFunction> f(static_cast<std::size_t>(d),
                                SmoothFunction::constant(n, std::vector<double>(static_cast<std::size_t>(n), 0.0)));
  return VectorFieldSystem(std::move(f));
}

// ---------------------------------------------------------------- DerivedFieldTable

DerivedFieldTable::DerivedFieldTable(VectorFieldSystem v, int level) : v_(std::move(v)) {
  if (level < 0) throw InputError("rde", "derive_fields", "negative level");
  if (level >= 1 && v_.order() < level - 1)
    throw OrderError("rde", "derive_fields",
                     "fields declare order " + std::to_string(v_.order()) + ", level " + std::to_string(level) +
                         " needs " + std::to_string(level - 1));
  shape_ = TensorShape(v_.d(), level);
}

std::vector<std::vector<Jet>> DerivedFieldTable::taylor(std::span<const double> x, int k, int max_len) const {
  const int len = max_len < 0 ? level() : max_len;
  if (len > level()) throw InputError("rde", "derive_fields", "word length beyond the table level");
  if (static_cast<int>(x.size()) != n()) throw InputError("rde", "derive_fields", "state dimension mismatch");
  const std::size_t count = words_up_to(shape_, len);
  std::vector<std::vector<Jet>> out(count);
  out[0] = identity_jets(x, k);
  if (len == 0) return out;
  const int r = k + len - 1;
  if (v_.order() < r)
    throw OrderError("rde", "derive_fields",
                     "fields declare order " + std::to_string(v_.order()) + ", " + std::to_string(r) + " required");
  std::vector<std::vector<Jet>> f;
  for (const auto& fi : v_.fields()) f.push_back(fi.taylor(x, r));
  const auto id = identity_jets(x, r);
  const int nn = n();
  for (std::size_t i = 1; i < count; ++i) {
    const Word w = shape_.word(i);
    const auto& fi = f[static_cast<std::size_t>(w[0] - 1)];
    if (w.size() == 1) {
      out[i] = fi;
      continue;
    }
    const auto& prev = out[shape_.index(w.suffix_from(1))];
    std::vector<Jet> next;
    for (int c = 0; c < nn; ++c) {
      Jet acc(id[0].basis(), r);
      for (int j = 0; j < nn; ++j) acc.add_product(fi[static_cast<std::size_t>(j)], prev[static_cast<std::size_t>(c)].derivative(j));
      next.push_back(std::move(acc));
    }
    out[i] = std::move(next);
  }
  for (std::size_t i = 1; i < count; ++i) out[i] = rebased(std::move(out[i]), k);
  return out;
}

std::vector<std::vector<double>> DerivedFieldTable::values(std::span<const double> x) const {
  const auto t = taylor(x, 0);
  std::vector<std::vector<double>> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    for (const auto& j : t[i]) out[i].push_back(j.value());
  return out;
}

std::vector<std::vector<double>> DerivedFieldTable::shuffle_values(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n()) throw InputError("rde", "derive_fields", "state dimension mismatch");
  std::vector<std::vector<double>> out(shape_.size());
  out[0].assign(x.begin(), x.end());
  if (level() == 0) return out;
  std::vector<std::vector<Jet>> f;
  for (const auto& fi : v_.fields()) f.push_back(fi.taylor(x, level() - 1));
  for (std::size_t i = 1; i < shape_.size(); ++i) {
    const Word w = shape_.word(i);
    const auto& fi = f[static_cast<std::size_t>(w[w.size() - 1] - 1)];
    const Word u = w.prefix(w.size() - 1);
    if (u.empty()) {
      for (const auto& j : fi) out[i].push_back(j.value());
      continue;
    }
    std::vector<double> acc(static_cast<std::size_t>(n()), 0.0);
    for (int k = 1; k <= static_cast<int>(u.size()); ++k) {
      const double inv = 1.0 / factorial(k);
      for (const auto& e : deshuffles(u, k).entries) {
        std::vector<std::span<const double>> dirs;
        for (const auto& part : e.parts) dirs.emplace_back(out[shape_.index(part)]);
        const auto term = multilinear(fi, dirs);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += inv * e.multiplicity * term[c];
      }
    }
    out[i] = std::move(acc);
  }
  return out;
}

SmoothFunction DerivedFieldTable::field(const Word& w) const {
  if (!shape_.contains(w)) throw InputError("rde", "derive_fields", "word beyond the table");
  if (w.empty()) return SmoothFunction::identity(n());
  const std::size_t idx = shape_.index(w);
  const int len = static_cast<int>(w.size());
  DerivedFieldTable self = *this;
  return SmoothFunction::from_taylor(n(), n(), reduced_order(v_.order(), len - 1),
                                     [self, idx, len](std::span<const double> x, int k) {
                                       return self.taylor(x, k, len)[idx];
                                     });
}

// ---------------------------------------------------------------- Davie steps

std::vector<double> davie_step(std::span<const double> x, const DerivedFieldTable& table, const GroupTensor& g) {
  if (g.dim() != table.d()) throw InputError("rde", "davie_step", "increment dimension does not match d");
  if (g.level() < table.level())
    throw InputError("rde", "davie_step",
                     "level mismatch: increment level " + std::to_string(g.level()) + " below table level " +
                         std::to_string(table.level()));
  const auto f = table.values(x);
  std::vector<double> out(x.begin(), x.end());
  accumulate_step(out, f, g, f.size());
  return out;
}

std::vector<double> mesh_partition(double s, double t, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("rde", "mesh_partition", "mesh must be positive");
  if (!(t >= s)) throw InputError("rde", "mesh_partition", "end before start");
  std::vector<double> out{s};
  const double slack = 1e-9 * h;
  for (auto k = static_cast<long long>(std::floor(s / h)) + 1;; ++k) {
    const double p = static_cast<double>(k) * h;
    if (p >= t - slack) break;
    if (p > s + slack) out.push_back(p);
  }
  if (t > s) out.push_back(t);
  return out;
}

namespace {

void check_state(std::span<const double> x, double limit, std::size_t cell, double a, double b) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > limit)
      throw NumericalError("rde", "solve_rde",
                           "blow-up in cell " + std::to_string(cell) + " [" + std::to_string(a) + ", " +
                               std::to_string(b) + "]");
}

}  // namespace

std::vector<double> RdeSolution::state(std::size_t i) const {
  auto p = lift.primal(i);
  return {p.begin(), p.end()};
}

RdeSolution solve_rde(std::span<const double> x0, const VectorFieldSystem& v, const RoughPathPtr& w,
                      std::vector<double> partition, const RdeOptions& options) {
  if (!w) throw InputError("rde", "solve_rde", "missing driver");
  if (static_cast<int>(x0.size()) != v.n()) throw InputError("rde", "solve_rde", "x0 dimension does not match n");
  if (w->dim() != v.d()) throw InputError("rde", "solve_rde", "driver dimension does not match d");
  check_partition(partition, *w, "solve_rde");
  const int ng = default_level(w->gamma());
  const int level = w->level();
  const DerivedFieldTable table(v, std::max(level, ng));
  const std::size_t step_words = words_up_to(table.shape(), level);

  RdeSolution sol;
  sol.level = level;
  sol.lift = ControlledPath(w, ng + 1, v.n(), partition);
  const std::size_t coeffs = sol.lift.shape().size();

  std::vector<double> x(x0.begin(), x0.end());
  check_state(x, options.blowup, 0, partition.front(), partition.front());
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const auto f = table.values(x);
    for (std::size_t i = 0; i < coeffs; ++i) std::copy(f[i].begin(), f[i].end(), sol.lift.coeff(j, i).begin());
    if (j + 1 == partition.size()) break;
    const auto g = w->increment(partition[j], partition[j + 1]);
    accumulate_step(x, f, g, step_words);
    check_state(x, options.blowup, j, partition[j], partition[j + 1]);
  }

  sol.residual = std::numeric_limits<double>::quiet_NaN();
  if (options.residual && partition.size() >= 2 && v.order() >= ng + 1) {
    // every other partition point, so the sums do not reproduce the steps verbatim
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < partition.size(); j += 2) keep.push_back(j);
    if (keep.back() != partition.size() - 1) keep.push_back(partition.size() - 1);
    std::vector<double> coarse;
    for (auto j : keep) coarse.push_back(partition[j]);
    std::vector<std::vector<double>> total(coarse.size(), std::vector<double>(x0.size(), 0.0));
    for (int i = 1; i <= v.d(); ++i) {
      const auto integrand = compose(v.field(i), sol.lift);
      const auto integral = rough_integral(integrand, i, coarse);
      for (std::size_t j = 0; j < coarse.size(); ++j)
        for (std::size_t c = 0; c < x0.size(); ++c) total[j][c] += integral.values[j][c];
    }
    double r = 0.0;
    for (std::size_t j = 0; j < coarse.size(); ++j) {
      const auto p = sol.lift.primal(keep[j]);
      for (std::size_t c = 0; c < x0.size(); ++c) r = std::max(r, std::abs(p[c] - x0[c] - total[j][c]));
    }
    sol.residual = r;
  }
  return sol;
}

std::vector<double> flow(std::span<const double> x0, const DerivedFieldTable& table, const GeometricRoughPath& w,
                         std::span<const double> partition) {
  check_partition(partition, w, "flow");
  const std::size_t words = words_up_to(table.shape(), std::min(table.level(), w.level()));
  std::vector<double> x(x0.begin(), x0.end());
  for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
    const auto f = table.values(x);
    const auto g = w.increment(partition[j], partition[j + 1]);
    accumulate_step(x, f, g, words);
    check_state(x, 1e150, j, partition[j], partition[j + 1]);
  }
  return x;
}

// ---------------------------------------------------------------- extended space

ExtendedSpace::ExtendedSpace(int n, int k) : n_(n), k_(k) {
  if (n < 1 || k < 1) throw InputError("rde", "ExtendedSpace", "n and k must be positive");
  basis_ = MonomialBasis::get(n, k - 1);
}

std::size_t ExtendedSpace::index(int component, std::span<const int> exps) const {
  return static_cast<std::size_t>(component) * basis_->size() + basis_->index(exps);
}

std::vector<double> ExtendedSpace::canonical(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw InputError("rde", "ExtendedSpace", "state dimension mismatch");
  std::vector<double> s(size(), 0.0);
  const std::size_t b = basis_->size();
  for (int c = 0; c < n_; ++c) {
    s[static_cast<std::size_t>(c) * b] = x[static_cast<std::size_t>(c)];
    if (k_ >= 2) s[static_cast<std::size_t>(c) * b + 1 + static_cast<std::size_t>(c)] = 1.0;
  }
  return s;
}

std::vector<Jet> ExtendedSpace::to_jets(std::span<const double> state) const {
  if (state.size() != size()) throw InputError("rde", "ExtendedSpace", "state size mismatch");
  const std::size_t b = basis_->size();
  std::vector<Jet> out;
  for (int c = 0; c < n_; ++c) {
    Jet j(basis_, k_ - 1);
    for (std::size_t m = 0; m < b; ++m)
      j.coeff(m) = state[static_cast<std::size_t>(c) * b + m] / basis_->multi_factorial(m);
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<double> ExtendedSpace::from_jets(std::span<const Jet> jets) const {
  if (static_cast<int>(jets.size()) != n_) throw InputError("rde", "ExtendedSpace", "jet count mismatch");
  const std::size_t b = basis_->size();
  std::vector<double> s(size(), 0.0);
  for (int c = 0; c < n_; ++c) {
    const auto& j = jets[static_cast<std::size_t>(c)];
    const std::size_t top = basis_->degree_end(std::min(j.order(), k_ - 1));
    for (std::size_t m = 0; m < top; ++m)
      s[static_cast<std::size_t>(c) * b + m] = j.coeff(m) * basis_->multi_factorial(m);
  }
  return s;
}

namespace {

// Polynomial in h (basis hb) with coefficients that are jets in outer variables;
// an empty Jet stands for zero.
using HPoly = std::vector<Jet>;

HPoly hmul(const HPoly& a, const HPoly& b, const MonomialBasis& hb) {
  HPoly out(a.size());
  for (const auto& p : hb.products()) {
    const auto& x = a[p.a];
    const auto& y = b[p.b];
    if (x.coeffs().empty() || y.coeffs().empty()) continue;
    if (out[p.out].coeffs().empty())
      out[p.out] = x * y;
    else
      out[p.out].add_product(x, y);
  }
  return out;
}

// r_1..r_j >= 0 with sum r = m and sum i r_i = p
void partitions_of_type(int p, int j, int m, std::vector<int>& r, int i, int left_m, int left_p,
                        std::vector<std::vector<int>>& out) {
  if (i > j) {
    if (left_m == 0 && left_p == 0) out.push_back(r);
    return;
  }
  for (int ri = 0; ri <= left_m && ri * i <= left_p; ++ri) {
    r[static_cast<std::size_t>(i - 1)] = ri;
    partitions_of_type(p, j, m, r, i + 1, left_m - ri, left_p - ri * i, out);
  }
  r[static_cast<std::size_t>(i - 1)] = 0;
}

}  // namespace

SmoothFunction ExtendedSpace::lift(const SmoothFunction& f) const {
  if (f.n_in() != n_ || f.n_out() != n_) throw InputError("rde", "lift", "field must map R^n to R^n");
  const ExtendedSpace space = *this;
  const int order = reduced_order(f.order(), k_ - 1);
  if (order < 0) throw OrderError("rde", "lift", "field order below the jet order");
  return SmoothFunction::from_jet_map(
      static_cast<int>(size()), static_cast<int>(size()), order, [space, f](std::span<const Jet> args) {
        const int n = space.n_, k = space.k_;
        const auto& hb = *space.basis_;
        const std::size_t b = hb.size();
        int K = std::numeric_limits<int>::max();
        for (const auto& a : args) K = std::min(K, a.order());
        std::vector<double> x0;
        std::vector<Jet> xs;
        for (int c = 0; c < n; ++c) {
          xs.push_back(args[static_cast<std::size_t>(c) * b]);
          x0.push_back(xs.back().value());
        }
        const auto T = f.taylor(x0, K + k - 1);
        // d^a f(x(args)), memoized per multi-index a
        std::map<std::size_t, std::vector<Jet>> partials;
        auto partial = [&](const std::vector<int>& exps) -> const std::vector<Jet>& {
          const std::size_t key = T.front().basis()->index(exps);
          auto it = partials.find(key);
          if (it != partials.end()) return it->second;
          std::vector<Jet> d = T;
          for (int v = 0; v < n; ++v)
            for (int e = 0; e < exps[static_cast<std::size_t>(v)]; ++e)
              for (auto& j : d) j = j.derivative(v);
          return partials.emplace(key, taylor_substitute(std::span<const Jet>(d), std::span<const Jet>(xs))).first->second;
        };
        // y_q(h, ..., h) per component, q = 1..k-1
        std::vector<std::vector<HPoly>> y(static_cast<std::size_t>(k));
        for (int q = 1; q < k; ++q) {
          for (int c = 0; c < n; ++c) {
            HPoly poly(b);
            for (std::size_t m = hb.degree_end(q - 1); m < hb.degree_end(q); ++m)
              poly[m] = args[static_cast<std::size_t>(c) * b + m] * (factorial(q) / hb.multi_factorial(m));
            y[static_cast<std::size_t>(q)].push_back(std::move(poly));
          }
        }
        std::vector<HPoly> out(static_cast<std::size_t>(n), HPoly(b));
        {
          const auto& v = partial(std::vector<int>(static_cast<std::size_t>(n), 0));
          for (int c = 0; c < n; ++c) out[static_cast<std::size_t>(c)][0] = v[static_cast<std::size_t>(c)];
        }
        for (int p = 1; p < k; ++p) {
          for (int j = 1; j <= p; ++j) {
            const int m = p - j + 1;
            std::vector<std::vector<int>> types;
            std::vector<int> r(static_cast<std::size_t>(j), 0);
            partitions_of_type(p, j, m, r, 1, m, p, types);
            for (const auto& rt : types) {
              double coef = factorial(p);
              std::vector<int> slots;  // degree of each argument
              for (int i = 1; i <= j; ++i) {
                const int ri = rt[static_cast<std::size_t>(i - 1)];
                coef /= factorial(ri) * std::pow(factorial(i), ri);
                for (int t = 0; t < ri; ++t) slots.push_back(i);
              }
              // D^m f(x)(y_{s_1}, ..., y_{s_m}) = sum_a d_a f prod_t y_{s_t}[a_t]
              std::vector<int> a(static_cast<std::size_t>(m), 0);
              while (true) {
                HPoly prod = y[static_cast<std::size_t>(slots[0])][static_cast<std::size_t>(a[0])];
                std::vector<int> exps(static_cast<std::size_t>(n), 0);
                ++exps[static_cast<std::size_t>(a[0])];
                for (int t = 1; t < m; ++t) {
                  prod = hmul(prod, y[static_cast<std::size_t>(slots[static_cast<std::size_t>(t)])]
                                     [static_cast<std::size_t>(a[static_cast<std::size_t>(t)])],
                              hb);
                  ++exps[static_cast<std::size_t>(a[static_cast<std::size_t>(t)])];
                }
                const auto& d = partial(exps);
                for (int c = 0; c < n; ++c) {
                  auto& o = out[static_cast<std::size_t>(c)];
                  for (std::size_t q = hb.degree_end(p - 1); q < hb.degree_end(p); ++q) {
                    if (prod[q].coeffs().empty()) continue;
                    if (o[q].coeffs().empty()) o[q] = Jet(d[static_cast<std::size_t>(c)].basis(), K);
                    o[q].add_product(d[static_cast<std::size_t>(c)], prod[q], coef);
                  }
                }
                std::size_t pos = static_cast<std::size_t>(m);
                while (pos > 0 && a[pos - 1] == n - 1) a[--pos] = 0;
                if (pos == 0) break;
                ++a[pos - 1];
              }
            }
          }
        }
        // coordinates: d^a = coefficient of h^a times a! / p!
        std::vector<Jet> result;
        result.reserve(static_cast<std::size_t>(n) * b);
        for (int c = 0; c < n; ++c)
          for (std::size_t q = 0; q < b; ++q) {
            const auto& o = out[static_cast<std::size_t>(c)][q];
            const double scale = hb.multi_factorial(q) / factorial(hb.degree(q));
            result.push_back(o.coeffs().empty() ? Jet(args.front().basis(), K) : o * scale);
          }
        return result;
      });
}

VectorFieldSystem ExtendedSpace::lift(const VectorFieldSystem& v) const {
  std::vector<SmoothFunction> fields;
  for (const auto& f : v.fields()) fields.push_back(lift(f));
  return VectorFieldSystem(std::move(fields));
}

std::vector<double> FlowJetPath::partial(std::size_t ti, const Word& alpha) const {
  if (static_cast<int>(alpha.size()) >= space.k()) throw InputError("rde", "solve_flow_jets", "derivative beyond the jet order");
  const auto exps = exponents_of(alpha, space.n());
  std::vector<double> out;
  for (int c = 0; c < space.n(); ++c) out.push_back(states[ti][space.index(c, exps)]);
  return out;
}

FlowJetPath solve_flow_jets(std::span<const double> x0, const VectorFieldSystem& v, const RoughPathPtr& w,
                            std::vector<double> partition, int k) {
  if (!w) throw InputError("rde", "solve_flow_jets", "missing driver");
  if (w->dim() != v.d()) throw InputError("rde", "solve_flow_jets", "driver dimension does not match d");
  check_partition(partition, *w, "solve_flow_jets");
  FlowJetPath out;
  out.space = ExtendedSpace(v.n(), k);
  const DerivedFieldTable table(out.space.lift(v), w->level());
  out.times = partition;
  auto x = out.space.canonical(x0);
  out.states.push_back(x);
  for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
    const auto f = table.values(x);
    const auto g = w->increment(partition[j], partition[j + 1]);
    accumulate_step(x, f, g, f.size());
    check_state(x, 1e150, j, partition[j], partition[j + 1]);
    out.states.push_back(x);
  }
  return out;
}

std::vector<Jet> flow_taylor(std::span<const double> x0, const DerivedFieldTable& table, const GeometricRoughPath& w,
                             std::span<const double> partition, int k) {
  check_partition(partition, w, "flow_taylor");
  const std::size_t words = words_up_to(table.shape(), std::min(table.level(), w.level()));
  auto J = identity_jets(x0, k);
  std::vector<double> x(x0.begin(), x0.end());
  for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
    const auto f = table.taylor(x, k);
    const auto g = w.increment(partition[j], partition[j + 1]);
    std::vector<Jet> step = f[0];
    accumulate_step(step, f, g, words);
    J = taylor_substitute(std::span<const Jet>(step), std::span<const Jet>(J));
    for (std::size_t c = 0; c < x.size(); ++c) x[c] = J[c].value();
    check_state(x, 1e150, j, partition[j], partition[j + 1]);
  }
  return J;
}

// ---------------------------------------------------------------- Cor. 3.7 check

std::vector<DavieCheck> partial_davie_check(std::span<const double> x0, const VectorFieldSystem& v,
                                            const RoughPathPtr& w, const std::vector<Word>& alphas,
                                            std::span<const double> grid, double mesh) {
  if (!w) throw InputError("rde", "partial_davie_check", "missing driver");
  int k = 0;
  for (const auto& a : alphas) k = std::max(k, static_cast<int>(a.size()));
  const DerivedFieldTable table(v, w->level());
  const auto ft = table.taylor(x0, k);
  const int n = v.n();
  std::vector<std::vector<int>> exps;
  for (const auto& a : alphas) exps.push_back(exponents_of(a, n));
  // d^alpha F_w(x0), [alpha][word][component]
  std::vector<std::vector<std::vector<double>>> df(alphas.size());
  for (std::size_t q = 0; q < alphas.size(); ++q)
    for (const auto& fw : ft) {
      std::vector<double> vals;
      for (const auto& j : fw) vals.push_back(j.partial(exps[q]));
      df[q].push_back(std::move(vals));
    }
  const double expected = (default_level(w->gamma()) + 1) * w->gamma();
  const std::vector<double> exp_all(alphas.size(), expected);
  const auto fits = dyadic_orders(
      grid, alphas.size(),
      [&](std::size_t i, std::size_t j, std::span<double> out) {
        const auto part = mesh_partition(grid[i], grid[j], mesh);
        const auto J = flow_taylor(x0, table, *w, part, k);
        const auto g = w->increment(grid[i], grid[j]);
        for (std::size_t q = 0; q < alphas.size(); ++q) {
          double worst = 0.0;
          for (int c = 0; c < n; ++c) {
            double predicted = 0.0;
            for (std::size_t t = 0; t < ft.size(); ++t) predicted += df[q][t][static_cast<std::size_t>(c)] * g.at(t);
            worst = std::max(worst, std::abs(J[static_cast<std::size_t>(c)].partial(exps[q]) - predicted));
          }
          out[q] = worst;
        }
      },
      exp_all);
  std::vector<DavieCheck> out;
  for (std::size_t q = 0; q < alphas.size(); ++q) out.push_back({alphas[q], fits[q]});
  return out;
}

// ---------------------------------------------------------------- Gamma operators

std::vector<std::vector<double>> gamma_values(const DerivedFieldTable& table, std::span<const Jet> phi_taylor,
                                              std::span<const std::vector<double>> fields) {
  const auto& shape = table.shape();
  std::vector<std::vector<double>> out(shape.size());
  for (const auto& j : phi_taylor) out[0].push_back(j.value());
  for (std::size_t i = 1; i < shape.size(); ++i) {
    const Word w = shape.word(i);
    std::vector<double> acc(phi_taylor.size(), 0.0);
    for (int k = 1; k <= static_cast<int>(w.size()); ++k) {
      const double inv = 1.0 / factorial(k);
      for (const auto& e : deshuffles(w, k).entries) {
        std::vector<std::span<const double>> dirs;
        for (const auto& part : e.parts) dirs.emplace_back(fields[shape.index(part)]);
        const auto term = multilinear(phi_taylor, dirs);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += inv * e.multiplicity * term[c];
      }
    }
    out[i] = std::move(acc);
  }
  return out;
}

SmoothFunction gamma_operator(const Word& w, const VectorFieldSystem& v, const SmoothFunction& phi) {
  if (phi.n_in() != v.n()) throw InputError("rde", "gamma_operator", "phi input dimension must be n");
  if (w.empty()) return phi;
  if (w.max_letter() > v.d()) throw InputError("rde", "gamma_operator", "letter beyond d");
  const int len = static_cast<int>(w.size());
  const int order = std::min(reduced_order(phi.order(), len), reduced_order(v.order(), len - 1));
  if (order < 0) throw OrderError("rde", "gamma_operator", "insufficient derivative order for |w| = " + std::to_string(len));
  const DerivedFieldTable table(v, len);
  return SmoothFunction::from_taylor(v.n(), phi.n_out(), order, [table, phi, w, len](std::span<const double> x, int k) {
    const auto ft = table.taylor(x, k, len);
    const auto pt = phi.taylor(x, k + len);
    std::vector<Jet> acc;
    for (int c = 0; c < phi.n_out(); ++c) acc.push_back(Jet(MonomialBasis::get(static_cast<int>(x.size()), k), k));
    for (int m = 1; m <= len; ++m) {
      const double inv = 1.0 / factorial(m);
      for (const auto& e : deshuffles(w, m).entries) {
        std::vector<std::span<const Jet>> dirs;
        for (const auto& part : e.parts) dirs.emplace_back(ft[table.shape().index(part)]);
        const auto term = rebased(multilinear_jets(pt, dirs, k), k);
        for (std::size_t c = 0; c < acc.size(); ++c) acc[c].add_scaled(term[c], inv * e.multiplicity);
      }
    }
    return acc;
  });
}

SmoothFunction gamma_composed(const Word& w, const VectorFieldSystem& v, const SmoothFunction& phi) {
  if (phi.n_in() != v.n()) throw InputError("rde", "gamma_composed", "phi input dimension must be n");
  if (w.max_letter() > v.d()) throw InputError("rde", "gamma_composed", "letter beyond d");
  SmoothFunction psi = phi;
  for (std::size_t pos = w.size(); pos-- > 0;) {
    const SmoothFunction& f = v.field(w[pos]);
    const int order = std::min(reduced_order(psi.order(), 1), f.order());
    if (order < 0) throw OrderError("rde", "gamma_composed", "insufficient derivative order");
    const SmoothFunction inner = psi;
    psi = SmoothFunction::from_taylor(v.n(), phi.n_out(), order, [inner, f](std::span<const double> x, int k) {
      const auto p = inner.taylor(x, k + 1);
      const auto fj = f.taylor(x, k);
      std::vector<Jet> out;
      for (const auto& pc : p) {
        Jet acc(fj.front().basis(), k);
        for (std::size_t j = 0; j < fj.size(); ++j) acc.add_product(fj[j], pc.derivative(static_cast<int>(j)));
        out.push_back(std::move(acc));
      }
      return rebased(std::move(out), k);
    });
  }
  return psi;
}

// ---------------------------------------------------------------- Ito formula

ItoReport ito_check(const SmoothFunction& phi, const RdeSolution& x, const VectorFieldSystem& v) {
  const auto& lift = x.lift;
  const auto& w = lift.reference();
  const int ng = lift.order() - 1;
  ItoReport rep;

  std::vector<std::vector<double>> total(lift.size(), std::vector<double>(static_cast<std::size_t>(phi.n_out()), 0.0));
  for (int i = 1; i <= v.d(); ++i) {
    const auto integrand = compose(gamma_operator(Word{i}, v, phi), lift);
    const auto integral = rough_integral(integrand, i);
    for (std::size_t j = 0; j < lift.size(); ++j)
      for (std::size_t c = 0; c < total[j].size(); ++c) total[j][c] += integral.values[j][c];
  }
  const auto phi0 = phi(lift.primal(0));
  for (std::size_t j = 0; j < lift.size(); ++j) {
    const auto pj = phi(lift.primal(j));
    for (std::size_t c = 0; c < pj.size(); ++c)
      rep.identity_residual = std::max(rep.identity_residual, std::abs(pj[c] - phi0[c] - total[j][c]));
  }

  if (lift.size() < 2 * kMinWindows + 1) return rep;
  const DerivedFieldTable table(v, ng);
  const auto& shape = table.shape();
  std::vector<std::vector<std::vector<double>>> gam;  // [time][word][component]
  for (std::size_t j = 0; j < lift.size(); ++j) {
    const auto xj = lift.primal(j);
    const auto f = table.values(xj);
    gam.push_back(gamma_values(table, phi.taylor(xj, ng), f));
  }
  std::vector<double> expected;
  for (std::size_t q = 0; q < shape.size(); ++q) expected.push_back((ng + 1 - shape.length_of(q)) * w.gamma());
  const auto& times = lift.times();
  const auto fits = dyadic_orders(
      times, shape.size(),
      [&](std::size_t a, std::size_t b, std::span<double> out) {
        const auto g = w.increment(times[a], times[b]);
        const TensorShape gs(shape.dim(), ng);
        for (std::size_t q = 0; q < shape.size(); ++q) {
          const int lw = shape.length_of(q);
          std::vector<double> r = gam[b][q];
          for (std::size_t u = 0; u < words_up_to(gs, ng - lw); ++u) {
            const double gu = g.at(u);
            if (gu == 0.0) continue;
            // index of the concatenation uw
            const int lu = gs.length_of(u);
            const std::size_t ru = u - gs.offset(lu), rw = q - shape.offset(lw);
            const std::size_t uw = shape.offset(lu + lw) + ru * shape.power(lw) + rw;
            for (std::size_t c = 0; c < r.size(); ++c) r[c] -= gam[a][uw][c] * gu;
          }
          out[q] = max_abs(r);
        }
      },
      expected);
  for (std::size_t q = 0; q < shape.size(); ++q) {
    rep.graded.push_back({shape.word(q), fits[q]});
    rep.graded_pass = rep.graded_pass && fits[q].pass;
  }
  return rep;
}

// ---------------------------------------------------------------- Faa di Bruno

std::vector<double> faa_di_bruno(const SmoothFunction& f, const SmoothFunction& g, const Word& alpha,
                                 std::span<const double> x) {
  if (f.n_in() != g.n_out()) throw InputError("rde", "faa_di_bruno", "f input must match g output");
  if (alpha.max_letter() > g.n_in()) throw InputError("rde", "faa_di_bruno", "derivative index beyond n");
  const auto gx = g(x);
  if (alpha.empty()) return f(gx);
  const int len = static_cast<int>(alpha.size());
  const auto ft = f.taylor(gx, len);
  std::map<Word, std::vector<double>> dg;
  std::vector<double> out(static_cast<std::size_t>(f.n_out()), 0.0);
  for (int k = 1; k <= len; ++k) {
    const double inv = 1.0 / factorial(k);
    for (const auto& e : deshuffles(alpha, k).entries) {
      std::vector<std::span<const double>> dirs;
      for (const auto& b : e.parts) {
        auto it = dg.find(b);
        if (it == dg.end()) it = dg.emplace(b, g.partial(x, b)).first;
        dirs.emplace_back(it->second);
      }
      const auto term = multilinear(ft, dirs);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] += inv * e.multiplicity * term[c];
    }
  }
  return out;
}

}  // namespace roughkit
