#include "criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "roughkit/controlled.hpp"
#include "roughkit/errors.hpp"
#include "roughkit/rde.hpp"
#include "roughkit/rpde.hpp"
#include "support.hpp"
#include "symbolic.hpp"

namespace acceptance {

using namespace roughkit;
using testing::Gen;

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

void le(Result& r, std::string name, double value, double bound, std::string note = {}) {
  r.checks.push_back({std::move(name), value, "<=", bound, value <= bound, std::move(note)});
}

void ge(Result& r, std::string name, double value, double bound, std::string note = {}) {
  r.checks.push_back({std::move(name), value, ">=", bound, value >= bound, std::move(note)});
}

void truth(Result& r, std::string name, bool ok, std::string note = {}) {
  r.checks.push_back({std::move(name), ok ? 1.0 : 0.0, "==", 1.0, ok, std::move(note)});
}

std::string fit_note(const OrderFit& f) {
  return "slope " + num(f.slope) + ", expected " + num(f.expected) + ", " + std::to_string(f.used) + "/" +
         std::to_string(f.scales.size()) + " scales";
}

void slope_at_least(Result& r, const std::string& name, const OrderFit& f) {
  ge(r, name, f.slope, f.expected - f.tolerance, fit_note(f));
}

void slope_within(Result& r, const std::string& name, const OrderFit& f, double tol) {
  le(r, name, std::abs(f.slope - f.expected), tol, fit_note(f));
}

void graded(Result& r, const std::string& name, const std::vector<WordOrder>& words) {
  for (const auto& w : words) slope_at_least(r, name + " " + w.word.to_string(), w.fit);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

SmoothFunction poly(int n, std::vector<std::vector<Monomial>> comps) { return SmoothFunction::polynomial(n, comps); }

VectorFieldSystem planar_fields(double scale) {
  auto f1 = poly(2, {{{0.5, {0, 0}}, {0.2, {0, 2}}}, {{-0.3, {1, 0}}, {0.1, {0, 0}}}});
  auto f2 = poly(2, {{{0.2, {1, 1}}}, {{0.4, {0, 0}}, {-0.1, {2, 0}}}});
  return VectorFieldSystem({scale * f1, scale * f2});
}

VectorFieldSystem constant_fields() {
  return VectorFieldSystem({SmoothFunction::constant(2, {1.0, -0.5}), SmoothFunction::constant(2, {0.3, 0.8})});
}

// x1^2 - x1 x2 + 0.5 x2^3
SmoothFunction terminal_poly() { return poly(2, {{{1.0, {2, 0}}, {-1.0, {1, 1}}, {0.5, {0, 3}}}}); }

std::vector<SmoothFunction> test_family() {
  return {poly(2, {{{1.0, {1, 0}}}}), poly(2, {{{1.0, {0, 2}}, {0.5, {1, 1}}}}),
          poly(2, {{{1.0, {3, 0}}, {-0.2, {0, 1}}}})};
}

std::vector<std::vector<double>> square_grid(int k, double r) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.push_back({-r + 2 * r * i / (k - 1), -r + 2 * r * j / (k - 1)});
  return out;
}

ParticleMeasure random_cloud(Gen& g, int m) {
  ParticleMeasure mu;
  for (int j = 0; j < m; ++j) {
    mu.points.push_back({g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5)});
    mu.weights.push_back(g.uniform(0.1, 1.0));
  }
  return mu;
}

PiecewiseLinearPath circle(int segments) {
  return testing::sample_curve(
      [](double t) {
        return std::vector<double>{std::cos(2 * std::numbers::pi * t), std::sin(2 * std::numbers::pi * t)};
      },
      segments);
}

RoughPathPtr lift(const PiecewiseLinearPath& p, double gamma, int level = 0) {
  return std::make_shared<const GeometricRoughPath>(lift_pl(p, gamma, level));
}

oracle::Matrix random_matrix(Gen& g, int n, double scale) {
  oracle::Matrix a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (auto& row : a)
    for (auto& v : row) v = scale * g.uniform(-1, 1);
  return a;
}

SmoothFunction random_trig(Gen& g, int n_in, int n_out) {
  std::vector<std::vector<TrigTerm>> comps;
  for (int c = 0; c < n_out; ++c) {
    std::vector<TrigTerm> terms;
    for (int k = 0; k < 2; ++k) terms.push_back({g.uniform(-1, 1), g.vec(n_in, -1.2, 1.2), g.uniform(0, 3)});
    comps.push_back(terms);
  }
  return SmoothFunction::trig(n_in, comps);
}

Word word_of(const oracle::Letters& l) { return Word(l); }

// ---------------------------------------------------------------- 1

void algebraic_exactness(Result& r) {
  Gen g(101);
  const int d = 2, level = 5, segments = 16;
  std::vector<double> times;
  std::vector<std::vector<double>> pts{{0.0, 0.0}};
  for (int j = 0; j <= segments; ++j) times.push_back(static_cast<double>(j) / segments);
  for (int j = 0; j < segments; ++j) {
    auto p = pts.back();
    for (auto& x : p) x += g.uniform(-1, 1) / 4;
    pts.push_back(p);
  }
  const auto w = lift_pl(PiecewiseLinearPath(times, pts), 0.2, level);
  const auto words = oracle::words_up_to(d, level);

  // signature against the product of segment exponentials
  double seg_err = 0.0, sig_err = 0.0;
  oracle::Series s{{{}, 1.0}};
  for (int j = 0; j < segments; ++j) {
    std::vector<double> dx{pts[j + 1][0] - pts[j][0], pts[j + 1][1] - pts[j][1]};
    const auto e = oracle::segment_signature(dx, level);
    const auto inc = w.increment(times[j], times[j + 1]);
    for (const auto& u : words) seg_err = std::max(seg_err, std::abs(inc[word_of(u)] - e.at(u)));
    s = oracle::concat(s, e, level);
    const auto v = w.value(times[j + 1]);
    for (const auto& u : words) sig_err = std::max(sig_err, std::abs(v[word_of(u)] - s[u]));
  }
  le(r, "segment signature x^k/k!", seg_err, 1e-14);
  le(r, "signature vs segment product oracle", sig_err, 1e-12);

  double chen = 0.0;
  int triples = 0;
  for (int a = 0; a <= segments; ++a)
    for (int b = a + 1; b <= segments; ++b)
      for (int c = b + 1; c <= segments; ++c, ++triples) {
        const auto lhs = w.increment(times[a], times[c]);
        const auto rhs = w.increment(times[a], times[b]) * w.increment(times[b], times[c]);
        chen = std::max(chen, max_abs_diff(lhs.tensor(), rhs.tensor()));
      }
  le(r, "Chen relation", chen, 1e-12, std::to_string(triples) + " triples");

  struct Pair {
    Word u, v;
    std::vector<std::pair<Word, long long>> terms;
  };
  std::vector<Pair> pairs;
  for (const auto& u : words)
    for (const auto& v : words) {
      if (u.empty() || v.empty() || static_cast<int>(u.size() + v.size()) > level) continue;
      Pair p{word_of(u), word_of(v), {}};
      for (const auto& [x, c] : oracle::shuffle(u, v)) p.terms.emplace_back(word_of(x), c);
      pairs.push_back(std::move(p));
    }
  double character = 0.0, inverse = 0.0;
  const auto unit = TruncatedTensor::unit(d, level);
  for (int a = 0; a <= segments; ++a)
    for (int b = a + 1; b <= segments; ++b) {
      const auto x = w.increment(times[a], times[b]);
      for (const auto& p : pairs) {
        double rhs = 0.0;
        for (const auto& [z, c] : p.terms) rhs += static_cast<double>(c) * x[z];
        character = std::max(character, std::abs(x[p.u] * x[p.v] - rhs));
      }
      const auto inv = group_inverse(x);
      inverse = std::max(inverse, max_abs_diff((inv * x).tensor(), unit));
      inverse = std::max(inverse, max_abs_diff((x * inv).tensor(), unit));
    }
  le(r, "character property", character, 1e-10, std::to_string(pairs.size()) + " word pairs per increment");
  le(r, "group_inverse", inverse, 1e-12);
}

// ---------------------------------------------------------------- 2

void deshuffle_equivalence(Result& r) {
  long long mismatched_sets = 0, mismatched_mult = 0, tuples = 0, cases = 0;
  for (int len = 1; len <= 5; ++len)
    for (const auto& w : oracle::words({1, 2, 3}, len)) {
      auto sorted = w;
      std::sort(sorted.begin(), sorted.end());
      std::vector<int> alphabet(sorted.begin(), std::unique(sorted.begin(), sorted.end()));
      sorted = w;
      std::sort(sorted.begin(), sorted.end());
      for (int k = 1; k <= len; ++k, ++cases) {
        std::map<std::vector<oracle::Letters>, long long> brute;
        for (const auto& comp : oracle::compositions(len, k)) {
          std::vector<std::vector<oracle::Letters>> choices;
          for (int part : comp) choices.push_back(oracle::words(alphabet, part));
          std::vector<std::size_t> pick(comp.size(), 0);
          while (true) {
            std::vector<oracle::Letters> parts;
            oracle::Letters all;
            for (std::size_t i = 0; i < comp.size(); ++i) {
              parts.push_back(choices[i][pick[i]]);
              all.insert(all.end(), parts.back().begin(), parts.back().end());
            }
            std::sort(all.begin(), all.end());
            if (all == sorted) {
              const auto prod = oracle::shuffle_all(parts);
              if (auto it = prod.find(w); it != prod.end() && it->second > 0) brute[parts] = it->second;
            }
            std::size_t i = 0;
            while (i < pick.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
            if (i == pick.size()) break;
          }
        }
        const auto& table = deshuffles(word_of(w), k);
        std::map<std::vector<oracle::Letters>, long long> lib;
        for (const auto& e : table.entries) {
          std::vector<oracle::Letters> parts;
          for (const auto& p : e.parts) parts.emplace_back(p.begin(), p.end());
          lib[parts] = e.multiplicity;
        }
        tuples += static_cast<long long>(brute.size());
        std::set<std::vector<oracle::Letters>> a, b;
        for (const auto& [p, m] : brute) a.insert(p);
        for (const auto& [p, m] : lib) b.insert(p);
        if (a != b || lib.size() != table.entries.size()) {
          ++mismatched_sets;
          continue;
        }
        for (const auto& [p, m] : brute)
          if (lib.at(p) != m) ++mismatched_mult;
      }
    }
  le(r, "set mismatches", static_cast<double>(mismatched_sets), 0.0,
     std::to_string(cases) + " (word, k) cases, " + std::to_string(tuples) + " tuples");
  le(r, "multiplicity mismatches", static_cast<double>(mismatched_mult), 0.0);
}

// ---------------------------------------------------------------- 3

void faa_di_bruno_vs_symbolic(Result& r) {
  Gen g(301);
  double worst = 0.0;
  long long compared = 0;
  for (int pair = 0; pair < 20; ++pair) {
    const int n = 1 + pair % 3, m = 1 + (pair / 3) % 3, p = 1 + pair % 2;
    const auto inner = (pair / 2) % 2 ? random_trig(g, n, m) : testing::random_polynomial(g, n, m, 3, 4);
    const auto outer = pair % 2 ? random_trig(g, m, p) : testing::random_polynomial(g, m, p, 3, 4);
    const auto ge = sym::from_function(inner);
    auto composed = sym::from_function(outer);
    sym::Substituter sub(ge);
    for (auto& e : composed) e = sub(e);

    std::map<oracle::Letters, std::vector<sym::Expr>> derivs{{{}, composed}};
    std::vector<int> alphabet;
    for (int i = 1; i <= n; ++i) alphabet.push_back(i);
    for (int len = 1; len <= 4; ++len)
      for (const auto& alpha : oracle::words(alphabet, len)) {
        const oracle::Letters parent(alpha.begin(), alpha.end() - 1);
        std::vector<sym::Expr> d;
        for (const auto& e : derivs.at(parent)) d.push_back(sym::diff(e, alpha.back() - 1));
        derivs[alpha] = d;
        for (int k = 0; k < 2; ++k) {
          const auto x = g.vec(n);
          const auto lib = faa_di_bruno(outer, inner, word_of(alpha), x);
          for (int c = 0; c < p; ++c) {
            worst = std::max(worst, rel(lib[static_cast<std::size_t>(c)], sym::eval(d[static_cast<std::size_t>(c)], x)));
            ++compared;
          }
        }
      }
  }
  le(r, "relative error vs symbolic derivatives", worst, 1e-9, std::to_string(compared) + " partials");
}

// ---------------------------------------------------------------- 4

void derived_fields(Result& r) {
  Gen g(401);
  {
    const VectorFieldSystem v({testing::random_polynomial(g, 2, 2, 3, 4, 0.5), testing::random_polynomial(g, 2, 2, 3, 4, 0.5)});
    const DerivedFieldTable table(v, 4);
    const auto& shape = table.shape();
    // F_e = x, F_{iw} = DF_w f_i
    std::vector<std::vector<sym::Expr>> fe(shape.size());
    std::vector<std::vector<sym::Expr>> fi;
    for (int i = 1; i <= 2; ++i) fi.push_back(sym::from_function(v.field(i)));
    for (std::size_t q = 0; q < shape.size(); ++q) {
      const auto w = shape.word(q);
      if (w.empty()) {
        fe[q] = {sym::var(0), sym::var(1)};
        continue;
      }
      const auto& rest = fe[shape.index(w.suffix_from(1))];
      const auto& f = fi[static_cast<std::size_t>(w[0] - 1)];
      for (int c = 0; c < 2; ++c) {
        sym::Expr e = sym::cst(0.0);
        for (int m = 0; m < 2; ++m) e = sym::add(e, sym::mul(sym::diff(rest[static_cast<std::size_t>(c)], m), f[static_cast<std::size_t>(m)]));
        fe[q].push_back(e);
      }
    }
    double forms = 0.0, symbolic = 0.0;
    for (int k = 0; k < 50; ++k) {
      const auto x = g.vec(2);
      const auto a = table.values(x);
      const auto b = table.shuffle_values(x);
      for (std::size_t q = 0; q < shape.size(); ++q)
        for (std::size_t c = 0; c < 2; ++c) {
          forms = std::max(forms, rel(a[q][c], b[q][c]));
          symbolic = std::max(symbolic, rel(a[q][c], sym::eval(fe[q][c], x)));
        }
    }
    le(r, "recursion vs shuffle form", forms, 1e-9, "50 points, |w| <= 4");
    le(r, "recursion vs symbolic oracle", symbolic, 1e-9);
  }
  {
    const int n = 3;
    std::vector<oracle::Matrix> a{random_matrix(g, n, 1.0), random_matrix(g, n, 1.0)};
    const VectorFieldSystem v({SmoothFunction::linear(a[0]), SmoothFunction::linear(a[1])});
    const DerivedFieldTable table(v, 4);
    const auto& shape = table.shape();
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const auto x = g.vec(n);
      const auto f = table.values(x);
      for (std::size_t q = 0; q < shape.size(); ++q) {
        auto m = oracle::identity(n);
        for (int l : shape.word(q)) m = oracle::matmul(a[static_cast<std::size_t>(l - 1)], m);
        const auto y = oracle::apply(m, x);
        for (std::size_t c = 0; c < y.size(); ++c) worst = std::max(worst, rel(f[q][c], y[c]));
      }
    }
    le(r, "linear closed form A_ik...A_i1 x", worst, 1e-12);
  }
}

// ---------------------------------------------------------------- 5

void rough_integral_criterion(Result& r) {
  {
    const int segments = 8192;
    const auto p = circle(segments);
    auto w = lift(p, 0.4, 2);
    const auto part = mesh_partition(0, 1, 1e-4);
    const auto x = ControlledPath::linear_in_driver(w, 2, part, {p.values().front()[0]}, {{1.0, 0.0}});
    const double got = rough_integral(x, 2, part).values.back()[0];
    double rs = 0.0;
    const auto& v = p.values();
    for (int j = 0; j < segments; ++j) rs += 0.5 * (v[j][0] + v[j + 1][0]) * (v[j + 1][1] - v[j][1]);
    le(r, "int W1 dW2 vs Riemann-Stieltjes sum", std::abs(got - rs), 1e-6);
    le(r, "int W1 dW2 vs pi", std::abs(got - std::numbers::pi), 1e-6);
  }
  {
    // Mean local remainder over all windows of an ensemble of PL-fBm paths, H = gamma.
    const int paths = 8, knots = 2049, per_cell = 2, sub = 4;
    const double gamma = 0.4;
    const int cells = (knots - 1) / per_cell, step = per_cell * sub;
    const auto all = sample_fbm(gamma, 2 * paths, knots, 501);
    const auto fine = testing::uniform_grid((knots - 1) * sub);
    const auto coarse = testing::uniform_grid(cells);
    const auto phi = SmoothFunction::trig(2, {{{1.0, {1.0, -0.5}, 0.3}, {0.5, {0.0, 0.7}, 1.1}}});
    const auto psi = poly(2, {{{1.0, {2, 0}}, {-0.4, {1, 2}}, {0.2, {0, 1}}}});
    std::vector<std::size_t> strides;
    for (std::size_t h = 1; h <= static_cast<std::size_t>(cells / 8); h *= 2) strides.push_back(h);
    std::vector<double> scales;
    for (auto h : strides) scales.push_back(coarse[h]);
    std::vector<std::vector<double>> mean(2, std::vector<double>(strides.size(), 0.0));
    std::vector<std::size_t> windows(strides.size(), 0);
    for (int m = 0; m < paths; ++m) {
      std::vector<std::vector<double>> values;
      for (const auto& v : all.values()) values.push_back({v[2 * m], v[2 * m + 1]});
      const PiecewiseLinearPath path(all.times(), values);
      auto w = lift(path, gamma, 2);
      const auto x = ControlledPath::linear_in_driver(w, 2, fine, values.front(), {{0.3, 0.0}, {0.0, 0.3}});
      const auto y = compose(phi, x);
      const auto& shape = y.shape();
      for (int letter = 1; letter <= 2; ++letter) {
        const auto in = rough_integral(y, letter, fine);
        const int q = in.sum_order;
        for (std::size_t k = 0; k < strides.size(); ++k) {
          const auto h = strides[k];
          for (std::size_t a = 0; a + h <= static_cast<std::size_t>(cells); ++a) {
            // sum_{|u| <= q} <e_u*, Y_s> <W_st, e_{u i}>
            const auto inc = w->increment(coarse[a], coarse[a + h]);
            double expansion = 0.0;
            for (std::size_t u = 0; u < shape.offset(q + 1); ++u)
              expansion += y.coeff(a * step, u)[0] * inc[shape.word(u).appended(letter)];
            mean[letter - 1][k] += std::abs(in.values[(a + h) * step][0] - in.values[a * step][0] - expansion);
            if (letter == 1) ++windows[k];
          }
        }
      }
      if (m > 0) continue;
      const auto z = compose(psi, x);
      const auto both = 0.7 * y + (-1.3) * z;
      for (int letter = 1; letter <= 2; ++letter) {
        const auto a = rough_integral(y, letter, fine), b = rough_integral(z, letter, fine),
                   c = rough_integral(both, letter, fine);
        double worst = 0.0;
        for (std::size_t k = 0; k < fine.size(); ++k)
          worst = std::max(worst, std::abs(c.values[k][0] - (0.7 * a.values[k][0] - 1.3 * b.values[k][0])));
        le(r, "linearity, letter " + std::to_string(letter), worst, 1e-12);
      }
    }
    for (int letter = 1; letter <= 2; ++letter) {
      for (std::size_t k = 0; k < strides.size(); ++k) mean[letter - 1][k] /= static_cast<double>(windows[k]);
      const auto fit = fit_order(scales, mean[letter - 1], 3 * gamma);
      slope_within(r, "mean remainder slope, letter " + std::to_string(letter), fit, 0.15);
      ge(r, "dyadic scales, letter " + std::to_string(letter), static_cast<double>(fit.used), 8.0);
    }
  }
}

// ---------------------------------------------------------------- 6

void davie_linear(Result& r) {
  const double lambda = 1.0, x0 = 1.0;
  const auto p = testing::sample_curve(
      [](double t) { return std::vector<double>{t + 0.25 * std::sin(2 * std::numbers::pi * t)}; }, 4096);
  const double exact = x0 * std::exp(lambda * (p.values().back()[0] - p.values().front()[0]));
  const VectorFieldSystem v({SmoothFunction::linear({{lambda}})});
  const std::vector<std::pair<int, double>> lifts{{1, 0.9}, {2, 0.45}, {3, 0.3}};
  for (const auto& [n, gamma] : lifts) {
    auto w = lift(p, gamma);
    std::vector<double> hs, errs;
    for (int k = 3; k <= 9; ++k) {
      const double h = std::ldexp(1.0, -k);
      const auto sol = solve_rde(std::vector<double>{x0}, v, w, mesh_partition(0, 1, h), {false});
      hs.push_back(h);
      errs.push_back(std::abs(sol.terminal()[0] - exact));
    }
    slope_within(r, "global order, N = " + std::to_string(n), fit_order(hs, errs, n), 0.2);
  }
}

// ---------------------------------------------------------------- 7

void flow_jets(Result& r) {
  Gen g(701);
  {
    auto w = lift(circle(256), 0.45, 2);
    const auto v = planar_fields(1.0);
    const DerivedFieldTable table(v, w->level());
    const auto part = mesh_partition(0, 1, 1.0 / 256);
    double lifted = 0.0, fast = 0.0;
    for (int k = 0; k < 5; ++k) {
      const auto x = g.vec(2, -0.5, 0.5);
      const auto jets = solve_flow_jets(x, v, w, part, 2);
      const auto taylor = flow_taylor(x, table, *w, part, 1);
      const double eps = 1e-5;
      std::vector<std::vector<double>> dx(2, std::vector<double>(2)), fd = dx, tj = dx;
      double scale = 1.0;
      for (int j = 0; j < 2; ++j) {
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(j)] += eps;
        xm[static_cast<std::size_t>(j)] -= eps;
        const auto a = flow(xp, table, *w, part), b = flow(xm, table, *w, part);
        const auto col = jets.partial(jets.times.size() - 1, Word{j + 1});
        std::vector<int> e{j == 0, j == 1};
        for (int c = 0; c < 2; ++c) {
          dx[c][j] = col[static_cast<std::size_t>(c)];
          fd[c][j] = (a[c] - b[c]) / (2 * eps);
          tj[c][j] = taylor[static_cast<std::size_t>(c)].partial(e);
          scale = std::max(scale, std::abs(dx[c][j]));
        }
      }
      for (int c = 0; c < 2; ++c)
        for (int j = 0; j < 2; ++j) {
          lifted = std::max(lifted, std::abs(dx[c][j] - fd[c][j]) / scale);
          fast = std::max(fast, std::abs(tj[c][j] - fd[c][j]) / scale);
        }
    }
    le(r, "DX (lifted system) vs central differences", lifted, 1e-4);
    le(r, "DX (Taylor maps) vs central differences", fast, 1e-4);
  }
  {
    // per-scale sup defects averaged over an ensemble of PL-fBm drivers
    const int paths = 8;
    const double gamma = 0.4;
    const auto all = sample_fbm(0.5, 2 * paths, 257, 702);
    const std::vector<Word> alphas{Word{}, Word{1}, Word{2}, Word{1, 1}, Word{2, 1}};
    std::vector<std::vector<double>> mean(alphas.size());
    std::vector<double> scales;
    for (int m = 0; m < paths; ++m) {
      std::vector<std::vector<double>> values;
      for (const auto& v : all.values()) values.push_back({v[2 * m], v[2 * m + 1]});
      auto w = lift(PiecewiseLinearPath(all.times(), values), gamma);
      const auto checks = partial_davie_check(std::vector<double>{0.1, 0.2}, planar_fields(0.3), w, alphas,
                                              testing::uniform_grid(256), 1.0 / 2048);
      scales = checks.front().fit.scales;
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        mean[a].resize(scales.size(), 0.0);
        for (std::size_t k = 0; k < scales.size(); ++k) mean[a][k] += checks[a].fit.defects[k] / paths;
      }
    }
    for (std::size_t a = 0; a < alphas.size(); ++a)
      slope_at_least(r, "expansion of d^" + alphas[a].to_string() + " X",
                     fit_order(scales, mean[a], (default_level(gamma) + 1) * gamma));
  }
  {
    // one Davie step at level 2 of linear fields: DX = I + sum A_i W^i + sum A_j A_i W^ij
    std::vector<oracle::Matrix> a{random_matrix(g, 2, 0.7), random_matrix(g, 2, 0.7)};
    const VectorFieldSystem v({SmoothFunction::linear(a[0]), SmoothFunction::linear(a[1])});
    auto w = testing::fbm_lift(129, 0.45, 0.4, 2, 703, 2);
    const DerivedFieldTable table(v, 2);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      double s = g.uniform(0, 1), t = g.uniform(0, 1);
      if (s > t) std::swap(s, t);
      const auto x = g.vec(2);
      const std::vector<double> part{s, t};
      const auto jets = flow_taylor(x, table, *w, part, 1);
      const auto inc = w->increment(s, t);
      auto m = oracle::identity(2);
      for (int i = 1; i <= 2; ++i) {
        const auto& ai = a[static_cast<std::size_t>(i - 1)];
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) m[p][q] += ai[p][q] * inc[Word{i}];
        for (int j = 1; j <= 2; ++j) {
          const auto aji = oracle::matmul(a[static_cast<std::size_t>(j - 1)], ai);
          for (int p = 0; p < 2; ++p)
            for (int q = 0; q < 2; ++q) m[p][q] += aji[p][q] * inc[Word{i, j}];
        }
      }
      for (int c = 0; c < 2; ++c)
        for (int j = 0; j < 2; ++j) {
          std::vector<int> e{j == 0, j == 1};
          worst = std::max(worst, std::abs(jets[static_cast<std::size_t>(c)].partial(e) - m[c][j]));
        }
    }
    le(r, "two-term DX expansion, linear fields", worst, 1e-12);
  }
}

// ---------------------------------------------------------------- 8

void ito(Result& r) {
  const auto phi = poly(2, {{{1.0, {2, 0}}, {-0.5, {1, 1}}, {0.3, {0, 3}}}});
  {
    auto w = lift(circle(4096), 0.45, 2);
    const auto v = planar_fields(1.0);
    const auto sol = solve_rde(std::vector<double>{0.1, -0.2}, v, w, mesh_partition(0, 1, 1e-4));
    le(r, "identity residual, smooth driver, mesh 1e-4", ito_check(phi, sol, v).identity_residual, 1e-6);
  }
  {
    auto w = testing::fbm_lift(257, 0.4, 0.3, 3, 801, 2);
    const auto v = planar_fields(0.3);
    const auto sol = solve_rde(std::vector<double>{0.1, -0.2}, v, w, testing::uniform_grid(2048));
    const auto rep = ito_check(phi, sol, v);
    graded(r, "graded slope", rep.graded);
    truth(r, "graded report passes", rep.graded_pass);
  }
}

// ---------------------------------------------------------------- 9

void transport(Result& r) {
  {
    auto w = testing::fbm_lift(129, 0.4, 0.3, 3, 901, 2);
    TransportProblem p{constant_fields(), terminal_poly(), w, 1.0, 1.0 / 256};
    const auto c = constant_fields();
    Gen g(902);
    std::vector<TransportQuery> qs;
    for (int k = 0; k < 20; ++k) qs.push_back({g.uniform(0, 1), g.vec(2)});
    const auto u = solve_transport(p, qs);
    double worst = 0.0;
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const auto inc = w->increment(qs[k].s, 1.0);
      auto y = qs[k].x;
      for (int i = 1; i <= 2; ++i) {
        const auto ci = c.field(i)(y);
        for (std::size_t a = 0; a < 2; ++a) y[a] += ci[a] * inc[Word{i}];
      }
      worst = std::max(worst, std::abs(u[k][0] - terminal_poly()(y)[0]));
    }
    le(r, "constant-field closed form", worst, 1e-8);
  }
  const auto grid = square_grid(5, 0.5);
  const auto times = testing::uniform_grid(256);
  const std::vector<std::pair<double, RoughPathPtr>> drivers{
      {0.3, testing::fbm_lift(257, 0.4, 0.3, 3, 903, 2)},
      {0.45, testing::fbm_lift(257, 0.5, 0.45, 2, 904, 2)},
      {0.9, testing::curve_lift(256, 1, 0.9)},
  };
  for (const auto& [gamma, w] : drivers) {
    TransportProblem p{planar_fields(0.3), terminal_poly(), w, 1.0, 1.0 / 1024};
    const auto rep = verify_transport(p, transport_jets(p), grid, times);
    graded(r, "gamma " + num(gamma) + " word", rep.words);
    truth(r, "gamma " + num(gamma) + " report passes", rep.pass);
  }
}

// ---------------------------------------------------------------- 10

void continuity(Result& r) {
  Gen g(1001);
  const auto v = planar_fields(0.3);
  auto w = testing::fbm_lift(257, 0.4, 0.3, 3, 1002, 2);
  const auto mu = random_cloud(g, 16);
  const auto times = testing::uniform_grid(128);
  const double mesh = 1.0 / 1024;
  const auto rho = solve_continuity(v, w, mu, times, mesh);
  {
    const auto one = SmoothFunction::constant(2, {1.0});
    const auto masses = rho.pair(one);
    double worst = 0.0;
    for (const auto& m : masses) worst = std::max(worst, std::abs(m[0] - mu.mass()));
    le(r, "mass conservation", worst, 1e-14);
  }
  {
    TransportProblem p{v, terminal_poly(), w, 1.0, mesh};
    const std::vector<double> x{0.2, -0.1};
    const auto delta = solve_continuity(v, w, ParticleMeasure::delta(x), times, mesh);
    std::vector<TransportQuery> qs{{0.0, x}};
    for (std::size_t k = 0; k < times.size(); ++k) qs.push_back({times[k], delta.points[k][0]});
    const auto u = solve_transport(p, qs);
    double worst = 0.0;
    for (std::size_t k = 1; k < qs.size(); ++k) worst = std::max(worst, std::abs(u[k][0] - u[0][0]));
    le(r, "delta_x: u_t(X_t) = u_0(x)", worst, 1e-10);
  }
  {
    const auto rep = verify_continuity(v, w, rho, test_family());
    graded(r, "verify_continuity word", rep.words);
    truth(r, "verify_continuity passes", rep.pass);
  }
  const auto cloud = random_cloud(g, 10);
  const std::vector<double> rs{0.0, 0.1234, 0.377, 0.5001, 0.861, 1.0};
  {
    auto smooth = testing::curve_lift(64, 3, 0.3);
    TransportProblem p{planar_fields(1.0), terminal_poly(), smooth, 1.0, 1e-3};
    le(r, "duality drift, smooth driver, mesh 1e-3", duality_check(p, cloud, rs).drift, 1e-8);
  }
  {
    std::vector<double> hs, drifts;
    for (int k = 5; k <= 9; ++k) {
      const double h = std::ldexp(1.0, -k) * 0.999;
      TransportProblem p{v, terminal_poly(), w, 1.0, h};
      hs.push_back(h);
      drifts.push_back(duality_check(p, cloud, rs).drift);
    }
    const double gamma = w->gamma();
    const auto fit = fit_order(hs, drifts, (default_level(gamma) + 1) * gamma - 1, 0.0);
    slope_at_least(r, "duality drift order under refinement, rough driver", fit);
  }
}

// ---------------------------------------------------------------- 11

void negative_controls(Result& r) {
  {
    auto w = testing::fbm_lift(33, 0.4, 0.3, 3, 1101, 2);
    TransportProblem p{planar_fields(0.3), terminal_poly(), w, 1.0, 1.0 / 512};
    const auto times = testing::uniform_grid(64);
    const auto grid = square_grid(3, 0.5);
    const auto u = transport_jets(p);
    const TransportJets bad = [&](double s, std::span<const double> x, int k) {
      auto j = u(s, x, k);
      j[0] = j[0] + s * Jet::variable(j[0].basis(), 0, x[0]);
      return j;
    };
    truth(r, "verify_transport: solution passes", verify_transport(p, u, grid, times).pass);
    truth(r, "verify_transport: corrupted u fails", !verify_transport(p, bad, grid, times).pass);
  }
  {
    Gen g(1102);
    auto w = testing::fbm_lift(33, 0.4, 0.3, 3, 1103, 2);
    const auto mu = random_cloud(g, 16);
    const auto times = testing::uniform_grid(128);
    const auto rho = solve_continuity(planar_fields(0.3), w, mu, times, 1.0 / 1024);
    truth(r, "verify_continuity: pushforward passes", verify_continuity(planar_fields(0.3), w, rho, test_family()).pass);
    truth(r, "verify_continuity: frozen measure fails",
          !verify_continuity(planar_fields(0.3), w, MeasurePath::frozen(mu, times), test_family()).pass);
  }
  auto w = testing::fbm_lift(65, 0.4, 0.3, 3, 1104, 2);
  const auto v = planar_fields(0.3);
  const auto sol = solve_rde(std::vector<double>{0.2, -0.1}, v, w, testing::uniform_grid(1024));
  {
    auto all_pass = [](const std::vector<WordOrder>& ws) {
      return std::all_of(ws.begin(), ws.end(), [](const WordOrder& x) { return x.fit.pass; });
    };
    truth(r, "check_controlled: solution lift passes", all_pass(check_controlled(sol.lift)));
    auto bad = sol.lift;
    for (std::size_t t = 0; t < bad.size(); ++t) bad.coeff(t, Word{1})[0] += 0.05;
    truth(r, "check_controlled: corrupted derivative fails", !all_pass(check_controlled(bad)));
  }
  {
    const auto phi = poly(2, {{{1.0, {2, 0}}, {-0.5, {1, 1}}, {0.3, {0, 3}}}});
    const auto wrong = VectorFieldSystem({v.field(2), v.field(1)});
    truth(r, "ito_check: matching fields pass", ito_check(phi, sol, v).graded_pass);
    truth(r, "ito_check: swapped fields fail", !ito_check(phi, sol, wrong).graded_pass);
  }
  {
    const auto x = ControlledPath::linear_in_driver(w, 3, testing::uniform_grid(1024), {0.0, 0.0}, {{1.0, 0.0}, {0.0, 1.0}});
    const auto y = compose(SmoothFunction::trig(2, {{{1.0, {1.0, -0.5}, 0.3}}}), x);
    auto in = rough_integral(y, 1);
    truth(r, "integral remainder: true integral passes", integral_remainder_order(y, 1, in).pass);
    for (std::size_t k = 0; k < in.values.size(); ++k) in.values[k][0] += 0.01 * std::sqrt(in.times[k]);
    truth(r, "integral remainder: perturbed integral fails", !integral_remainder_order(y, 1, in).pass);
  }
  {
    auto t = w->increment(0.1, 0.9).tensor();
    t[Word{1, 2}] += 1e-3;
    truth(r, "is_character: perturbed increment fails", !is_character(t, 1e-10).is_character);
    bool threw = false;
    try {
      GroupTensor::checked(t);
    } catch (const std::exception&) {
      threw = true;
    }
    truth(r, "GroupTensor::checked rejects it", threw);
  }
}

}  // namespace

bool Result::pass() const {
  if (!error.empty() || checks.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string Result::summary() const {
  if (!error.empty()) return "error: " + error;
  std::size_t ok = 0;
  const Check* first_bad = nullptr;
  for (const auto& c : checks) {
    if (c.pass) ++ok;
    else if (!first_bad) first_bad = &c;
  }
  std::string s = std::to_string(ok) + "/" + std::to_string(checks.size()) + " checks";
  if (first_bad) {
    s += "; failed: " + first_bad->name + " = " + num(first_bad->value) + " (need " + first_bad->relation + " " +
         num(first_bad->bound) + ")";
    if (!first_bad->note.empty()) s += " [" + first_bad->note + "]";
  }
  return s;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "algebraic exactness", 10, algebraic_exactness},
      {2, "deshuffles vs brute-force shuffles", 10, deshuffle_equivalence},
      {3, "Faa di Bruno vs symbolic differentiation", 10, faa_di_bruno_vs_symbolic},
      {4, "derived fields: recursion, shuffle form, closed form", 10, derived_fields},
      {5, "rough integral", 10, rough_integral_criterion},
      {6, "Davie solver order", 30, davie_linear},
      {7, "flow jets", 60, flow_jets},
      {8, "Ito formula", 120, ito},
      {9, "transport equation", 300, transport},
      {10, "continuity equation and duality", 300, continuity},
      {11, "negative controls", 60, negative_controls},
  };
  return all;
}

Result run(const Criterion& c) {
  Result r;
  r.id = c.id;
  r.title = c.title;
  r.budget = c.budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    c.run(r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Criterion gamma_suite(double gamma) {
  return {0, "gamma " + num(gamma) + " suite", 300, [gamma](Result& r) {
            if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("cli", "selftest", "gamma must lie in (0, 1)");
            const int n = default_level(gamma);
            const double hurst = std::min(gamma + 0.1, (1.0 + gamma) / 2);
            const auto v = planar_fields(0.3);
            {
              auto w = testing::fbm_lift(65, hurst, gamma, n, 1201, 2);
              const auto sol = solve_rde(std::vector<double>{0.2, -0.1}, v, w, testing::uniform_grid(1024));
              graded(r, "controlled solution", check_controlled(sol.lift));
            }
            {
              auto w = testing::fbm_lift(257, hurst, gamma, n, 1202, 2);
              const auto sol = solve_rde(std::vector<double>{0.1, -0.2}, v, w, testing::uniform_grid(2048));
              graded(r, "Ito", ito_check(poly(2, {{{1.0, {2, 0}}, {-0.5, {1, 1}}, {0.3, {0, 3}}}}), sol, v).graded);
            }
            {
              auto w = testing::fbm_lift(33, hurst, gamma, n, 1203, 2);
              TransportProblem p{v, terminal_poly(), w, 1.0, 1.0 / 512};
              graded(r, "transport", verify_transport(p, transport_jets(p), square_grid(3, 0.5), testing::uniform_grid(64)).words);
            }
            {
              Gen g(1204);
              auto w = testing::fbm_lift(33, hurst, gamma, n, 1205, 2);
              const auto mu = random_cloud(g, 16);
              const auto times = testing::uniform_grid(128);
              const auto rho = solve_continuity(v, w, mu, times, 1.0 / 1024);
              graded(r, "continuity", verify_continuity(v, w, rho, test_family()).words);
            }
          }};
}

Json to_json(const Result& r) {
  auto value = [](double x) -> Json {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  };
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json j{{"name", c.name}, {"value", value(c.value)}, {"relation", c.relation}, {"bound", value(c.bound)}, {"pass", c.pass}};
    if (!c.note.empty()) j["note"] = c.note;
    checks.push_back(j);
  }
  Json out{{"id", r.id}, {"title", r.title}, {"pass", r.pass()}, {"checks", checks}};
  if (!r.error.empty()) out["error"] = r.error;
  return out;
}

}  // namespace acceptance
