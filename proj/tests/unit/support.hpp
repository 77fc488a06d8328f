#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "roughkit/algebra.hpp"
#include "roughkit/fbm.hpp"
#include "roughkit/rough_path.hpp"
#include "roughkit/smooth_function.hpp"

namespace testing {

struct Gen {
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  std::mt19937_64 rng;

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  double normal(double sd = 1.0) { return std::normal_distribution<double>(0.0, sd)(rng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

  roughkit::Word word(int d, int len) {
    std::vector<int> l;
    for (int i = 0; i < len; ++i) l.push_back(integer(1, d));
    return roughkit::Word(l);
  }

  // Random tensor with roughly `density` of coefficients nonzero.
  roughkit::TruncatedTensor tensor(int d, int level, double density = 0.5) {
    roughkit::TruncatedTensor t(d, level);
    for (std::size_t i = 0; i < t.size(); ++i)
      t.at(i) = uniform(0, 1) < density ? uniform(-1, 1) : 0.0;
    return t;
  }

  std::vector<double> vec(int n, double a = -1, double b = 1) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(uniform(a, b));
    return v;
  }
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// All words of length exactly len over {1..d}.
inline std::vector<roughkit::Word> words_of_length(int d, int len) {
  std::vector<roughkit::Word> out;
  std::vector<int> l(static_cast<std::size_t>(len), 1);
  while (true) {
    out.emplace_back(l);
    int pos = len - 1;
    while (pos >= 0 && l[static_cast<std::size_t>(pos)] == d) l[static_cast<std::size_t>(pos--)] = 1;
    if (pos < 0) break;
    ++l[static_cast<std::size_t>(pos)];
  }
  return out;
}

inline std::vector<roughkit::Word> words_up_to(int d, int level, int min_len = 0) {
  std::vector<roughkit::Word> out;
  for (int k = min_len; k <= level; ++k)
    for (auto& w : words_of_length(d, k)) out.push_back(w);
  return out;
}

// PL interpolation of a curve on a uniform grid of `segments` cells over [0, T].
template <class F>
roughkit::PiecewiseLinearPath sample_curve(F curve, int segments, double horizon = 1.0) {
  std::vector<double> t;
  std::vector<std::vector<double>> v;
  for (int k = 0; k <= segments; ++k) {
    const double s = k == segments ? horizon : horizon * k / segments;
    t.push_back(s);
    v.push_back(curve(s));
  }
  return roughkit::PiecewiseLinearPath(t, v);
}

inline std::vector<double> uniform_grid(int cells, double horizon = 1.0) {
  std::vector<double> g;
  for (int k = 0; k <= cells; ++k) g.push_back(k == cells ? horizon : horizon * k / cells);
  return g;
}

// Random polynomial map with `terms` monomials per component, total degree <= degree.
inline roughkit::SmoothFunction random_polynomial(Gen& g, int n_in, int n_out, int degree, int terms,
                                                  double scale = 1.0) {
  std::vector<std::vector<roughkit::Monomial>> comps;
  for (int c = 0; c < n_out; ++c) {
    std::vector<roughkit::Monomial> ms;
    for (int t = 0; t < terms; ++t) {
      std::vector<int> p(static_cast<std::size_t>(n_in), 0);
      const int deg = g.integer(0, degree);
      for (int e = 0; e < deg; ++e) ++p[static_cast<std::size_t>(g.integer(0, n_in - 1))];
      ms.push_back({scale * g.uniform(-1, 1), p});
    }
    comps.push_back(ms);
  }
  return roughkit::SmoothFunction::polynomial(n_in, comps);
}

inline std::shared_ptr<const roughkit::GeometricRoughPath> curve_lift(int segments, int level, double gamma) {
  auto p = sample_curve([](double t) { return std::vector<double>{t, t * t / 2}; }, segments);
  return std::make_shared<const roughkit::GeometricRoughPath>(roughkit::lift_pl(p, gamma, level));
}

// W_t = t on [0, T], one segment
inline std::shared_ptr<const roughkit::GeometricRoughPath> time_lift(int level, double gamma, double horizon = 1.0) {
  roughkit::PiecewiseLinearPath p({0.0, horizon}, {{0.0}, {horizon}});
  return std::make_shared<const roughkit::GeometricRoughPath>(roughkit::lift_pl(p, gamma, level));
}

inline std::shared_ptr<const roughkit::GeometricRoughPath> fbm_lift(int knots, double hurst, double gamma, int level,
                                                                    std::uint64_t seed, int d) {
  return std::make_shared<const roughkit::GeometricRoughPath>(
      roughkit::lift_pl(roughkit::sample_fbm(hurst, d, knots, seed), gamma, level));
}

}  // namespace testing
