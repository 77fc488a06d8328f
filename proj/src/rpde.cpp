#include "roughkit/rpde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "roughkit/errors.hpp"
#include "roughkit/parallel.hpp"

namespace roughkit {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// index of the concatenation a b for a, b given by canonical indices in `shape`
std::size_t concat(const TensorShape& shape, std::size_t a, std::size_t b) {
  const int la = shape.length_of(a), lb = shape.length_of(b);
  const std::size_t ra = a - shape.offset(la), rb = b - shape.offset(lb);
  return shape.offset(la + lb) + ra * shape.power(lb) + rb;
}

// Words up to the driver level drive the flows; Gamma tables stop at N.
DerivedFieldTable flow_table(const VectorFieldSystem& v, const GeometricRoughPath& w) {
  return DerivedFieldTable(v, std::max(w.level(), default_level(w.gamma())));
}

void check_times(std::span<const double> times, double lo, double hi, const char* op) {
  if (times.empty()) throw InputError("rpde", op, "empty time set");
  for (std::size_t j = 1; j < times.size(); ++j)
    if (!(times[j] > times[j - 1])) throw InputError("rpde", op, "times must be strictly increasing");
  if (times.front() < lo || times.back() > hi) throw InputError("rpde", op, "times outside [start, horizon]");
}

// Gamma_w phi(x) for |w| <= N, [word][component]
std::vector<std::vector<double>> gammas_at(const DerivedFieldTable& table, const std::vector<Jet>& phi_taylor,
                                           std::span<const double> x) {
  return gamma_values(table, phi_taylor, table.values(x));
}

GradedReport finish(const TensorShape& shape, const std::vector<OrderFit>& fits) {
  GradedReport rep;
  for (std::size_t q = 0; q < shape.size(); ++q) {
    rep.words.push_back({shape.word(q), fits[q]});
    rep.pass = rep.pass && fits[q].pass;
  }
  return rep;
}

std::vector<double> expected_orders(const TensorShape& shape, double gamma) {
  std::vector<double> out;
  for (std::size_t q = 0; q < shape.size(); ++q) out.push_back((shape.level() + 1 - shape.length_of(q)) * gamma);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- problem data

int TransportProblem::n_gamma() const {
  if (!driver) throw InputError("rpde", "TransportProblem", "missing driver");
  return default_level(driver->gamma());
}

void TransportProblem::validate() const {
  const int n = n_gamma();
  if (!terminal.valid()) throw InputError("rpde", "TransportProblem", "missing terminal condition");
  if (terminal.n_out() != 1) throw InputError("rpde", "TransportProblem", "terminal condition must be scalar");
  if (terminal.n_in() != fields.n()) throw InputError("rpde", "TransportProblem", "terminal/field dimension mismatch");
  if (driver->dim() != fields.d()) throw InputError("rpde", "TransportProblem", "driver/field count mismatch");
  if (!(mesh > 0.0) || !std::isfinite(mesh)) throw InputError("rpde", "TransportProblem", "mesh must be positive");
  if (!(horizon > driver->times().front()) || horizon > driver->horizon())
    throw InputError("rpde", "TransportProblem", "horizon outside the driver's time range");
  if (fields.order() < 2 * n + 1)
    throw OrderError("rpde", "TransportProblem", "fields need order " + std::to_string(2 * n + 1));
  if (terminal.order() < n + 1)
    throw OrderError("rpde", "TransportProblem", "terminal condition needs order " + std::to_string(n + 1));
}

ParticleMeasure ParticleMeasure::delta(std::vector<double> x, double weight) {
  return {{std::move(x)}, {weight}};
}

double ParticleMeasure::mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

std::vector<double> ParticleMeasure::pair(const SmoothFunction& phi) const {
  std::vector<double> out(static_cast<std::size_t>(phi.n_out()), 0.0);
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto v = phi(points[j]);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += weights[j] * v[c];
  }
  return out;
}

void ParticleMeasure::validate() const {
  if (points.size() != weights.size()) throw InputError("rpde", "ParticleMeasure", "points/weights size mismatch");
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j].size() != points.front().size())
      throw InputError("rpde", "ParticleMeasure", "particle " + std::to_string(j) + " has the wrong dimension");
    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j]))
      throw InputError("rpde", "ParticleMeasure", "weight " + std::to_string(j) + " must be finite and >= 0");
  }
}

// ---------------------------------------------------------------- transport

std::vector<std::vector<double>> solve_transport(const TransportProblem& p, std::span<const TransportQuery> queries) {
  p.validate();
  const auto table = flow_table(p.fields, *p.driver);
  for (const auto& q : queries) {
    if (q.s < p.driver->times().front() || q.s > p.horizon) throw InputError("rpde", "solve_transport", "s outside [0, T]");
    if (static_cast<int>(q.x.size()) != p.fields.n()) throw InputError("rpde", "solve_transport", "query dimension");
  }
  return parallel_map<std::vector<double>>(queries.size(), [&](std::size_t i) {
    const auto& q = queries[i];
    if (q.s == p.horizon) return p.terminal(q.x);
    const auto part = mesh_partition(q.s, p.horizon, p.mesh);
    return p.terminal(flow(q.x, table, *p.driver, part));
  });
}

TransportJets transport_jets(const TransportProblem& p) {
  p.validate();
  auto table = std::make_shared<const DerivedFieldTable>(flow_table(p.fields, *p.driver));
  return [p, table](double s, std::span<const double> x, int k) {
    const auto part = mesh_partition(s, p.horizon, p.mesh);
    const auto j = flow_taylor(x, *table, *p.driver, part, k);
    return p.terminal.substitute(j);
  };
}

GradedReport verify_transport(const TransportProblem& p, const TransportJets& u,
                              std::span<const std::vector<double>> space_grid, std::span<const double> times) {
  p.validate();
  check_times(times, p.driver->times().front(), p.horizon, "verify_transport");
  if (space_grid.empty()) throw InputError("rpde", "verify_transport", "empty space grid");
  const int ng = p.n_gamma();
  const DerivedFieldTable table(p.fields, ng);
  const auto& shape = table.shape();
  const std::size_t nx = space_grid.size();
  // Gamma_w u_t(x), [time * nx + point][word][component]
  const auto gam = parallel_map<std::vector<std::vector<double>>>(times.size() * nx, [&](std::size_t i) {
    const auto& x = space_grid[i % nx];
    return gammas_at(table, u(times[i / nx], x, ng), x);
  });
  const auto fits = dyadic_orders(
      times, shape.size(),
      [&](std::size_t a, std::size_t b, std::span<double> out) {
        const auto g = p.driver->increment(times[a], times[b]);
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const auto& ga = gam[a * nx + ix];
          const auto& gb = gam[b * nx + ix];
          for (std::size_t q = 0; q < shape.size(); ++q) {
            const int lw = shape.length_of(q);
            std::vector<double> r = ga[q];
            for (std::size_t v = 0; v < shape.offset(ng - lw + 1); ++v) {
              const double gv = g.at(v);
              if (gv == 0.0) continue;
              const auto& term = gb[concat(shape, q, v)];
              for (std::size_t c = 0; c < r.size(); ++c) r[c] -= term[c] * gv;
            }
            out[q] = std::max(out[q], max_abs(r));
          }
        }
      },
      expected_orders(shape, p.driver->gamma()));
  return finish(shape, fits);
}

// ---------------------------------------------------------------- continuity

ParticleMeasure MeasurePath::at(std::size_t ti) const { return {points[ti], weights}; }

std::vector<std::vector<double>> MeasurePath::pair(const SmoothFunction& phi) const {
  std::vector<std::vector<double>> out;
  for (std::size_t t = 0; t < times.size(); ++t) out.push_back(at(t).pair(phi));
  return out;
}

MeasurePath MeasurePath::frozen(const ParticleMeasure& mu, std::vector<double> times) {
  MeasurePath m;
  m.weights = mu.weights;
  m.points.assign(times.size(), mu.points);
  m.times = std::move(times);
  return m;
}

MeasurePath solve_continuity(const VectorFieldSystem& v, const RoughPathPtr& w, const ParticleMeasure& mu,
                             std::vector<double> times, double mesh) {
  if (!w) throw InputError("rpde", "solve_continuity", "missing driver");
  mu.validate();
  if (mu.size() > 0 && mu.dim() != v.n()) throw InputError("rpde", "solve_continuity", "particle dimension");
  if (w->dim() != v.d()) throw InputError("rpde", "solve_continuity", "driver/field count mismatch");
  check_times(times, w->times().front(), w->horizon(), "solve_continuity");
  const auto table = flow_table(v, *w);
  MeasurePath out;
  out.weights = mu.weights;
  out.points.assign(times.size(), std::vector<std::vector<double>>(mu.size()));
  parallel_for(mu.size(), [&](std::size_t j) {
    std::vector<double> x = mu.points[j];
    out.points[0][j] = x;
    try {
      for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        x = flow(x, table, *w, mesh_partition(times[k], times[k + 1], mesh));
        out.points[k + 1][j] = x;
      }
    } catch (const NumericalError& e) {
      throw NumericalError("rpde", "solve_continuity", "particle " + std::to_string(j) + ": " + e.what());
    }
  });
  out.times = std::move(times);
  return out;
}

GradedReport verify_continuity(const VectorFieldSystem& v, const RoughPathPtr& w, const MeasurePath& rho,
                               std::span<const SmoothFunction> phis) {
  if (!w) throw InputError("rpde", "verify_continuity", "missing driver");
  if (phis.empty()) throw InputError("rpde", "verify_continuity", "empty test family");
  check_times(rho.times, w->times().front(), w->horizon(), "verify_continuity");
  const int ng = default_level(w->gamma());
  const DerivedFieldTable table(v, ng);
  const auto& shape = table.shape();
  const std::size_t np = phis.size();
  for (const auto& phi : phis)
    if (phi.order() < ng + 1)
      throw OrderError("rpde", "verify_continuity", "test functions need order " + std::to_string(ng + 1));
  // rho_t(Gamma_w phi), [time * np + phi][word][component]
  const auto pairs = parallel_map<std::vector<std::vector<double>>>(rho.times.size() * np, [&](std::size_t i) {
    const auto& pts = rho.points[i / np];
    const auto& phi = phis[i % np];
    std::vector<std::vector<double>> acc(shape.size(), std::vector<double>(static_cast<std::size_t>(phi.n_out()), 0.0));
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const auto gv = gammas_at(table, phi.taylor(pts[j], ng), pts[j]);
      for (std::size_t q = 0; q < shape.size(); ++q)
        for (std::size_t c = 0; c < acc[q].size(); ++c) acc[q][c] += rho.weights[j] * gv[q][c];
    }
    return acc;
  });
  const auto fits = dyadic_orders(
      rho.times, shape.size(),
      [&](std::size_t a, std::size_t b, std::span<double> out) {
        const auto g = w->increment(rho.times[a], rho.times[b]);
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t ip = 0; ip < np; ++ip) {
          const auto& ra = pairs[a * np + ip];
          const auto& rb = pairs[b * np + ip];
          for (std::size_t q = 0; q < shape.size(); ++q) {
            const int lw = shape.length_of(q);
            std::vector<double> r = rb[q];
            for (std::size_t u = 0; u < shape.offset(ng - lw + 1); ++u) {
              const double gu = g.at(u);
              if (gu == 0.0) continue;
              const auto& term = ra[concat(shape, u, q)];
              for (std::size_t c = 0; c < r.size(); ++c) r[c] -= term[c] * gu;
            }
            out[q] = std::max(out[q], max_abs(r));
          }
        }
      },
      expected_orders(shape, w->gamma()));
  return finish(shape, fits);
}

DualityReport duality_check(const TransportProblem& p, const ParticleMeasure& mu, std::span<const double> times) {
  p.validate();
  mu.validate();
  if (mu.size() > 0 && mu.dim() != p.fields.n()) throw InputError("rpde", "duality_check", "particle dimension");
  const double t0 = p.driver->times().front();
  check_times(times, t0, p.horizon, "duality_check");
  const auto table = flow_table(p.fields, *p.driver);
  const std::size_t m = mu.size();
  const auto vals = parallel_map<double>(times.size() * m, [&](std::size_t i) {
    const double r = times[i / m];
    const auto& x = mu.points[i % m];
    auto y = r > t0 ? flow(x, table, *p.driver, mesh_partition(t0, r, p.mesh)) : x;
    if (r < p.horizon) y = flow(y, table, *p.driver, mesh_partition(r, p.horizon, p.mesh));
    return mu.weights[i % m] * p.terminal(y)[0];
  });
  DualityReport rep;
  rep.times.assign(times.begin(), times.end());
  for (std::size_t k = 0; k < times.size(); ++k) {
    double a = 0.0;
    for (std::size_t j = 0; j < m; ++j) a += vals[k * m + j];
    rep.alpha.push_back(a);
    rep.drift = std::max(rep.drift, std::abs(a - rep.alpha.front()));
  }
  return rep;
}

GradedReport characteristic_check(const TransportProblem& p, std::span<const double> x, std::span<const double> times) {
  p.validate();
  check_times(times, p.driver->times().front(), p.horizon, "characteristic_check");
  const int ng = p.n_gamma();
  const DerivedFieldTable table(p.fields, ng);
  const auto& shape = table.shape();
  const auto ftable = flow_table(p.fields, *p.driver);
  std::vector<std::vector<double>> path{std::vector<double>(x.begin(), x.end())};
  for (std::size_t k = 0; k + 1 < times.size(); ++k)
    path.push_back(flow(path.back(), ftable, *p.driver, mesh_partition(times[k], times[k + 1], p.mesh)));
  const auto u = transport_jets(p);
  const auto gam = parallel_map<std::vector<std::vector<double>>>(
      times.size(), [&](std::size_t i) { return gammas_at(table, u(times[i], path[i], ng), path[i]); });
  const auto fits = dyadic_orders(
      times, shape.size(),
      [&](std::size_t a, std::size_t b, std::span<double> out) {
        for (std::size_t q = 0; q < shape.size(); ++q) {
          std::vector<double> r = gam[b][q];
          for (std::size_t c = 0; c < r.size(); ++c) r[c] -= gam[a][q][c];
          out[q] = max_abs(r);
        }
      },
      expected_orders(shape, p.driver->gamma()));
  return finish(shape, fits);
}

}  // namespace roughkit
