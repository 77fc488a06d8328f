#pragma once

#include <functional>
#include <span>
#include <vector>

#include "roughkit/controlled.hpp"
#include "roughkit/jet.hpp"
#include "roughkit/rde.hpp"
#include "roughkit/smooth_function.hpp"

namespace roughkit {

/// Terminal-value problem d u + sum_i Gamma_i u dW^i = 0, u(T, .) = g, solved
/// along characteristics on mesh_partition(s, T, mesh).
struct TransportProblem {
  VectorFieldSystem fields;
  SmoothFunction terminal;
  RoughPathPtr driver;
  double horizon = 1.0;
  double mesh = 1e-3;

  int n_gamma() const;
  // Throws InputError / OrderError when the data cannot support verification:
  // fields of order 2N+1, terminal of order N+1, horizon inside the driver.
  void validate() const;
};

struct TransportQuery {
  double s = 0.0;
  std::vector<double> x;
};

/// Finite weighted point cloud; weights need not be normalized.
struct ParticleMeasure {
  std::vector<std::vector<double>> points;
  std::vector<double> weights;

  static ParticleMeasure delta(std::vector<double> x, double weight = 1.0);
  std::size_t size() const { return points.size(); }
  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
  double mass() const;
  // sum_j w_j phi(x_j)
  std::vector<double> pair(const SmoothFunction& phi) const;
  void validate() const;
};

// u(s, x) = g(X^{s,x}_T), one flow per query.
std::vector<std::vector<double>> solve_transport(const TransportProblem& p, std::span<const TransportQuery> queries);

// Taylor jets in x of u_s at x to order k.
using TransportJets = std::function<std::vector<Jet>(double s, std::span<const double> x, int k)>;

// g composed with the flow's Taylor map.
TransportJets transport_jets(const TransportProblem& p);

struct GradedReport {
  std::vector<WordOrder> words;
  bool pass = true;
};

// Gamma_w u_s(x) vs sum_{|v| <= N - |w|} Gamma_{wv} u_t(x) <W_st, e_v> for |w| <= N,
// regressed over dyadic pairs of the uniform `times`, max over the space grid.
GradedReport verify_transport(const TransportProblem& p, const TransportJets& u,
                              std::span<const std::vector<double>> space_grid, std::span<const double> times);

/// Pushforward of a particle measure sampled at given times.
struct MeasurePath {
  std::vector<double> times;
  std::vector<double> weights;
  std::vector<std::vector<std::vector<double>>> points;  // [time][particle][component]

  ParticleMeasure at(std::size_t ti) const;
  // rho_t(phi) at every sample time
  std::vector<std::vector<double>> pair(const SmoothFunction& phi) const;
  // rho_t = mu for all t
  static MeasurePath frozen(const ParticleMeasure& mu, std::vector<double> times);
};

// rho_t = (X^{t0,.}_t)_# mu; each particle solved on mesh_partition merged with `times`.
MeasurePath solve_continuity(const VectorFieldSystem& v, const RoughPathPtr& w, const ParticleMeasure& mu,
                             std::vector<double> times, double mesh);

// rho_t(Gamma_w phi) vs sum_{|v| <= N - |w|} rho_s(Gamma_{vw} phi) <W_st, e_v>, max over the family.
GradedReport verify_continuity(const VectorFieldSystem& v, const RoughPathPtr& w, const MeasurePath& rho,
                               std::span<const SmoothFunction> phis);

struct DualityReport {
  std::vector<double> times;
  std::vector<double> alpha;  // rho_r(u_r)
  double drift = 0.0;         // max |alpha(r) - alpha(times.front())|
};

// alpha(r) = sum_j w_j g(X^{r, y_j}_T), y_j = X^{0, x_j}_r, both legs on mesh_partition.
DualityReport duality_check(const TransportProblem& p, const ParticleMeasure& mu, std::span<const double> times);

// Gamma_w u_t(X_t) against Gamma_w u_s(X_s) along X = X^{t0, x}, with X_t and u
// from the same meshes as solve_transport.
GradedReport characteristic_check(const TransportProblem& p, std::span<const double> x, std::span<const double> times);

}  // namespace roughkit
