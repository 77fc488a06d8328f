#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "criteria.hpp"
#include "roughkit/errors.hpp"
#include "roughkit/fbm.hpp"
#include "roughkit/io.hpp"
#include "roughkit/parallel.hpp"
#include "roughkit/rde.hpp"
#include "roughkit/rpde.hpp"

using namespace roughkit;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr const char* kSchemas = R"(File formats
  path CSV        t,x1,...,xd            one row per knot
  particles CSV   w,x1,...,xn            weight then location
  query CSV       s,x1,...,xn            start time then location
  grid CSV        x1,...,xn              space points for verify transport
  tensor JSON     {"d", "level", "terms": [{"word": [i, ...], "value": x}]}, canonical word order, empty word []
  rough path JSON {"gamma", "level", "times": [...], "basepoints": [tensor, ...]}
  function JSON   {"family": "polynomial", "n_in", "components": [[{"coeff", "powers": [...]}]]}
                  {"family": "affine", "matrix": [[...]], "offset": [...]}
                  {"family": "trig", "n_in", "components": [[{"coeff", "freq": [...], "phase"}]]}
                  {"family": "gaussian", "n_in", "components": [[{"coeff", "center": [...], "width"}]]}
  fields JSON     {"fields": [function, ...]}, one per driver component
  phis JSON       {"functions": [function, ...]}
Exit codes: 0 pass, 1 verification failure, 2 input error, 3 numerical failure.
Threads: --threads, else ROUGHKIT_THREADS, else the hardware count.)";

struct Config {
  double gamma = 0.0;
  int level = 0;
  double mesh = 1e-3;
  std::uint64_t seed = 0;
  std::string out, report;
  int threads = 0;

  std::string path, driver, fields, terminal, query, mu, grid, phis;
  std::string x0;
  double horizon = 0.0;
  int times = 256;
  double hurst = 0.5;
  int dim = 2;
  int knots = 257;
  double tolerance = 1e-8;
  std::vector<int> only;
};

Json config_json(const std::string& command, const Config& c) {
  Json j{{"command", command}, {"gamma", c.gamma}, {"level", c.level}, {"mesh", c.mesh}, {"seed", c.seed}};
  auto add = [&](const char* k, const std::string& v) {
    if (!v.empty()) j[k] = v;
  };
  add("path", c.path);
  add("driver", c.driver);
  add("fields", c.fields);
  add("terminal", c.terminal);
  add("query", c.query);
  add("mu", c.mu);
  add("grid", c.grid);
  add("phis", c.phis);
  add("x0", c.x0);
  j["horizon"] = c.horizon;
  j["times"] = c.times;
  j["tolerance"] = c.tolerance;
  if (!c.only.empty()) j["criteria"] = c.only;
  return j;
}

// Every report carries the config it came from and its hash.
Json provenance(const std::string& command, const Config& c) {
  const auto cfg = config_json(command, c);
  return {{"version", kVersion}, {"seed", c.seed}, {"config_hash", hex64(fnv1a(cfg.dump()))}, {"config", cfg}};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") std::cout << text;
  else write_text_file(path, text);
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
    if (used == 0 || used != cell.size()) throw InputError("cli", "x0", "not a number: '" + cell + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InputError("cli", "x0", "empty point");
  return out;
}

RoughPathPtr load_driver(const Config& c) {
  if (c.driver.empty()) throw InputError("cli", "driver", "--driver is required");
  auto w = rough_path_from_json(read_json_file(c.driver));
  if (c.level > 0) {
    if (c.level < default_level(w.gamma()))
      throw InputError("cli", "driver", "--level below floor(1/gamma) = " + std::to_string(default_level(w.gamma())));
    w = w.with_level(c.level);
  }
  return std::make_shared<const GeometricRoughPath>(std::move(w));
}

VectorFieldSystem load_fields(const Config& c, const GeometricRoughPath& w) {
  if (c.fields.empty()) throw InputError("cli", "fields", "--fields is required");
  auto v = fields_from_json(read_json_file(c.fields));
  if (v.d() != w.dim())
    throw InputError("cli", "fields", std::to_string(v.d()) + " fields for a " + std::to_string(w.dim()) + "-dimensional driver");
  return v;
}

SmoothFunction load_terminal(const Config& c) {
  if (c.terminal.empty()) throw InputError("cli", "terminal", "--terminal is required");
  return function_from_json(read_json_file(c.terminal));
}

ParticleMeasure load_mu(const Config& c) {
  if (c.mu.empty()) throw InputError("cli", "mu", "--mu is required");
  return particles_from_csv(read_csv(c.mu));
}

double horizon_of(const Config& c, const GeometricRoughPath& w) {
  const double t = c.horizon > 0 ? c.horizon : w.horizon();
  if (t > w.horizon() + 1e-15) throw InputError("cli", "horizon", "beyond the driver");
  return t;
}

std::vector<double> time_grid(const Config& c, double t0, double t1) {
  if (c.times < 1) throw InputError("cli", "times", "need at least one interval");
  std::vector<double> g;
  for (int k = 0; k <= c.times; ++k) g.push_back(k == c.times ? t1 : t0 + (t1 - t0) * k / c.times);
  return g;
}

// -------------------------------------------------------------- commands

void cmd_fbm(const Config& c) {
  const auto p = sample_fbm(c.hurst, c.dim, c.knots, c.seed, c.horizon > 0 ? c.horizon : 1.0);
  CsvTable t{{"t"}, {}};
  for (int i = 1; i <= p.dim(); ++i) t.header.push_back("x" + std::to_string(i));
  for (std::size_t j = 0; j < p.knots(); ++j) {
    std::vector<double> row{p.times()[j]};
    row.insert(row.end(), p.values()[j].begin(), p.values()[j].end());
    t.rows.push_back(row);
  }
  emit(c.out, csv_text(t));
}

void cmd_sig(const Config& c) {
  if (c.path.empty()) throw InputError("cli", "sig", "--path is required");
  if (!(c.gamma > 0 && c.gamma <= 1)) throw InputError("cli", "sig", "--gamma must lie in (0, 1]");
  if (c.level > 0 && c.level < default_level(c.gamma))
    throw InputError("cli", "sig", "--level below floor(1/gamma) = " + std::to_string(default_level(c.gamma)));
  const auto w = lift_pl(path_from_csv(read_csv(c.path)), c.gamma, c.level);
  emit(c.out, dump_json(rough_path_to_json(w)));
}

void cmd_rde(const Config& c) {
  const auto w = load_driver(c);
  const auto v = load_fields(c, *w);
  const auto x0 = parse_point(c.x0);
  const auto sol = solve_rde(x0, v, w, mesh_partition(w->times().front(), horizon_of(c, *w), c.mesh));
  CsvTable t{{"t"}, {}};
  for (int i = 1; i <= v.n(); ++i) t.header.push_back("x" + std::to_string(i));
  for (std::size_t j = 0; j < sol.size(); ++j) {
    std::vector<double> row{sol.times()[j]};
    const auto x = sol.state(j);
    row.insert(row.end(), x.begin(), x.end());
    t.rows.push_back(row);
  }
  emit(c.out, csv_text(t));
  if (!c.report.empty()) {
    auto rep = provenance("rde", c);
    rep["level"] = sol.level;
    rep["residual"] = sol.residual;
    rep["terminal"] = sol.terminal();
    write_text_file(c.report, dump_json(rep));
  }
}

TransportProblem transport_problem(const Config& c) {
  const auto w = load_driver(c);
  TransportProblem p{load_fields(c, *w), load_terminal(c), w, 0.0, c.mesh};
  p.horizon = horizon_of(c, *p.driver);
  p.validate();
  return p;
}

void cmd_transport(const Config& c) {
  const auto p = transport_problem(c);
  if (c.query.empty()) throw InputError("cli", "transport", "--query is required");
  const auto q = queries_from_csv(read_csv(c.query));
  const auto u = solve_transport(p, q);
  CsvTable t{{"s"}, {}};
  for (int i = 1; i <= p.fields.n(); ++i) t.header.push_back("x" + std::to_string(i));
  for (int i = 0; i < p.terminal.n_out(); ++i) t.header.push_back("u" + std::to_string(i + 1));
  for (std::size_t k = 0; k < q.size(); ++k) {
    std::vector<double> row{q[k].s};
    row.insert(row.end(), q[k].x.begin(), q[k].x.end());
    row.insert(row.end(), u[k].begin(), u[k].end());
    t.rows.push_back(row);
  }
  emit(c.out, csv_text(t));
}

void cmd_continuity(const Config& c) {
  const auto w = load_driver(c);
  const auto v = load_fields(c, *w);
  const auto mu = load_mu(c);
  const auto rho = solve_continuity(v, w, mu, time_grid(c, w->times().front(), horizon_of(c, *w)), c.mesh);
  CsvTable t{{"t", "particle", "w"}, {}};
  for (int i = 1; i <= v.n(); ++i) t.header.push_back("x" + std::to_string(i));
  for (std::size_t k = 0; k < rho.times.size(); ++k)
    for (std::size_t j = 0; j < rho.weights.size(); ++j) {
      std::vector<double> row{rho.times[k], static_cast<double>(j), rho.weights[j]};
      row.insert(row.end(), rho.points[k][j].begin(), rho.points[k][j].end());
      t.rows.push_back(row);
    }
  emit(c.out, csv_text(t));
}

int finish_report(const Config& c, Json rep, bool pass) {
  rep["pass"] = pass;
  emit(c.report.empty() ? c.out : c.report, dump_json(rep));
  std::fprintf(stderr, "%s\n", pass ? "pass" : "FAIL");
  return pass ? 0 : 1;
}

int cmd_verify_transport(const Config& c) {
  const auto p = transport_problem(c);
  if (c.grid.empty()) throw InputError("cli", "verify transport", "--grid is required");
  const auto grid = read_csv(c.grid).rows;
  for (const auto& x : grid)
    if (static_cast<int>(x.size()) != p.fields.n()) throw InputError("cli", "verify transport", "grid points of the wrong dimension");
  const auto r = verify_transport(p, transport_jets(p), grid, time_grid(c, p.driver->times().front(), p.horizon));
  auto rep = provenance("verify transport", c);
  rep["checks"] = Json::array({graded_to_json("transport", r)});
  return finish_report(c, rep, r.pass);
}

int cmd_verify_continuity(const Config& c) {
  const auto w = load_driver(c);
  const auto v = load_fields(c, *w);
  const auto mu = load_mu(c);
  if (c.phis.empty()) throw InputError("cli", "verify continuity", "--phis is required");
  const auto pj = read_json_file(c.phis);
  if (!pj.contains("functions") || !pj["functions"].is_array()) throw InputError("cli", "phis", "expected {\"functions\": [...]}");
  std::vector<SmoothFunction> phis;
  for (const auto& f : pj["functions"]) phis.push_back(function_from_json(f));
  const auto rho = solve_continuity(v, w, mu, time_grid(c, w->times().front(), horizon_of(c, *w)), c.mesh);
  const auto r = verify_continuity(v, w, rho, phis);
  auto rep = provenance("verify continuity", c);
  std::vector<double> mass;
  for (std::size_t k = 0; k < rho.times.size(); ++k) mass.push_back(rho.at(k).mass());
  rep["mass"] = mass;
  rep["checks"] = Json::array({graded_to_json("continuity", r)});
  return finish_report(c, rep, r.pass);
}

int cmd_verify_duality(const Config& c) {
  const auto p = transport_problem(c);
  const auto mu = load_mu(c);
  const auto r = duality_check(p, mu, time_grid(c, p.driver->times().front(), p.horizon));
  auto rep = provenance("verify duality", c);
  const bool pass = std::isfinite(r.drift) && r.drift <= c.tolerance;
  rep["checks"] = Json::array(
      {{{"name", "duality"}, {"drift", r.drift}, {"threshold", c.tolerance}, {"pass", pass}, {"times", r.times}, {"alpha", r.alpha}}});
  return finish_report(c, rep, pass);
}

int cmd_selftest(const Config& c) {
  if (!(c.gamma > 0 && c.gamma < 1)) throw InputError("cli", "selftest", "--gamma must lie in (0, 1)");
  std::vector<acceptance::Criterion> suite;
  for (const auto& k : acceptance::criteria())
    if (c.only.empty() || std::find(c.only.begin(), c.only.end(), k.id) != c.only.end()) suite.push_back(k);
  auto g = acceptance::gamma_suite(c.gamma);
  if (c.only.empty() || std::find(c.only.begin(), c.only.end(), 0) != c.only.end()) suite.push_back(g);
  auto rep = provenance("selftest", c);
  rep["suites"] = Json::array();
  bool all = true;
  for (const auto& k : suite) {
    const auto r = acceptance::run(k);
    all = all && r.pass();
    rep["suites"].push_back(acceptance::to_json(r));
    // timings stay out of the report so that it is reproducible byte for byte
    std::fprintf(stderr, "%s %2d %-52s %7.1f s (budget %g s)  %s\n", r.pass() ? "PASS" : "FAIL", r.id, r.title.c_str(),
                 r.seconds, r.budget, r.summary().c_str());
  }
  rep["pass"] = all;
  emit(c.report.empty() ? c.out : c.report, dump_json(rep));
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roughkit: geometric rough paths, RDEs and rough transport/continuity equations"};
  app.footer(kSchemas);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Config c;

  auto common = [&](CLI::App* s) {
    s->add_option("--mesh", c.mesh, "Davie partition step")->check(CLI::PositiveNumber);
    s->add_option("--level", c.level, "signature level override (>= floor(1/gamma))");
    s->add_option("--out", c.out, "output file, stdout if omitted");
    s->add_option("--report", c.report, "JSON report file");
    s->add_option("--threads", c.threads, "worker threads (ROUGHKIT_THREADS otherwise)");
    s->add_option("--horizon", c.horizon, "end time, the driver's horizon by default");
  };

  auto* fbm = app.add_subcommand("fbm", "sample a d-dimensional fBm path to path CSV");
  common(fbm);
  fbm->add_option("--hurst", c.hurst, "Hurst index in (0,1)")->required();
  fbm->add_option("--dim", c.dim, "components");
  fbm->add_option("--knots", c.knots, "grid points including t=0");
  fbm->add_option("--seed", c.seed, "RNG seed");

  auto* sig = app.add_subcommand("sig", "lift a path CSV to a rough path JSON");
  common(sig);
  sig->add_option("--path", c.path, "path CSV")->required();
  sig->add_option("--gamma", c.gamma, "Hoelder exponent in (0,1]")->required();

  auto* rde = app.add_subcommand("rde", "solve dX = f(X) dW by Davie steps, trajectory CSV t,x1,...");
  common(rde);
  rde->add_option("--driver", c.driver, "rough path JSON")->required();
  rde->add_option("--fields", c.fields, "fields JSON")->required();
  rde->add_option("--x0", c.x0, "initial point, comma separated")->required();

  auto* tr = app.add_subcommand("transport", "u(s,x) = g(X^{s,x}_T) at query points, CSV s,x...,u...");
  common(tr);
  tr->add_option("--driver", c.driver, "rough path JSON")->required();
  tr->add_option("--fields", c.fields, "fields JSON")->required();
  tr->add_option("--terminal", c.terminal, "function JSON g")->required();
  tr->add_option("--query", c.query, "query CSV")->required();

  auto* co = app.add_subcommand("continuity", "pushforward of a particle measure, CSV t,particle,w,x...");
  common(co);
  co->add_option("--driver", c.driver, "rough path JSON")->required();
  co->add_option("--fields", c.fields, "fields JSON")->required();
  co->add_option("--mu", c.mu, "particles CSV")->required();
  co->add_option("--times", c.times, "uniform sample intervals");

  auto* ver = app.add_subcommand("verify", "graded verification with a JSON report");
  ver->require_subcommand(1);
  auto* vt = ver->add_subcommand("transport", "graded estimates of the flow-built transport solution");
  auto* vc = ver->add_subcommand("continuity", "graded estimates of the pushforward measure");
  auto* vd = ver->add_subcommand("duality", "constancy of rho_r(u_r)");
  for (auto* s : {vt, vc, vd}) {
    common(s);
    s->add_option("--driver", c.driver, "rough path JSON")->required();
    s->add_option("--fields", c.fields, "fields JSON")->required();
    s->add_option("--times", c.times, "uniform dyadic time intervals");
  }
  vt->add_option("--terminal", c.terminal, "function JSON g")->required();
  vt->add_option("--grid", c.grid, "grid CSV of space points")->required();
  vc->add_option("--mu", c.mu, "particles CSV")->required();
  vc->add_option("--phis", c.phis, "phis JSON test family")->required();
  vd->add_option("--terminal", c.terminal, "function JSON g")->required();
  vd->add_option("--mu", c.mu, "particles CSV")->required();
  vd->add_option("--tolerance", c.tolerance, "largest accepted drift");

  auto* st = app.add_subcommand("selftest", "acceptance criteria plus the gamma suite, consolidated JSON report");
  st->add_option("--gamma", c.gamma, "gamma for the per-gamma suite")->required();
  st->add_option("--report", c.report, "JSON report file");
  st->add_option("--out", c.out, "same as --report");
  st->add_option("--threads", c.threads, "worker threads (ROUGHKIT_THREADS otherwise)");
  st->add_option("--only", c.only, "criterion ids, 0 for the gamma suite")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c.threads < 0) throw InputError("cli", "threads", "must be >= 0");
    if (c.threads > 0) set_threads(c.threads);
    if (*fbm) cmd_fbm(c);
    else if (*sig) cmd_sig(c);
    else if (*rde) cmd_rde(c);
    else if (*tr) cmd_transport(c);
    else if (*co) cmd_continuity(c);
    else if (*vt) return cmd_verify_transport(c);
    else if (*vc) return cmd_verify_continuity(c);
    else if (*vd) return cmd_verify_duality(c);
    else if (*st) return cmd_selftest(c);
    return 0;
  } catch (const InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const OrderError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
