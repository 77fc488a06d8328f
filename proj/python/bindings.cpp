#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "roughkit/algebra.hpp"
#include "roughkit/errors.hpp"
#include "roughkit/fbm.hpp"
#include "roughkit/io.hpp"
#include "roughkit/rde.hpp"
#include "roughkit/rpde.hpp"

namespace py = pybind11;
using namespace roughkit;

namespace {

using Point = std::vector<double>;
using Letters = std::vector<int>;
using PyPath = std::shared_ptr<GeometricRoughPath>;

Letters letters(const Word& w) { return {w.begin(), w.end()}; }

py::dict tensor_dict(const TruncatedTensor& t) {
  py::dict out;
  for (const auto& [w, v] : t.terms()) out[py::tuple(py::cast(letters(w)))] = v;
  return out;
}

std::vector<double> uniform(double t0, double t1, int cells) {
  if (cells < 1) throw InputError("python", "times", "need at least one interval");
  std::vector<double> g;
  for (int k = 0; k <= cells; ++k) g.push_back(k == cells ? t1 : t0 + (t1 - t0) * k / cells);
  return g;
}

TransportProblem problem(const VectorFieldSystem& v, const SmoothFunction& g, const PyPath& w, double mesh,
                         std::optional<double> horizon) {
  TransportProblem p{v, g, w, horizon.value_or(w->horizon()), mesh};
  p.validate();
  return p;
}

ParticleMeasure measure(std::vector<double> weights, std::vector<Point> points) {
  ParticleMeasure mu{std::move(points), std::move(weights)};
  mu.validate();
  return mu;
}

}  // namespace

PYBIND11_MODULE(_roughkit, m) {
  m.doc() = "geometric rough paths, Davie RDE solver, rough transport and continuity equations";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<OrderError>(m, "OrderError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("default_level", &default_level, py::arg("gamma"));

  m.def(
      "shuffle",
      [](const Letters& u, const Letters& v) {
        std::vector<std::pair<Letters, int>> out;
        for (const auto& [w, c] : shuffle_words(Word(u), Word(v))) out.emplace_back(letters(w), c);
        return out;
      },
      py::arg("u"), py::arg("v"), "words of u ⧢ v with multiplicities");

  m.def(
      "deshuffles",
      [](const Letters& w, int k) {
        std::vector<std::pair<std::vector<Letters>, int>> out;
        for (const auto& e : deshuffles(Word(w), k).entries) {
          std::vector<Letters> parts;
          for (const auto& p : e.parts) parts.push_back(letters(p));
          out.emplace_back(parts, e.multiplicity);
        }
        return out;
      },
      py::arg("w"), py::arg("k"));

  py::class_<GeometricRoughPath, std::shared_ptr<GeometricRoughPath>>(m, "RoughPath")
      .def_static(
          "lift",
          [](std::vector<double> times, std::vector<Point> values, double gamma, int level) {
            return std::make_shared<GeometricRoughPath>(
                lift_pl(PiecewiseLinearPath(std::move(times), std::move(values)), gamma, level));
          },
          py::arg("times"), py::arg("values"), py::arg("gamma"), py::arg("level") = 0,
          "signature lift of the piecewise-linear path through (times[j], values[j])")
      .def_static(
          "from_json",
          [](const std::string& text) {
            return std::make_shared<GeometricRoughPath>(rough_path_from_json(parse_json(text, "rough path")));
          },
          py::arg("text"))
      .def("to_json", [](const GeometricRoughPath& w) { return dump_json(rough_path_to_json(w)); })
      .def("increment", [](const GeometricRoughPath& w, double s, double t) { return tensor_dict(w.increment(s, t).tensor()); },
           py::arg("s"), py::arg("t"), "W_st as {word: value}")
      .def("with_level", [](const GeometricRoughPath& w, int level) { return std::make_shared<GeometricRoughPath>(w.with_level(level)); })
      .def_property_readonly("gamma", &GeometricRoughPath::gamma)
      .def_property_readonly("level", &GeometricRoughPath::level)
      .def_property_readonly("dim", &GeometricRoughPath::dim)
      .def_property_readonly("times", &GeometricRoughPath::times)
      .def_property_readonly("horizon", &GeometricRoughPath::horizon);

  m.def(
      "sample_fbm",
      [](double hurst, int d, int knots, std::uint64_t seed, double horizon) {
        const auto p = sample_fbm(hurst, d, knots, seed, horizon);
        return std::make_pair(p.times(), p.values());
      },
      py::arg("hurst"), py::arg("d"), py::arg("knots"), py::arg("seed"), py::arg("horizon") = 1.0);

  py::class_<SmoothFunction>(m, "Function")
      .def_static("from_json", [](const std::string& text) { return function_from_json(parse_json(text, "function")); })
      .def("to_json", [](const SmoothFunction& f) { return dump_json(function_to_json(f)); })
      .def("__call__", [](const SmoothFunction& f, const Point& x) { return f(x); })
      .def_property_readonly("n_in", &SmoothFunction::n_in)
      .def_property_readonly("n_out", &SmoothFunction::n_out);

  py::class_<VectorFieldSystem>(m, "Fields")
      .def_static("from_json", [](const std::string& text) { return fields_from_json(parse_json(text, "fields")); })
      .def(py::init([](std::vector<SmoothFunction> fs) { return VectorFieldSystem(std::move(fs)); }))
      .def_property_readonly("d", &VectorFieldSystem::d)
      .def_property_readonly("n", &VectorFieldSystem::n);

  m.def(
      "solve_rde",
      [](const Point& x0, const VectorFieldSystem& v, const PyPath& w, double mesh, std::optional<double> horizon) {
        const auto sol = solve_rde(x0, v, w, mesh_partition(w->times().front(), horizon.value_or(w->horizon()), mesh));
        std::vector<Point> states;
        for (std::size_t j = 0; j < sol.size(); ++j) states.push_back(sol.state(j));
        return std::make_tuple(sol.times(), states, sol.residual, sol.level);
      },
      py::arg("x0"), py::arg("fields"), py::arg("driver"), py::arg("mesh") = 1e-3, py::arg("horizon") = py::none(),
      py::call_guard<py::gil_scoped_release>(), "(times, states, residual, level)");

  m.def(
      "solve_transport",
      [](const VectorFieldSystem& v, const SmoothFunction& g, const PyPath& w, const std::vector<std::pair<double, Point>>& q,
         double mesh, std::optional<double> horizon) {
        std::vector<TransportQuery> queries;
        for (const auto& [s, x] : q) queries.push_back({s, x});
        return solve_transport(problem(v, g, w, mesh, horizon), queries);
      },
      py::arg("fields"), py::arg("terminal"), py::arg("driver"), py::arg("queries"), py::arg("mesh") = 1e-3,
      py::arg("horizon") = py::none(), py::call_guard<py::gil_scoped_release>(), "u(s, x) = g(X^{s,x}_T) per (s, x)");

  m.def(
      "verify_transport",
      [](const VectorFieldSystem& v, const SmoothFunction& g, const PyPath& w, const std::vector<Point>& grid, int times,
         double mesh) {
        const auto p = problem(v, g, w, mesh, std::nullopt);
        return dump_json(graded_to_json("transport", verify_transport(p, transport_jets(p), grid, uniform(w->times().front(), p.horizon, times))));
      },
      py::arg("fields"), py::arg("terminal"), py::arg("driver"), py::arg("grid"), py::arg("times") = 256, py::arg("mesh") = 1e-3,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "solve_continuity",
      [](const VectorFieldSystem& v, const PyPath& w, std::vector<double> weights, std::vector<Point> points, int times,
         double mesh) {
        const auto rho = solve_continuity(v, w, measure(std::move(weights), std::move(points)), uniform(w->times().front(), w->horizon(), times), mesh);
        return std::make_pair(rho.times, rho.points);
      },
      py::arg("fields"), py::arg("driver"), py::arg("weights"), py::arg("points"), py::arg("times") = 256, py::arg("mesh") = 1e-3,
      py::call_guard<py::gil_scoped_release>(), "(times, points[time][particle])");

  m.def(
      "verify_continuity",
      [](const VectorFieldSystem& v, const PyPath& w, std::vector<double> weights, std::vector<Point> points,
         const std::vector<SmoothFunction>& phis, int times, double mesh) {
        const auto rho = solve_continuity(v, w, measure(std::move(weights), std::move(points)), uniform(w->times().front(), w->horizon(), times), mesh);
        return dump_json(graded_to_json("continuity", verify_continuity(v, w, rho, phis)));
      },
      py::arg("fields"), py::arg("driver"), py::arg("weights"), py::arg("points"), py::arg("phis"), py::arg("times") = 256,
      py::arg("mesh") = 1e-3, py::call_guard<py::gil_scoped_release>());

  m.def(
      "duality_check",
      [](const VectorFieldSystem& v, const SmoothFunction& g, const PyPath& w, std::vector<double> weights,
         std::vector<Point> points, int times, double mesh) {
        const auto p = problem(v, g, w, mesh, std::nullopt);
        const auto r = duality_check(p, measure(std::move(weights), std::move(points)), uniform(w->times().front(), p.horizon, times));
        return std::make_tuple(r.times, r.alpha, r.drift);
      },
      py::arg("fields"), py::arg("terminal"), py::arg("driver"), py::arg("weights"), py::arg("points"), py::arg("times") = 16,
      py::arg("mesh") = 1e-3, py::call_guard<py::gil_scoped_release>(), "(times, alpha, drift)");
}
