#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rsvm/bench.hpp"
#include "rsvm/data.hpp"
#include "rsvm/errors.hpp"
#include "rsvm/model.hpp"
#include "rsvm/screening.hpp"
#include "rsvm/solver.hpp"

namespace py = pybind11;
using namespace rsvm;

PYBIND11_MODULE(rsvm, m) {
  m.doc() = "Robust SVM with l2 feature uncertainty and dynamic safe sample screening";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](Matrix x, Vector y, std::optional<Vector> rho) {
             const Index n = x.rows();
             return Dataset(std::move(x), std::move(y), rho ? *rho : Vector::Zero(n));
           }),
           py::arg("features"), py::arg("labels"), py::arg("radii") = py::none())
      .def_property_readonly("n", &Dataset::size)
      .def_property_readonly("dim", &Dataset::dim)
      .def_property_readonly("features", &Dataset::features)
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("radii", &Dataset::radii)
      .def("__len__", &Dataset::size)
      .def("__eq__", &Dataset::operator==);

  m.def("parse_libsvm", &parse_libsvm, py::arg("text"));
  m.def("write_libsvm", &write_libsvm, py::arg("dataset"));
  m.def(
      "parse_csv",
      [](const std::string& text, Index label_column, bool has_header) {
        return parse_csv(text, {label_column, has_header, ','});
      },
      py::arg("text"), py::arg("label_column") = 0, py::arg("has_header") = false);
  m.def("augment_bias", &augment_bias);
  m.def("standardize", [](const Dataset& ds) {
    Standardized s = standardize(ds);
    return py::make_tuple(std::move(s.dataset), std::move(s.mean), std::move(s.scale));
  });
  m.def(
      "gen_gaussian",
      [](Index n, Index dim, double separation, double noise_std, std::uint64_t seed) {
        return gen_gaussian({n, dim, separation, noise_std, seed});
      },
      py::arg("n"), py::arg("dim"), py::arg("separation") = 3.0, py::arg("noise_std") = 1.0,
      py::arg("seed") = 0);
  m.def("set_radii", py::overload_cast<const Dataset&, double>(&set_radii));
  m.def("set_radii", [](const Dataset& ds, const std::vector<double>& rho) { return set_radii(ds, rho); });

  py::class_<Hyperparams>(m, "Hyperparams")
      .def(py::init([](double C, double gap_tol, int max_epochs) {
             Hyperparams hp{C, gap_tol, max_epochs};
             hp.validate();
             return hp;
           }),
           py::arg("C") = 1.0, py::arg("gap_tol") = 1e-6, py::arg("max_epochs") = 100000)
      .def_readwrite("C", &Hyperparams::C)
      .def_readwrite("gap_tol", &Hyperparams::gap_tol)
      .def_readwrite("max_epochs", &Hyperparams::max_epochs);

  py::class_<DualIterate>(m, "DualIterate")
      .def_readonly("alpha", &DualIterate::alpha)
      .def_readonly("d", &DualIterate::d)
      .def_readonly("s", &DualIterate::s)
      .def_readonly("w", &DualIterate::w)
      .def_readonly("dual_value", &DualIterate::dual_value)
      .def_readonly("primal_value", &DualIterate::primal_value)
      .def_readonly("gap", &DualIterate::gap);

  m.def("primal_objective", &primal_objective, py::arg("w"), py::arg("dataset"), py::arg("hp"));
  m.def("dual_objective", py::overload_cast<const Vector&, const Dataset&, const Hyperparams&>(&dual_objective),
        py::arg("alpha"), py::arg("dataset"), py::arg("hp"));
  m.def("primal_from_dual", &primal_from_dual, py::arg("alpha"), py::arg("dataset"));
  m.def("margins", &margins, py::arg("w"), py::arg("dataset"));
  m.def("dual_gradient", &dual_gradient, py::arg("alpha"), py::arg("dataset"));
  m.def(
      "duality_gap",
      [](const Vector& alpha, const Dataset& ds, const Hyperparams& hp) {
        const GapReport g = duality_gap(alpha, ds, hp);
        return py::make_tuple(g.primal, g.dual, g.gap);
      },
      py::arg("alpha"), py::arg("dataset"), py::arg("hp"));

  py::class_<SolveReport>(m, "SolveReport")
      .def_readonly("iterate", &SolveReport::iterate)
      .def_readonly("epochs", &SolveReport::epochs)
      .def_readonly("converged", &SolveReport::converged)
      .def_readonly("gap_history", &SolveReport::gap_history);

  m.def(
      "solve",
      [](const Dataset& ds, const Hyperparams& hp, std::optional<double> tol, std::optional<int> max_epochs) {
        SolveOptions o;
        o.tol = tol.value_or(hp.gap_tol);
        o.max_epochs = max_epochs.value_or(hp.max_epochs);
        return solve(ds, hp, {}, Vector::Zero(ds.size()), o);
      },
      py::arg("dataset"), py::arg("hp"), py::arg("tol") = py::none(), py::arg("max_epochs") = py::none());

  py::class_<SafeBall>(m, "SafeBall")
      .def_readonly("center", &SafeBall::center)
      .def_readonly("radius", &SafeBall::radius)
      .def_readonly("gap", &SafeBall::gap);
  m.def("gap_ball", &gap_ball);
  m.def(
      "margin_bounds",
      [](const SafeBall& ball, const Dataset& ds, Index i) {
        const MarginBounds b = margin_bounds(ball, ds.sample(i));
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("ball"), py::arg("dataset"), py::arg("index"));

  py::class_<Partition>(m, "Partition")
      .def_property_readonly("R", &Partition::zero_set)
      .def_property_readonly("S", &Partition::C_set)
      .def_property_readonly("F", &Partition::free_set)
      .def("screened_fraction", &Partition::screened_fraction);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("iter", &TraceRow::iter)
      .def_readonly("gap", &TraceRow::gap)
      .def_readonly("radius", &TraceRow::radius)
      .def_readonly("n_zero", &TraceRow::n_zero)
      .def_readonly("n_C", &TraceRow::n_C)
      .def_readonly("n_free", &TraceRow::n_free)
      .def_readonly("seconds", &TraceRow::seconds);

  py::class_<ScreenResult>(m, "ScreenResult")
      .def_readonly("iterate", &ScreenResult::iterate)
      .def_readonly("partition", &ScreenResult::partition)
      .def_property_readonly("trace", [](const ScreenResult& r) { return r.trace.rows; })
      .def_property_readonly("trace_csv", [](const ScreenResult& r) { return r.trace.to_csv(); })
      .def_readonly("converged", &ScreenResult::converged)
      .def_readonly("epochs", &ScreenResult::epochs);

  m.def(
      "dynamic_screen",
      [](const Dataset& ds, const Hyperparams& hp, double eps, Index f_min, int screen_every) {
        ScreenOptions o;
        o.eps = eps;
        o.f_min = f_min;
        o.screen_every = screen_every;
        return dynamic_screen(ds, hp, o);
      },
      py::arg("dataset"), py::arg("hp"), py::arg("eps") = 1e-6, py::arg("f_min") = 0,
      py::arg("screen_every") = 10);

  m.def(
      "verify_no_false_screening",
      [](const Partition& p, const Dataset& ds, const Hyperparams& hp) {
        const AuditReport r = verify_no_false_screening(p, ds, hp);
        return py::make_tuple(r.passed, r.bad_zero, r.bad_C);
      },
      py::arg("partition"), py::arg("dataset"), py::arg("hp"));

  m.def(
      "run_grid",
      [](const Dataset& ds, std::vector<double> C_grid, std::vector<double> rho_grid, int repeats, double eps) {
        bench::GridOptions o;
        o.C_grid = std::move(C_grid);
        o.rho_grid = std::move(rho_grid);
        o.repeats = repeats;
        o.eps = eps;
        const auto records = bench::run_grid(ds, o);
        return py::make_tuple(bench::records_csv(records), bench::summary_csv(bench::summarize(records)));
      },
      py::arg("dataset"), py::arg("C_grid") = bench::kDefaultCGrid, py::arg("rho_grid") = bench::kDefaultRhoGrid,
      py::arg("repeats") = 1, py::arg("eps") = 1e-6);
}
