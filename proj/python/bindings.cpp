#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "kdvk/bourgain.hpp"
#include "kdvk/cli.hpp"
#include "kdvk/error.hpp"
#include "kdvk/evolution.hpp"
#include "kdvk/gevrey.hpp"
#include "kdvk/monitors.hpp"
#include "kdvk/probe.hpp"
#include "kdvk/spectral.hpp"

namespace py = pybind11;
using namespace kdvk;

namespace {

py::array_t<double> physical_array(const Field& f) {
  auto v = f.physical();
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<cplx> spectral_array(const Field& f) {
  auto v = f.spectral();
  return py::array_t<cplx>(static_cast<py::ssize_t>(v.size()), v.data());
}

Field field_from_array(const GridSpec& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1) throw ConfigError("expected a 1-d array");
  std::vector<double> v(a.data(), a.data() + a.size());
  return Field::from_physical(g, std::move(v));
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> storage{"kdvk"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

PYBIND11_MODULE(_kdvk, m) {
  m.doc() = "Damped KdV-Kawahara pseudospectral core";
  m.attr("__version__") = KDVK_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EstimatorError>(m, "EstimatorError", PyExc_ArithmeticError);
  py::register_exception<OverflowGuardError>(m, "OverflowGuardError", PyExc_OverflowError);
  py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_RuntimeError);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<std::size_t, double>(), py::arg("n"), py::arg("period"))
      .def_property_readonly("size", &GridSpec::size)
      .def_property_readonly("period", &GridSpec::period)
      .def_property_readonly("dx", &GridSpec::dx)
      .def_property_readonly("xi_max", &GridSpec::xi_max)
      .def("x", [](const GridSpec& g) {
        py::array_t<double> out(static_cast<py::ssize_t>(g.size()));
        auto r = out.mutable_unchecked<1>();
        for (std::size_t j = 0; j < g.size(); ++j) r(static_cast<py::ssize_t>(j)) = g.x(j);
        return out;
      })
      .def("wavenumbers", [](const GridSpec& g) {
        auto w = g.wavenumbers();
        return py::array_t<double>(static_cast<py::ssize_t>(w.size()), w.data());
      });

  py::class_<Field>(m, "Field")
      .def_static("from_physical", &field_from_array, py::arg("grid"), py::arg("values"))
      .def_static("zeros", &Field::zeros)
      .def_property_readonly("grid", &Field::grid)
      .def("physical", &physical_array)
      .def("spectral", &spectral_array);

  py::class_<EquationParams>(m, "EquationParams")
      .def(py::init<double, double, double, double>(), py::arg("alpha"), py::arg("beta"),
           py::arg("mu"), py::arg("lam"))
      .def_property_readonly("alpha", &EquationParams::alpha)
      .def_property_readonly("beta", &EquationParams::beta)
      .def_property_readonly("mu", &EquationParams::mu)
      .def_property_readonly("lam", &EquationParams::lambda);

  m.def("dispersion_symbol", &dispersion_symbol, py::arg("xi"), py::arg("params"));
  m.def("l2_norm", &l2_norm);
  m.def("spatial_derivative", &spatial_derivative, py::arg("field"), py::arg("order"));
  m.def("linear_propagator", &linear_propagator, py::arg("field"), py::arg("t"), py::arg("params"));
  m.def("gevrey_norm", [](const Field& f, double s) { return gevrey_norm(f, GevreyWeight(s)); },
        py::arg("field"), py::arg("sigma"));

  py::class_<DampingProfile>(m, "DampingProfile")
      .def_static("constant", &DampingProfile::constant, py::arg("grid"), py::arg("value"),
                  py::arg("gamma"))
      .def_static("cosine_bump", &DampingProfile::cosine_bump, py::arg("grid"), py::arg("gamma"),
                  py::arg("amplitude"), py::arg("wavenumber"))
      .def_static("sinusoid", &DampingProfile::sinusoid, py::arg("grid"), py::arg("offset"),
                  py::arg("amplitude"), py::arg("wavenumber"), py::arg("gamma"))
      .def_property_readonly("gamma", &DampingProfile::gamma)
      .def_property_readonly("sup_norm", &DampingProfile::sup_norm)
      .def_property_readonly("derivative_sup_norms", &DampingProfile::derivative_sup_norms);
  m.def("a_sigma_norm", [](const DampingProfile& a, double s) { return a_sigma_norm(a, GevreyWeight(s)); },
        py::arg("profile"), py::arg("sigma"));

  py::class_<RadiusFit>(m, "RadiusFit")
      .def_readonly("sigma_hat", &RadiusFit::sigma_hat)
      .def_readonly("residual", &RadiusFit::residual)
      .def_readonly("modes_used", &RadiusFit::modes_used)
      .def_readonly("rate_growth", &RadiusFit::rate_growth)
      .def_readonly("entire_beyond_window", &RadiusFit::entire_beyond_window);
  m.def("estimate_radius",
        [](const Field& f, double lo, double hi) { return estimate_radius(f, {lo, hi}); },
        py::arg("field"), py::arg("lo"), py::arg("hi"));

  m.def("evolve_l2",
        [](const Field& u0, double T, const EquationParams& p, const DampingProfile& a, double dt,
           std::size_t record_every) {
          IntegratorConfig cfg;
          cfg.dt = dt;
          cfg.record_every = record_every;
          MonitorSet monitors;
          monitors.radius = false;
          const Trajectory traj = evolve(State(u0, 0.0), T, p, a, cfg, monitors);
          std::vector<double> t, l2;
          for (const auto& r : traj.records) {
            t.push_back(r.t);
            l2.push_back(r.l2);
          }
          return py::make_tuple(t, l2, traj.states.back().field);
        },
        py::arg("u0"), py::arg("T"), py::arg("params"), py::arg("damping"), py::arg("dt"),
        py::arg("record_every") = 1,
        "Evolve and return (times, L2 norms, final field) at the recorded states.");

  py::class_<TriangleReport>(m, "TriangleReport")
      .def_readonly("violations", &TriangleReport::violations)
      .def_readonly("max_ratio", &TriangleReport::max_ratio)
      .def_readonly("passed", &TriangleReport::pass);
  m.def("probe_exponential_triangle", &probe_exponential_triangle, py::arg("sigma"),
        py::arg("points") = 256, py::arg("spacing") = 0.125);

  py::class_<WeightReport>(m, "WeightReport")
      .def_readonly("max_ratio", &WeightReport::max_ratio)
      .def_readonly("range_stable", &WeightReport::range_stable);
  m.def("probe_weight_inequality", &probe_weight_inequality, py::arg("a_exp"), py::arg("b_exp"),
        py::arg("sign") = 1, py::arg("range") = 100.0, py::arg("points") = 401);

  m.def("preset_names", &cli::preset_names);
  m.def("preset_config_json", [](const std::string& name) { return cli::config_json(cli::preset(name)); });
  m.def("parse_config_json", [](const std::string& text) { return cli::config_json(cli::parse_config(text)); },
        py::arg("text"), "Parse INI text over its preset and return the resolved config as JSON.");
  m.def("cli_main", &cli_main, py::arg("args"),
        "Run the command-line driver with the given arguments; returns the exit code.");
}
