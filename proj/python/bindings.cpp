// Copyright 2026 The macromech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "macromech/conditioning.hpp"
#include "macromech/errors.hpp"
#include "macromech/experiment.hpp"
#include "macromech/fidelity.hpp"
#include "macromech/macroscopicity.hpp"
#include "macromech/subtraction.hpp"

namespace py = pybind11;
using namespace macromech;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Conditional mechanical-state engineering in cavity optomechanics";
  m.attr("__version__") = version();

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_ArithmeticError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_ArithmeticError);
  py::register_exception<DegenerateOutcome>(m, "DegenerateOutcome", PyExc_ArithmeticError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_ArithmeticError);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init([](Complex alpha, Complex beta, double k, double r, double tau) {
             SystemParams p{alpha, beta, k, r, tau};
             p.validate();
             return p;
           }),
           py::arg("alpha") = Complex(0.8, 0.0), py::arg("beta") = Complex(2.0, 0.0),
           py::arg("k") = 1.0, py::arg("r") = 0.0, py::arg("tau") = 0.0)
      .def_readwrite("alpha", &SystemParams::alpha)
      .def_readwrite("beta", &SystemParams::beta)
      .def_readwrite("k", &SystemParams::k)
      .def_readwrite("r", &SystemParams::r)
      .def_readwrite("tau", &SystemParams::tau);

  py::class_<Homodyne>(m, "Homodyne")
      .def(py::init<double, double>(), py::arg("x"), py::arg("theta") = 0.0)
      .def_readwrite("x", &Homodyne::x)
      .def_readwrite("theta", &Homodyne::theta);
  py::class_<Heterodyne>(m, "Heterodyne")
      .def(py::init<Complex>(), py::arg("sigma"))
      .def_readwrite("sigma", &Heterodyne::sigma);

  py::class_<CoherentSuperposition>(m, "CoherentSuperposition")
      .def(py::init([](const std::vector<std::pair<Complex, Complex>>& terms) {
             std::vector<CoherentTerm> t;
             for (const auto& [w, a] : terms) t.push_back({w, a});
             return CoherentSuperposition::normalized(std::move(t));
           }),
           py::arg("terms"), "Normalized state from (weight, amplitude) pairs.")
      .def_property_readonly("terms",
                             [](const CoherentSuperposition& s) {
                               std::vector<std::pair<Complex, Complex>> out;
                               for (const auto& t : s.terms()) out.emplace_back(t.weight, t.amplitude);
                               return out;
                             })
      .def_property_readonly("norm_squared", &CoherentSuperposition::norm_squared)
      .def("__len__", &CoherentSuperposition::size);

  m.def("conditional_state",
        [](const SystemParams& p, const MeasurementSetting& s, double tol) {
          py::gil_scoped_release release;
          return conditional_state(p, s, tol);
        },
        py::arg("params"), py::arg("setting"), py::arg("tol") = 1e-10);
  m.def("measure_I", &measure_I, py::arg("state"));
  m.def("measure_I_quadrature",
        py::overload_cast<const CoherentSuperposition&, double>(&measure_I_quadrature),
        py::arg("state"), py::arg("tol") = 1e-9);
  m.def("mean_excitations", &mean_excitations, py::arg("state"));
  m.def("wigner", &wigner, py::arg("state"), py::arg("delta"));

  py::enum_<Parity>(m, "Parity").value("EVEN", Parity::kEven).value("ODD", Parity::kOdd);
  m.def("cat_state", [](Complex lambda, Parity p) { return cat_state({lambda, p}); },
        py::arg("lam"), py::arg("parity") = Parity::kEven);
  m.def("cat_fidelity", &cat_fidelity, py::arg("state"), py::arg("lam"), py::arg("parity"));
  m.def("optimize_lambda",
        [](const CoherentSuperposition& s, Parity p, double half_width, double step) {
          const auto opt = optimize_lambda(s, p, {half_width, step, 1e-8});
          return py::make_tuple(opt.lambda, opt.fidelity);
        },
        py::arg("state"), py::arg("parity"), py::arg("half_width") = 4.0, py::arg("step") = 0.05);

  py::class_<GaussianState>(m, "GaussianState")
      .def_static("thermal", &GaussianState::thermal, py::arg("nbar"))
      .def_static("squeezed_thermal", &GaussianState::squeezed_thermal, py::arg("nbar"), py::arg("s"))
      .def_property_readonly("mean_excitations", &GaussianState::mean_excitations);
  m.def("subtracted_I", [](const GaussianState& g) { return measure_I_wigner(subtract_excitation(g)); },
        py::arg("gaussian"));
  m.def("subtracted_mean_excitations",
        [](const GaussianState& g) { return mean_excitations_wigner(subtract_excitation(g)); },
        py::arg("gaussian"));

  m.def("run",
        [](const std::filesystem::path& config, const std::filesystem::path& out_dir,
           std::optional<std::uint64_t> seed, bool debug_invariants) {
          const auto cfg = load_config(config);
          RunOptions opts;
          opts.out_dir = out_dir;
          opts.seed = seed;
          opts.debug_invariants = debug_invariants;
          py::gil_scoped_release release;
          return run_experiment(cfg, opts).manifest;
        },
        py::arg("config"), py::arg("out_dir") = ".", py::arg("seed") = py::none(),
        py::arg("debug_invariants") = false, "Runs a config; returns the manifest path.");
}
