// Copyright 2026 The cavsim Authors
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
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cavsim/experiments.hpp"
#include "cavsim/fock.hpp"
#include "cavsim/limits.hpp"
#include "cavsim/qudit.hpp"
#include "cavsim/vrbs.hpp"

namespace py = pybind11;
using namespace cavsim;

namespace {

py::dict protocol_dict(const ProtocolResult& r) {
  py::dict d;
  d["target_n"] = r.target_n;
  d["population"] = std::vector<double>(r.population.data(), r.population.data() + r.population.size());
  d["fidelity"] = r.fidelity;
  d["keep_probability"] = r.keep_probability;
  d["branch_count"] = r.branch_count;
  d["peak_ratio"] = r.peak_ratio();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Open-system simulation of a transmon coupled to two storage cavities";
  m.attr("__version__") = CAVSIM_VERSION;

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<SystemParams>(m, "SystemParams")
      .def(py::init<>())
      .def_readwrite("omega_a", &SystemParams::omega_a)
      .def_readwrite("omega_b", &SystemParams::omega_b)
      .def_readwrite("omega_q", &SystemParams::omega_q)
      .def_readwrite("alpha", &SystemParams::alpha)
      .def_readwrite("g_a", &SystemParams::g_a)
      .def_readwrite("g_b", &SystemParams::g_b)
      .def_readwrite("chi_e_a", &SystemParams::chi_e_a)
      .def_readwrite("chi_e_b", &SystemParams::chi_e_b)
      .def_readwrite("T1_A", &SystemParams::T1_A)
      .def_readwrite("T1_B", &SystemParams::T1_B)
      .def_readwrite("T1_ge", &SystemParams::T1_ge)
      .def_readwrite("T2_ge", &SystemParams::T2_ge)
      .def_readwrite("T2E_ge", &SystemParams::T2E_ge)
      .def_readwrite("n_th_q", &SystemParams::n_th_q)
      .def("validate", &SystemParams::validate);

  m.def("purcell_limit", &purcell_limit, py::arg("delta_hz"), py::arg("g_hz"), py::arg("T2E"));
  m.def("thermal_dephasing_limit", &thermal_dephasing_limit, py::arg("chi_hz"), py::arg("T1q"), py::arg("n_th"));

  m.def(
      "exp_decay_fit",
      [](const std::vector<double>& t, const std::vector<double>& y, bool with_offset) {
        auto f = exp_decay_fit(t, y, with_offset);
        return py::dict(py::arg("amplitude") = f.amplitude, py::arg("tau") = f.tau, py::arg("offset") = f.offset);
      },
      py::arg("t"), py::arg("y"), py::arg("with_offset") = true);

  m.def(
      "simulate_protocol",
      [](int target_n, const std::string& protocol, bool noise, const SystemParams& p) {
        ProtocolConfig c;
        c.target_n = target_n;
        c.protocol = parse_protocol(protocol);
        if (!noise) {
          c.noise = NoiseToggles::none();
          c.readout = ReadoutModel::ideal();
        }
        return protocol_dict(simulate_protocol(c, p));
      },
      py::arg("target_n"), py::arg("protocol") = "SB", py::arg("noise") = true, py::arg("params") = SystemParams{});

  m.def(
      "fock_lifetimes",
      [](const std::vector<int>& n, const SystemParams& p) {
        std::vector<double> out;
        for (const auto& pt : fock_lifetime_scan(n, p)) out.push_back(pt.T1_fit);
        return out;
      },
      py::arg("n"), py::arg("params") = SystemParams{});

  m.def(
      "bs_fidelity",
      [](double g, double k1, double kphi) {
        auto f = bs_fidelity(g, k1, kphi);
        return py::make_tuple(f.F_BS, f.F_SWAP);
      },
      py::arg("g_bs"), py::arg("kappa_1"), py::arg("kappa_phi"));
  m.def(
      "heating_fit",
      [](const std::vector<double>& n, const std::vector<double>& r) {
        auto f = heating_fit(n, r);
        return py::make_tuple(f.p_up, f.stderr_);
      },
      py::arg("n"), py::arg("rates"));

  m.def("csum", &csum, py::arg("d"));
  m.def("gate_fidelity", &gate_fidelity, py::arg("U"), py::arg("V"));
  m.def(
      "entangling_power",
      [](const Mat& U, int d, int n, uint64_t seed) {
        auto e = entangling_power(U, d, n, seed);
        return py::make_tuple(e.value, e.stderr_);
      },
      py::arg("U"), py::arg("d"), py::arg("n_samples") = 20000, py::arg("seed") = 1);
  m.def("entangling_power_exact", &entangling_power_exact, py::arg("U"), py::arg("d"));
  m.def(
      "vrbs_unitary",
      [](double detuning_hz, int d, const SystemParams& p) {
        VrbsConfig c;
        c.detuning = detuning_hz;
        c.cutoff_a = c.cutoff_b = d;
        return extract_vrbs_unitary(c, p, vrbs_quarter_time(c, p), d).matrix;
      },
      py::arg("detuning_hz"), py::arg("d") = 3, py::arg("params") = SystemParams{});

  m.def("experiment_names", &experiment_names);
  m.def(
      "example_config", [](const std::string& name, bool quick) { return example_config(name, quick).dump(); },
      py::arg("name"), py::arg("quick") = false);
  m.def(
      "validate_config", [](const std::string& text) { validate_config(parse_config_text(text)); },
      py::arg("config_json"));
  m.def(
      "run_experiment",
      [](const std::string& text, const std::string& out_dir, int workers) {
        RunOptions o;
        o.out_dir = out_dir;
        o.workers = workers;
        nlohmann::json cfg = parse_config_text(text);
        validate_config(cfg);
        RunResult r;
        {
          py::gil_scoped_release nogil;
          r = run_experiment(cfg, o);
        }
        return py::make_tuple(r.out_dir, r.summary.dump(), r.files);
      },
      py::arg("config_json"), py::arg("out_dir") = "", py::arg("workers") = 0);
}
