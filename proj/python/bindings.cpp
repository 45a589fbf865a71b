#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stacost/experiment.hpp"
#include "stacost/jaynes_cummings.hpp"
#include "stacost/landau_zener.hpp"
#include "stacost/oc_optimizer.hpp"
#include "stacost/oscillator.hpp"
#include "stacost/ramp.hpp"

namespace py = pybind11;
using namespace stacost;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& obj) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

LzConfig lz_cfg(double duration, double gap, double g0, double g1) {
  LzConfig c;
  c.gap = gap;
  c.g0 = g0;
  c.g1 = g1;
  c.duration = duration;
  c.validate();
  return c;
}

JcConfig jc_cfg(double duration, double detuning, double alpha, int cutoff, double g0, double g1) {
  JcConfig c;
  c.duration = duration;
  c.detuning = detuning;
  c.alpha = alpha;
  c.cutoff = cutoff;
  c.g0 = g0;
  c.g1 = g1;
  c.validate();
  return c;
}

}  // namespace

PYBIND11_MODULE(_stacost, m) {
  m.doc() = "Energetic cost of shortcuts to adiabaticity";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<Ramp>(m, "Ramp")
      .def_property_readonly("duration", &Ramp::duration)
      .def("value", &Ramp::value)
      .def("deriv1", &Ramp::deriv1)
      .def("deriv2", &Ramp::deriv2)
      .def("to_json", [](const Ramp& r) { return to_python(ramp_to_json(r)); })
      .def_static("from_json", [](const py::object& o) { return ramp_from_json(from_python(o)); });

  m.def("poly_smooth_ramp", &poly_smooth_ramp, py::arg("g0"), py::arg("g_delta"), py::arg("duration"));
  m.def("bob_pulse", &bob_pulse, py::arg("amplitude"), py::arg("duration"), py::arg("phi1"),
        py::arg("phi2"));
  m.def("optimal_cd_ramp", &optimal_cd_ramp, py::arg("gap"), py::arg("g0"), py::arg("g1"),
        py::arg("duration"), py::arg("epsilon") = 0.1, py::arg("steepness") = 40.0);

  m.def(
      "qsl_time",
      [](double gap, double g0, double g1) { return qsl_time(lz_cfg(1.0, gap, g0, g1)); },
      py::arg("gap") = 0.1, py::arg("g0") = -0.2, py::arg("g1") = 0.2,
      "Speed-limit time between the sweep's initial and final ground states.");

  m.def(
      "lz_run",
      [](const std::string& protocol, double duration, double gap, double g0, double g1,
         std::optional<Ramp> ramp, std::size_t steps) {
        const LzConfig c = lz_cfg(duration, gap, g0, g1);
        const LzRun r = run_lz(lz_protocol_from_string(protocol), c,
                               ramp ? *ramp : c.quintic_ramp(), steps);
        return py::dict(py::arg("final_fidelity") = r.final_fidelity, py::arg("cost") = r.cost,
                        py::arg("steps") = r.steps);
      },
      py::arg("protocol"), py::arg("duration"), py::arg("gap") = 0.1, py::arg("g0") = -0.2,
      py::arg("g1") = 0.2, py::arg("ramp") = py::none(), py::arg("steps") = 10000,
      "Propagate one Landau-Zener protocol (bare, cd, lcd) and integrate its cost.");

  m.def(
      "lz_cost",
      [](const std::string& protocol, const Ramp& ramp, double gap) {
        return integrated_cost(lz_schedule(lz_protocol_from_string(protocol), gap, ramp), 20000);
      },
      py::arg("protocol"), py::arg("ramp"), py::arg("gap") = 0.1);

  m.def(
      "cd_lcd_crossover",
      [](const std::vector<double>& grid, double gap, double g0, double g1) {
        return cd_lcd_crossover(lz_cfg(1.0, gap, g0, g1), grid);
      },
      py::arg("grid"), py::arg("gap") = 0.1, py::arg("g0") = -0.2, py::arg("g1") = 0.2);

  m.def(
      "optimize_bob_kicks",
      [](double amplitude, double gap, double g0, double g1) {
        const BobKicks b = optimize_bob_kicks(lz_cfg(1.0, gap, g0, g1), amplitude);
        return py::dict(py::arg("phi1") = b.phi1, py::arg("phi2") = b.phi2,
                        py::arg("fidelity") = b.fidelity, py::arg("duration") = b.duration,
                        py::arg("success") = b.success,
                        py::arg("cost") = integrated_cost(lz_bare(gap, b.ramp()), 20000));
      },
      py::arg("amplitude") = 100.0, py::arg("gap") = 0.1, py::arg("g0") = -0.2,
      py::arg("g1") = 0.2);

  m.def(
      "oc_optimize",
      [](double duration, int n_max, double gamma, std::size_t max_evaluations,
         std::uint64_t seed, double gap) {
        OcProblem p;
        p.lz = lz_cfg(duration, gap, -0.2, 0.2);
        p.n_max = n_max;
        p.gamma = gamma;
        p.max_evaluations = max_evaluations;
        p.seed = seed;
        return to_python(to_json(p, optimize(p)));
      },
      py::arg("duration"), py::arg("n_max") = 30, py::arg("gamma") = 5e-3,
      py::arg("max_evaluations") = 24000, py::arg("seed") = 1, py::arg("gap") = 0.1,
      "Fourier-ramp optimisation of q^gamma * C; returns the result record.");

  m.def(
      "oc_objective",
      [](double duration, const std::vector<double>& params, double gamma, double gap) {
        OcProblem p;
        p.lz = lz_cfg(duration, gap, -0.2, 0.2);
        p.n_max = static_cast<int>(params.size() / 2);
        p.gamma = gamma;
        const OcEvaluation e = evaluate(p, params);
        return py::dict(py::arg("objective") = e.objective, py::arg("q") = e.q,
                        py::arg("cost") = e.cost);
      },
      py::arg("duration"), py::arg("params"), py::arg("gamma") = 5e-3, py::arg("gap") = 0.1);

  m.def(
      "oscillator_cost",
      [](const std::string& protocol, double duration, double omega0, double omega1, double beta) {
        const OscillatorCost c = oscillator_cost(FrequencySchedule::quintic(omega0, omega1, duration),
                                                 osc_protocol_from_string(protocol), beta);
        return py::dict(py::arg("cost") = c.cost, py::arg("final_qstar") = c.final_qstar,
                        py::arg("max_qstar") = c.max_qstar, py::arg("valid") = c.valid);
      },
      py::arg("protocol"), py::arg("duration"), py::arg("omega0") = 1.0, py::arg("omega1") = 10.0,
      py::arg("beta") = 3.0,
      "Time-averaged mean energy of an oscillator protocol (bare, cd, lcd, ie); cd raises "
      "ValueError on trap inversion.");

  m.def("cd_min_valid_duration", &cd_min_valid_duration, py::arg("omega0") = 1.0,
        py::arg("omega1") = 10.0, py::arg("tol") = 1e-6);

  m.def("coherent_weights", &coherent_weights, py::arg("alpha"), py::arg("cutoff"));
  m.def("coherent_tail", &coherent_tail, py::arg("alpha"), py::arg("cutoff"));

  m.def(
      "jc_cost_scan",
      [](const std::vector<double>& durations, int photons, double detuning) {
        const auto rows = jc_cost_scan(jc_cfg(1.0, detuning, 0.0, 40, 0.0, 0.2), durations, photons);
        py::list out;
        for (const auto& r : rows)
          out.append(py::dict(py::arg("tau") = r.duration, py::arg("cd") = r.cd,
                              py::arg("lcd") = r.lcd));
        return out;
      },
      py::arg("durations"), py::arg("photons") = 0, py::arg("detuning") = 0.1);

  m.def(
      "jc_ensemble",
      [](const std::string& protocol, double duration, double alpha, int cutoff, double detuning) {
        const JcConfig c = jc_cfg(duration, detuning, alpha, cutoff, 0.0, 0.2);
        const EnsembleResult r = ensemble_run(c, c.quintic_ramp(), jc_protocol_from_string(protocol));
        return py::dict(py::arg("final_fidelity") = r.final_fidelity, py::arg("cost") = r.cost,
                        py::arg("times") = r.times, py::arg("fidelity") = r.fidelity);
      },
      py::arg("protocol"), py::arg("duration"), py::arg("alpha") = 0.0, py::arg("cutoff") = 40,
      py::arg("detuning") = 0.1,
      "Photon-number ensemble run; raises ValueError when the cutoff tail is too large.");

  m.def("preset_names", &preset_names);
  m.def("preset_config", [](const std::string& name) { return to_python(config_to_json(preset(name))); });
  m.def(
      "validate_config",
      [](const py::object& config) {
        const ValidationReport r = validate(config_from_json(from_python(config)));
        return py::dict(py::arg("errors") = r.errors, py::arg("warnings") = r.warnings);
      },
      py::arg("config"));
  m.def(
      "run_config",
      [](const py::object& config, const std::filesystem::path& out_dir) {
        return to_python(run_experiment(config_from_json(from_python(config)), out_dir).summary);
      },
      py::arg("config"), py::arg("out_dir"),
      "Run an experiment config (dict) and return the summary written to out_dir.");
}
