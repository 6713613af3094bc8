#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracreset/describing.hpp"
#include "fracreset/fode.hpp"
#include "fracreset/models.hpp"
#include "fracreset/numcore.hpp"
#include "fracreset/scenario.hpp"
#include "fracreset/simreset.hpp"
#include "fracreset/stability.hpp"

namespace py = pybind11;
using namespace fracreset;

namespace {

Element make_element(const std::string& kind, double alpha, double gain,
                     double pole) {
  Element e;
  e.kind = element_kind_from_string(kind);
  e.alpha = alpha;
  e.gain = gain;
  e.pole = pole;
  return e;
}

py::dict metrics_dict(const StepMetrics& m, const Trajectory& traj) {
  py::dict d;
  d["overshoot"] = m.overshoot;
  d["peak_time"] = m.peak_time;
  d["settling_time"] =
      m.settling_time ? py::object(py::float_(*m.settling_time))
                      : py::object(py::none());
  d["steady_state_error"] = m.steady_state_error;
  d["y_final"] = m.y_final;
  d["reset_instants"] = traj.reset_instants;
  d["diverged"] = traj.diverged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Numerical toolkit for fractional-order reset control: "
      "Grünwald–Letnikov simulation, describing functions and H_beta/SPR "
      "stability certificates.";

  py::register_exception<Error>(m, "ToolkitError");

  m.def(
      "gl_weights",
      [](double alpha, std::size_t length) { return gl_weights(alpha, length).w; },
      py::arg("alpha"), py::arg("length"),
      "Grünwald–Letnikov binomial weights w_0..w_length for order alpha.");

  m.def(
      "matrix_fractional_power",
      [](const Matrix& a, double alpha) {
        return matrix_fractional_power_real(a, alpha);
      },
      py::arg("a"), py::arg("alpha"),
      "The stability transform -(-A)^(1/(2-alpha)) (principal branch).");

  m.def("lyapunov_solve", &lyapunov_solve, py::arg("a"), py::arg("q"),
        "Solve A^T P + P A = -Q for symmetric P.");

  m.def(
      "describing_function",
      [](const std::string& kind, double omega, double alpha, double gain,
         double pole) {
        return describing_function(make_element(kind, alpha, gain, pole),
                                   omega);
      },
      py::arg("kind"), py::arg("omega"), py::arg("alpha") = 1.0,
      py::arg("gain") = 1.0, py::arg("pole") = 0.0,
      "Closed-form describing function of CI, FORE, FCI, FI or II.");

  m.def(
      "phase_lead",
      [](const std::string& kind, double alpha) {
        return phase_lead(element_kind_from_string(kind), alpha);
      },
      py::arg("kind"), py::arg("alpha") = 1.0,
      "Phase lead in degrees over the linear integer integrator.");

  m.def(
      "numerical_df",
      [](const std::string& kind, double amplitude, double omega, double h,
         std::size_t cycles, double alpha, double gain, double pole) {
        return numerical_df(make_element(kind, alpha, gain, pole), amplitude,
                            omega, h, cycles);
      },
      py::arg("kind"), py::arg("amplitude"), py::arg("omega"), py::arg("h"),
      py::arg("cycles") = 10, py::arg("alpha") = 1.0, py::arg("gain") = 1.0,
      py::arg("pole") = 0.0,
      "First-harmonic describing-function oracle via GL simulation.");

  m.def(
      "simulate_metrics",
      [](const std::string& scenario_json) {
        const Scenario s = parse_scenario(scenario_json);
        const ClosedLoopResetSystem sys = build_system(s);
        validate(s.sim);
        const Trajectory traj = simulate(sys, s.sim);
        if (traj.diverged) {
          throw Divergence("trajectory diverged");
        }
        return metrics_dict(step_metrics(traj, s.sim.reference.amplitude),
                            traj);
      },
      py::arg("scenario_json"),
      "Simulate a scenario and return its step-response metrics.");

  m.def(
      "stability_json",
      [](const std::string& scenario_json) {
        const Scenario s = parse_scenario(scenario_json);
        const ClosedLoopResetSystem sys = build_system(s);
        return stability_report_json(
            stability_report(sys, 1.0, s.beta_lo, s.beta_hi));
      },
      py::arg("scenario_json"),
      "Full H_beta/SPR stability report for a scenario, as a JSON string.");

  m.def(
      "run_scenario",
      [](const std::string& scenario_json, const std::string& out_dir) {
        const Scenario s = parse_scenario(scenario_json);
        ScenarioOverrides overrides;
        overrides.out_dir = out_dir;
        const RunOutcome outcome = run_scenario(s, overrides);
        py::dict d;
        d["exit_code"] = outcome.exit_code;
        d["error"] = outcome.error_json;
        d["files"] = outcome.written_files;
        return d;
      },
      py::arg("scenario_json"), py::arg("out_dir") = ".",
      "Run a scenario's requested analyses, writing artifact files.");

  m.def(
      "bundled_scenario_names",
      [] {
        std::vector<std::string> names;
        for (const auto& [name, text] : bundled_scenarios()) names.push_back(name);
        return names;
      },
      "Names of the scenarios bundled for regression runs.");

  m.def(
      "bundled_scenario",
      [](const std::string& name) {
        const auto& all = bundled_scenarios();
        const auto it = all.find(name);
        if (it == all.end()) {
          throw SchemaViolation("no bundled scenario named '" + name + "'");
        }
        return it->second;
      },
      py::arg("name"), "The JSON text of a bundled scenario.");

  m.def(
      "reproduce_paper",
      [](const std::string& subset, const std::string& out_dir) {
        const ReproReport report = reproduce_paper(subset, out_dir);
        py::list rows;
        for (const auto& r : report.rows) {
          py::dict d;
          d["name"] = r.name;
          d["computed"] = r.computed;
          d["expected"] = r.expected;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          rows.append(d);
        }
        py::dict out;
        out["all_pass"] = report.all_pass;
        out["rows"] = rows;
        out["table"] = format_repro_table(report);
        return out;
      },
      py::arg("subset") = "", py::arg("out_dir") = ".",
      "Run the bundled regression table; subset is '', 'sim', 'df' or 'stab'.");
}
