#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracreset/describing.hpp"
#include "fracreset/models.hpp"
#include "fracreset/simreset.hpp"
#include "fracreset/stability.hpp"

namespace fracreset {

/// Declarative description of one closed-loop study. Parsed from strict JSON:
/// unknown keys are rejected so typos in alpha/b/K cannot silently default.
struct Scenario {
  std::string name;

  // plant: transfer function (descending coefficients) or explicit matrices
  std::vector<double> plant_num;
  std::vector<double> plant_den;
  std::optional<Matrix> plant_a;
  std::optional<Matrix> plant_b;
  std::optional<Matrix> plant_c;

  // optional linear controller num/den; an improper controller (den == [k])
  // is folded into the plant output row
  std::optional<std::vector<double>> controller_num;
  std::optional<std::vector<double>> controller_den;

  Element element{};
  bool element_resets = true;

  SimulationConfig sim{};
  std::vector<std::string> analyses;  // subset of simulate/metrics/df/stability

  double beta_lo = -2.0;
  double beta_hi = 2.0;
  std::optional<double> phase_beta;  // beta used for the phase CSV

  bool operator==(const Scenario& other) const;
};

/// Strict parse; throws SchemaViolation with a path-annotated message.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);

/// Assembles the closed loop described by the scenario (transfer functions to
/// controllable canonical form, controller folding, order augmentation).
ClosedLoopResetSystem build_system(const Scenario& s);

/// Command-line overrides applied on top of a parsed scenario.
struct ScenarioOverrides {
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<MemoryMode> memory_mode;
  std::string out_dir = ".";
};

struct RunOutcome {
  int exit_code = 0;          // 0 ok, 2 validation error, 3 numerical error
  std::string error_json;     // nonempty on failure, serialized for stderr
  std::vector<std::string> written_files;
};

/// Runs the requested analyses and writes <name>_trajectory.csv,
/// <name>_resets.json, <name>_metrics.json, <name>_df.csv,
/// <name>_stability.json, <name>_phase.csv as applicable.
RunOutcome run_scenario_file(const std::string& path,
                             const ScenarioOverrides& overrides);
RunOutcome run_scenario(const Scenario& s, const ScenarioOverrides& overrides);

/// The scenario texts bundled for paper reproduction, keyed by name.
const std::map<std::string, std::string>& bundled_scenarios();

/// Exit class for a library error: 2 for SchemaViolation (bad input), 3 for
/// everything else (numerical/runtime failure).
int exit_code_for(const Error& e);

/// {"error": code, "message": what} serialization used on stderr.
std::string error_json(const Error& e);

/// One comparison row of the reproduction table.
struct ReproRow {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ReproReport {
  std::vector<ReproRow> rows;
  bool all_pass = false;
};

/// Runs the bundled scenarios and regression checks for the requested subset
/// ("sim", "df", "stab" or "" for everything). Scenario simulations run on a
/// worker pool capped by the FRAC_RESET_THREADS environment variable.
ReproReport reproduce_paper(const std::string& subset,
                            const std::string& out_dir);

std::string format_repro_table(const ReproReport& report);

}  // namespace fracreset
