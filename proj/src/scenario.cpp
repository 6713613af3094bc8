#include "fracreset/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace fracreset {

namespace {
using nlohmann::json;

// ----------------------------- strict parsing -----------------------------

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& path) {
  if (!obj.is_object()) {
    throw SchemaViolation(path + ": expected an object");
  }
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SchemaViolation(path + ": unknown key '" + key + "'");
    }
  }
}

double number_at(const json& obj, const std::string& key,
                 const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw SchemaViolation(path + "." + key + ": expected a number");
  }
  return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw SchemaViolation(path + ": expected a nonempty array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) {
      throw SchemaViolation(path + ": expected a number");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix matrix_from(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) {
    throw SchemaViolation(path + ": expected an array of rows");
  }
  const auto first = number_list(v.front(), path + "[0]");
  Matrix m(static_cast<Eigen::Index>(v.size()),
           static_cast<Eigen::Index>(first.size()));
  for (std::size_t r = 0; r < v.size(); ++r) {
    const auto row = number_list(v[r], path + "[" + std::to_string(r) + "]");
    if (row.size() != first.size()) {
      throw SchemaViolation(path + ": ragged rows");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  auto rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

bool same_matrix(const std::optional<Matrix>& a,
                 const std::optional<Matrix>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->rows() == b->rows() && a->cols() == b->cols() &&
         (*a - *b).cwiseAbs().maxCoeff() == 0.0;
}

const std::vector<std::string> kAnalyses = {"simulate", "metrics", "df",
                                            "stability"};

// ------------------------------- artifacts --------------------------------

bool wants(const Scenario& s, const std::string& analysis) {
  return std::find(s.analyses.begin(), s.analyses.end(), analysis) !=
         s.analyses.end();
}

struct Artifacts {
  std::optional<Trajectory> trajectory;
  std::optional<StepMetrics> metrics;
  std::optional<StabilityReport> stability;
  std::vector<DescribingFunctionPoint> df_points;
};

Artifacts analyze(const Scenario& s) {
  Artifacts art;
  const ClosedLoopResetSystem sys = build_system(s);

  if (wants(s, "simulate") || wants(s, "metrics")) {
    validate(s.sim);
    art.trajectory = simulate(sys, s.sim);
    if (wants(s, "metrics")) {
      if (art.trajectory->diverged) {
        throw Divergence("metrics requested but the trajectory diverged");
      }
      art.metrics =
          step_metrics(*art.trajectory, s.sim.reference.amplitude);
    }
  }
  if (wants(s, "df")) {
    for (int i = 0; i < 200; ++i) {
      const double w = std::pow(10.0, -2.0 + 4.0 * i / 199.0);
      art.df_points.push_back({s.element.kind, s.element.effective_alpha(), w,
                               describing_function(s.element, w)});
    }
  }
  if (wants(s, "stability")) {
    art.stability = stability_report(sys, 1.0, s.beta_lo, s.beta_hi);
  }
  return art;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("IOError", "cannot open " + path + " for writing");
  f << body;
  if (!f) throw Error("IOError", "write failed: " + path);
}

std::vector<std::string> emit(const Scenario& s, const Artifacts& art,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const auto file = [&](const std::string& suffix) {
    return (fs::path(out_dir) / (s.name + suffix)).string();
  };

  std::vector<std::string> written;
  if (art.trajectory && wants(s, "simulate")) {
    write_trajectory_csv(*art.trajectory, file("_trajectory.csv"));
    written.push_back(file("_trajectory.csv"));
    write_resets_json(*art.trajectory, file("_resets.json"));
    written.push_back(file("_resets.json"));
  }
  if (art.metrics) {
    json m;
    m["overshoot"] = art.metrics->overshoot;
    m["peak_time"] = art.metrics->peak_time;
    if (art.metrics->settling_time) {
      m["settling_time"] = *art.metrics->settling_time;
    } else {
      m["settling_time"] = nullptr;
    }
    m["steady_state_error"] = art.metrics->steady_state_error;
    m["y_final"] = art.metrics->y_final;
    m["reset_count"] = art.trajectory->reset_instants.size();
    write_text(file("_metrics.json"), m.dump(2) + "\n");
    written.push_back(file("_metrics.json"));
  }
  if (!art.df_points.empty()) {
    write_df_csv(art.df_points, file("_df.csv"));
    written.push_back(file("_df.csv"));
  }
  if (art.stability) {
    write_text(file("_stability.json"),
               stability_report_json(*art.stability));
    written.push_back(file("_stability.json"));
    if (s.phase_beta && !art.stability->flow_unstable) {
      write_text(file("_phase.csv"),
                 phase_csv_string(art.stability->h_beta.at(*s.phase_beta)));
      written.push_back(file("_phase.csv"));
    }
  }
  return written;
}

// ----------------------------- worker pool --------------------------------

unsigned pool_size(std::size_t task_count) {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 2;
  if (const char* env = std::getenv("FRAC_RESET_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed > 0 && parsed <= 256) {
      n = static_cast<unsigned>(parsed);
    }
  }
  return std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(task_count)));
}

void run_pool(std::vector<std::function<void()>>& tasks) {
  if (tasks.empty()) return;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(tasks.size());
  const unsigned workers = pool_size(tasks.size());
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
        try {
          tasks[k]();
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

// ------------------------------ Scenario API -------------------------------

bool Scenario::operator==(const Scenario& other) const {
  return name == other.name && plant_num == other.plant_num &&
         plant_den == other.plant_den && same_matrix(plant_a, other.plant_a) &&
         same_matrix(plant_b, other.plant_b) &&
         same_matrix(plant_c, other.plant_c) &&
         controller_num == other.controller_num &&
         controller_den == other.controller_den &&
         element.kind == other.element.kind &&
         element.gain == other.element.gain &&
         element.pole == other.element.pole &&
         element.alpha == other.element.alpha &&
         element_resets == other.element_resets && sim.h == other.sim.h &&
         sim.horizon == other.sim.horizon &&
         sim.reference.amplitude == other.sim.reference.amplitude &&
         sim.reference.omega == other.sim.reference.omega &&
         sim.memory_mode == other.sim.memory_mode &&
         sim.detection_tol == other.sim.detection_tol &&
         sim.max_memory == other.sim.max_memory &&
         analyses == other.analyses && beta_lo == other.beta_lo &&
         beta_hi == other.beta_hi && phase_beta == other.phase_beta;
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string("scenario: invalid JSON: ") + e.what());
  }
  require_keys(root,
               {"name", "plant", "controller", "element", "simulation",
                "analyses", "stability"},
               "scenario");

  Scenario s;
  if (!root.contains("name") || !root.at("name").is_string()) {
    throw SchemaViolation("scenario.name: required string");
  }
  s.name = root.at("name").get<std::string>();
  if (s.name.empty() ||
      s.name.find_first_not_of(
          "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") !=
          std::string::npos) {
    throw SchemaViolation("scenario.name: must be a nonempty filename-safe "
                          "token");
  }

  if (!root.contains("plant")) {
    throw SchemaViolation("scenario.plant: required");
  }
  const json& plant = root.at("plant");
  require_keys(plant, {"num", "den", "a", "b", "c"}, "scenario.plant");
  const bool tf_form = plant.contains("num") || plant.contains("den");
  const bool ss_form =
      plant.contains("a") || plant.contains("b") || plant.contains("c");
  if (tf_form == ss_form) {
    throw SchemaViolation(
        "scenario.plant: give either {num, den} or {a, b, c}");
  }
  if (tf_form) {
    if (!plant.contains("num") || !plant.contains("den")) {
      throw SchemaViolation("scenario.plant: num and den are both required");
    }
    s.plant_num = number_list(plant.at("num"), "scenario.plant.num");
    s.plant_den = number_list(plant.at("den"), "scenario.plant.den");
  } else {
    if (!plant.contains("a") || !plant.contains("b") || !plant.contains("c")) {
      throw SchemaViolation("scenario.plant: a, b and c are all required");
    }
    s.plant_a = matrix_from(plant.at("a"), "scenario.plant.a");
    s.plant_b = matrix_from(plant.at("b"), "scenario.plant.b");
    s.plant_c = matrix_from(plant.at("c"), "scenario.plant.c");
  }

  if (root.contains("controller")) {
    const json& ctrl = root.at("controller");
    require_keys(ctrl, {"num", "den"}, "scenario.controller");
    if (!ctrl.contains("num") || !ctrl.contains("den")) {
      throw SchemaViolation(
          "scenario.controller: num and den are both required");
    }
    s.controller_num = number_list(ctrl.at("num"), "scenario.controller.num");
    s.controller_den = number_list(ctrl.at("den"), "scenario.controller.den");
  }

  if (!root.contains("element")) {
    throw SchemaViolation("scenario.element: required");
  }
  const json& el = root.at("element");
  require_keys(el, {"kind", "gain", "pole", "alpha", "resets"},
               "scenario.element");
  if (!el.contains("kind") || !el.at("kind").is_string()) {
    throw SchemaViolation("scenario.element.kind: required string");
  }
  s.element.kind = element_kind_from_string(el.at("kind").get<std::string>());
  if (s.element.kind == ElementKind::II) {
    throw SchemaViolation(
        "scenario.element.kind: use CI, FORE, FCI or FI in scenarios");
  }
  if (el.contains("gain")) {
    s.element.gain = number_at(el, "gain", "scenario.element");
  }
  if (el.contains("pole")) {
    s.element.pole = number_at(el, "pole", "scenario.element");
  }
  if (el.contains("alpha")) {
    s.element.alpha = number_at(el, "alpha", "scenario.element");
  }
  if (!(s.element.alpha > 0.0 && s.element.alpha <= 1.0)) {
    throw SchemaViolation("scenario.element.alpha: must lie in (0, 1]");
  }
  if (el.contains("resets")) {
    if (!el.at("resets").is_boolean()) {
      throw SchemaViolation("scenario.element.resets: expected a boolean");
    }
    s.element_resets = el.at("resets").get<bool>();
  }

  if (root.contains("simulation")) {
    const json& sim = root.at("simulation");
    require_keys(sim,
                 {"step", "horizon", "reference", "memory_mode",
                  "detection_tol", "max_memory"},
                 "scenario.simulation");
    if (sim.contains("step")) {
      s.sim.h = number_at(sim, "step", "scenario.simulation");
    }
    if (sim.contains("horizon")) {
      s.sim.horizon = number_at(sim, "horizon", "scenario.simulation");
    }
    if (sim.contains("reference")) {
      const json& ref = sim.at("reference");
      require_keys(ref, {"amplitude", "omega"},
                   "scenario.simulation.reference");
      if (ref.contains("amplitude")) {
        s.sim.reference.amplitude =
            number_at(ref, "amplitude", "scenario.simulation.reference");
      }
      if (ref.contains("omega")) {
        s.sim.reference.omega =
            number_at(ref, "omega", "scenario.simulation.reference");
      }
    }
    if (sim.contains("memory_mode")) {
      const auto mode = sim.at("memory_mode");
      if (mode == "clear") {
        s.sim.memory_mode = MemoryMode::ClearMemory;
      } else if (mode == "keep") {
        s.sim.memory_mode = MemoryMode::KeepMemory;
      } else {
        throw SchemaViolation(
            "scenario.simulation.memory_mode: expected \"clear\" or \"keep\"");
      }
    }
    if (sim.contains("detection_tol")) {
      s.sim.detection_tol =
          number_at(sim, "detection_tol", "scenario.simulation");
    }
    if (sim.contains("max_memory")) {
      const double raw = number_at(sim, "max_memory", "scenario.simulation");
      if (raw < 0.0 || raw != std::floor(raw)) {
        throw SchemaViolation(
            "scenario.simulation.max_memory: expected a nonnegative integer");
      }
      s.sim.max_memory = static_cast<std::size_t>(raw);
    }
  }

  if (!root.contains("analyses") || !root.at("analyses").is_array() ||
      root.at("analyses").empty()) {
    throw SchemaViolation("scenario.analyses: required nonempty array");
  }
  for (const auto& a : root.at("analyses")) {
    if (!a.is_string() ||
        std::find(kAnalyses.begin(), kAnalyses.end(),
                  a.get<std::string>()) == kAnalyses.end()) {
      throw SchemaViolation(
          "scenario.analyses: entries must be one of simulate, metrics, df, "
          "stability");
    }
    const auto name = a.get<std::string>();
    if (std::find(s.analyses.begin(), s.analyses.end(), name) !=
        s.analyses.end()) {
      throw SchemaViolation("scenario.analyses: duplicate entry '" + name +
                            "'");
    }
    s.analyses.push_back(name);
  }
  if (wants(s, "metrics") && s.sim.reference.omega != 0.0) {
    throw SchemaViolation(
        "scenario.analyses: metrics requires a constant reference");
  }

  if (root.contains("stability")) {
    const json& st = root.at("stability");
    require_keys(st, {"beta_range", "phase_beta"}, "scenario.stability");
    if (st.contains("beta_range")) {
      const auto range = number_list(st.at("beta_range"),
                                     "scenario.stability.beta_range");
      if (range.size() != 2 || !(range[0] < range[1])) {
        throw SchemaViolation(
            "scenario.stability.beta_range: expected [lo, hi] with lo < hi");
      }
      s.beta_lo = range[0];
      s.beta_hi = range[1];
    }
    if (st.contains("phase_beta")) {
      s.phase_beta = number_at(st, "phase_beta", "scenario.stability");
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw Error("IOError", "cannot open " + path + " for reading");
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["name"] = s.name;
  json plant;
  if (s.plant_a) {
    plant["a"] = matrix_to_json(*s.plant_a);
    plant["b"] = matrix_to_json(*s.plant_b);
    plant["c"] = matrix_to_json(*s.plant_c);
  } else {
    plant["num"] = s.plant_num;
    plant["den"] = s.plant_den;
  }
  root["plant"] = plant;
  if (s.controller_num) {
    root["controller"] = {{"num", *s.controller_num},
                          {"den", *s.controller_den}};
  }
  root["element"] = {{"kind", to_string(s.element.kind)},
                     {"gain", s.element.gain},
                     {"pole", s.element.pole},
                     {"alpha", s.element.alpha},
                     {"resets", s.element_resets}};
  root["simulation"] = {
      {"step", s.sim.h},
      {"horizon", s.sim.horizon},
      {"reference",
       {{"amplitude", s.sim.reference.amplitude},
        {"omega", s.sim.reference.omega}}},
      {"memory_mode",
       s.sim.memory_mode == MemoryMode::ClearMemory ? "clear" : "keep"},
      {"detection_tol", s.sim.detection_tol},
      {"max_memory", s.sim.max_memory}};
  root["analyses"] = s.analyses;
  json st;
  st["beta_range"] = {s.beta_lo, s.beta_hi};
  if (s.phase_beta) st["phase_beta"] = *s.phase_beta;
  root["stability"] = st;
  return root.dump(2) + "\n";
}

ClosedLoopResetSystem build_system(const Scenario& s) {
  StateSpaceModel plant =
      s.plant_a ? make_state_space(*s.plant_a, *s.plant_b, *s.plant_c, 1.0)
                : tf_to_state_space(s.plant_num, s.plant_den);

  std::optional<StateSpaceModel> ctrl;
  if (s.controller_num) {
    std::vector<double> den = *s.controller_den;
    while (den.size() > 1 && den.front() == 0.0) den.erase(den.begin());
    if (den.size() == 1) {
      if (den[0] == 0.0) {
        throw SchemaViolation("scenario.controller.den: must be nonzero");
      }
      // Polynomial controller: realized as output feedback by folding the
      // numerator's powers of s into the plant output row.
      std::vector<double> ascending(s.controller_num->rbegin(),
                                    s.controller_num->rend());
      for (auto& c : ascending) c /= den[0];
      plant = fold_output_polynomial(plant, ascending);
    } else {
      ctrl = tf_to_state_space(*s.controller_num, den);
    }
  }

  const double alpha = s.element.effective_alpha();
  if (alpha < 1.0) {
    plant = augment_integer_order(plant, alpha);
    if (ctrl) ctrl = augment_integer_order(*ctrl, alpha);
  }

  const double pole = s.element.kind == ElementKind::FORE ? s.element.pole : 0.0;
  StateSpaceModel element{Matrix::Constant(1, 1, -pole),
                          Matrix::Constant(1, 1, s.element.gain),
                          Matrix::Constant(1, 1, 1.0), alpha};

  const bool resets = s.element_resets && s.element.resets();
  const ResetRule rule =
      resets ? make_reset_rule(0, 1) : make_reset_rule(1, 0);
  return assemble_closed_loop(plant, ctrl, element, rule);
}

int exit_code_for(const Error& e) {
  return e.code() == "SchemaViolation" ? 2 : 3;
}

std::string error_json(const Error& e) {
  json j;
  j["error"] = e.code();
  j["message"] = e.what();
  return j.dump() + "\n";
}

RunOutcome run_scenario(const Scenario& s, const ScenarioOverrides& overrides) {
  RunOutcome out;
  try {
    Scenario sc = s;
    if (overrides.step) sc.sim.h = *overrides.step;
    if (overrides.horizon) sc.sim.horizon = *overrides.horizon;
    if (overrides.memory_mode) sc.sim.memory_mode = *overrides.memory_mode;
    const Artifacts art = analyze(sc);
    out.written_files = emit(sc, art, overrides.out_dir);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e);
    out.error_json = error_json(e);
  }
  return out;
}

RunOutcome run_scenario_file(const std::string& path,
                             const ScenarioOverrides& overrides) {
  Scenario s;
  try {
    s = load_scenario(path);
  } catch (const Error& e) {
    RunOutcome out;
    out.exit_code = exit_code_for(e);
    out.error_json = error_json(e);
    return out;
  }
  return run_scenario(s, overrides);
}

// --------------------------- bundled scenarios -----------------------------

const std::map<std::string, std::string>& bundled_scenarios() {
  static const std::map<std::string, std::string> scenarios = {
      {"example1_baseline", R"({
  "name": "example1_baseline",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "FORE", "gain": 1.0, "pole": 1.0, "resets": false},
  "simulation": {"step": 0.001, "horizon": 30.0,
                 "reference": {"amplitude": 1.0, "omega": 0.0},
                 "memory_mode": "clear"},
  "analyses": ["simulate", "metrics"]
}
)"},
      {"example1_fore", R"({
  "name": "example1_fore",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "FORE", "gain": 1.0, "pole": 1.0},
  "simulation": {"step": 0.001, "horizon": 30.0,
                 "reference": {"amplitude": 1.0, "omega": 0.0},
                 "memory_mode": "clear"},
  "analyses": ["simulate", "metrics"]
}
)"},
      {"example1_ci", R"({
  "name": "example1_ci",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "CI"},
  "simulation": {"step": 0.001, "horizon": 30.0,
                 "reference": {"amplitude": 1.0, "omega": 0.0},
                 "memory_mode": "clear"},
  "analyses": ["simulate", "metrics"]
}
)"},
      {"example1_fci", R"({
  "name": "example1_fci",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "FCI", "alpha": 0.5},
  "simulation": {"step": 0.001, "horizon": 30.0,
                 "reference": {"amplitude": 1.0, "omega": 0.0},
                 "memory_mode": "clear"},
  "analyses": ["simulate", "metrics"]
}
)"},
      {"example1_fi", R"({
  "name": "example1_fi",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "FI", "alpha": 0.5},
  "simulation": {"step": 0.001, "horizon": 30.0,
                 "reference": {"amplitude": 1.0, "omega": 0.0},
                 "memory_mode": "clear"},
  "analyses": ["simulate", "metrics"]
}
)"},
      {"example2", R"({
  "name": "example2",
  "plant": {"num": [1.0], "den": [1.0, 0.0]},
  "element": {"kind": "FCI", "alpha": 0.5},
  "analyses": ["stability"],
  "stability": {"beta_range": [-2.0, 2.0], "phase_beta": 0.3}
}
)"},
      {"example3_fore", R"({
  "name": "example3_fore",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "FORE", "gain": 1.0, "pole": 1.0},
  "analyses": ["stability"],
  "stability": {"beta_range": [-2.0, 2.0]}
}
)"},
      {"example3_ci", R"({
  "name": "example3_ci",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "CI"},
  "analyses": ["stability"],
  "stability": {"beta_range": [-2.0, 2.0]}
}
)"},
      {"example3_fci", R"({
  "name": "example3_fci",
  "plant": {"num": [1.0], "den": [1.0, 0.2, 0.0]},
  "controller": {"num": [1.0, 1.0], "den": [1.0]},
  "element": {"kind": "FCI", "alpha": 0.5},
  "analyses": ["stability"],
  "stability": {"beta_range": [-2.0, 2.0], "phase_beta": 0.5}
}
)"}};
  return scenarios;
}

// --------------------------- paper reproduction ----------------------------

namespace {

ReproRow value_row(std::string name, double computed, double expected,
                   double tolerance) {
  ReproRow row;
  row.name = std::move(name);
  row.computed = computed;
  row.expected = expected;
  row.tolerance = tolerance;
  row.pass = std::isfinite(computed) &&
             std::abs(computed - expected) <= tolerance;
  return row;
}

ReproRow bool_row(std::string name, bool holds) {
  return value_row(std::move(name), holds ? 1.0 : 0.0, 1.0, 0.0);
}

double max_deviation(const std::vector<double>& got,
                     const std::vector<double>& want) {
  if (got.size() != want.size()) return std::numeric_limits<double>::infinity();
  double dev = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    dev = std::max(dev, std::abs(got[i] - want[i]));
  }
  return dev;
}

void sim_rows(const std::map<std::string, Artifacts>& results,
              std::vector<ReproRow>& rows) {
  const auto over = [&](const std::string& name) {
    return results.at(name).metrics->overshoot * 100.0;
  };
  const double base = over("example1_baseline");
  const double fore = over("example1_fore");
  const double ci = over("example1_ci");
  const double fci = over("example1_fci");
  rows.push_back(value_row("example1 baseline overshoot [%]", base, 70.0, 5.0));
  rows.push_back(value_row("example1 FORE(b=1) overshoot [%]", fore, 40.0, 5.0));
  rows.push_back(value_row("example1 CI overshoot [%]", ci, 41.0, 5.0));
  rows.push_back(value_row("example1 FCI(0.5) overshoot [%]", fci, 19.0, 5.0));
  rows.push_back(bool_row("example1 ordering FCI < FORE < CI < baseline",
                          fci < fore && fore < ci && ci < base));
}

void df_rows(std::vector<ReproRow>& rows) {
  const Complex ci1 = df_ci(1.0);
  rows.push_back(value_row("CI DF phase at omega=1 [deg]",
                           std::arg(ci1) * 180.0 / std::numbers::pi, -38.15,
                           0.01));
  rows.push_back(value_row("CI DF gain factor vs linear integrator",
                           std::abs(ci1) / std::abs(df_ii(1.0)), 1.6190,
                           0.001));
  rows.push_back(value_row("FCI phase lead at alpha=1 [deg]",
                           phase_lead(ElementKind::FCI, 1.0), 51.85, 0.1));
  bool dominates = true;
  for (int k = 1; k <= 9; ++k) {
    const double a = 0.1 * k;
    dominates = dominates &&
                phase_lead(ElementKind::FCI, a) > phase_lead(ElementKind::FI, a);
  }
  rows.push_back(bool_row("FCI lead exceeds FI lead, alpha in {0.1..0.9}",
                          dominates));

  struct Case {
    const char* label;
    Element element;
  };
  const std::vector<Case> cases = {
      {"CI", {ElementKind::CI, 1.0, 0.0, 1.0}},
      {"FORE(b=1)", {ElementKind::FORE, 1.0, 1.0, 1.0}},
      {"FCI(0.5)", {ElementKind::FCI, 1.0, 0.0, 0.5}},
      {"FCI(0.75)", {ElementKind::FCI, 1.0, 0.0, 0.75}},
  };
  const std::vector<double> omegas = {0.1, 1.0, 10.0};

  std::vector<double> errs(cases.size() * omegas.size(), 0.0);
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (std::size_t j = 0; j < omegas.size(); ++j) {
      tasks.push_back([&, i, j] {
        const double w = omegas[j];
        const double h = 2.0 * std::numbers::pi / (2000.0 * w);
        const Complex numeric = numerical_df(cases[i].element, 1.0, w, h);
        const Complex closed = describing_function(cases[i].element, w);
        errs[i * omegas.size() + j] =
            std::abs(numeric - closed) / std::abs(closed) * 100.0;
      });
    }
  }
  run_pool(tasks);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (std::size_t j = 0; j < omegas.size(); ++j) {
      char name[96];
      std::snprintf(name, sizeof name,
                    "numerical vs closed-form DF, %s omega=%g [%%err]",
                    cases[i].label, omegas[j]);
      rows.push_back(
          value_row(name, errs[i * omegas.size() + j], 0.0, 2.0));
    }
  }
}

void stab_rows(const std::map<std::string, Artifacts>& results,
               std::vector<ReproRow>& rows) {
  const StabilityReport& ex2 = *results.at("example2").stability;
  rows.push_back(value_row(
      "example2 H_beta num0 max deviation",
      max_deviation(ex2.h_beta.num0, {1.0, 0.9, 0.45}), 0.0, 0.01));
  rows.push_back(value_row(
      "example2 H_beta num1 max deviation",
      max_deviation(ex2.h_beta.num1, {0.0, 0.29, 0.84}), 0.0, 0.01));
  rows.push_back(value_row(
      "example2 H_beta den max deviation",
      max_deviation(ex2.h_beta.den, {1.0, 1.35, 1.35, 1.0}), 0.0, 0.01));
  const double ex2_lo = ex2.betas.best ? ex2.betas.best->lo
                                       : std::numeric_limits<double>::quiet_NaN();
  const double ex2_hi = ex2.betas.best ? ex2.betas.best->hi
                                       : std::numeric_limits<double>::quiet_NaN();
  rows.push_back(value_row("example2 beta interval lo", ex2_lo, -0.53, 0.05));
  rows.push_back(value_row("example2 beta interval hi", ex2_hi, 0.79, 0.05));

  const StabilityReport& fore = *results.at("example3_fore").stability;
  const double fore_lo = fore.betas.best
                             ? fore.betas.best->lo
                             : std::numeric_limits<double>::quiet_NaN();
  const double fore_hi = fore.betas.best
                             ? fore.betas.best->hi
                             : std::numeric_limits<double>::quiet_NaN();
  rows.push_back(value_row("example3 FORE beta interval lo", fore_lo, 0.42,
                           0.05));
  rows.push_back(value_row("example3 FORE beta interval hi", fore_hi, 1.46,
                           0.05));

  const StabilityReport& ci = *results.at("example3_ci").stability;
  rows.push_back(bool_row("example3 CI: stability cannot be guaranteed",
                          ci.flow_unstable && !ci.certified &&
                              !ci.betas.best.has_value()));

  const StabilityReport& fci = *results.at("example3_fci").stability;
  const SprResult spr05 = spr_check(fci.h_beta.at(0.5));
  rows.push_back(bool_row("example3 FCI SPR at beta=0.5", spr05.is_spr));
  const double fci_hi = fci.betas.best
                            ? fci.betas.best->hi
                            : std::numeric_limits<double>::quiet_NaN();
  rows.push_back(value_row("example3 FCI beta interval hi", fci_hi, 0.62,
                           0.05));
  rows.push_back(bool_row(
      "example3 FCI |arg H(jw)| < 90 deg at beta=0.5 on grid",
      spr05.min_margin_deg > 0.0));
}

}  // namespace

ReproReport reproduce_paper(const std::string& subset,
                            const std::string& out_dir) {
  if (!(subset.empty() || subset == "sim" || subset == "df" ||
        subset == "stab")) {
    throw SchemaViolation("reproduce-paper subset must be sim, df or stab");
  }
  const bool want_sim = subset.empty() || subset == "sim";
  const bool want_df = subset.empty() || subset == "df";
  const bool want_stab = subset.empty() || subset == "stab";

  std::vector<std::string> names;
  if (want_sim) {
    names.insert(names.end(),
                 {"example1_baseline", "example1_fore", "example1_ci",
                  "example1_fci", "example1_fi"});
  }
  if (want_stab) {
    names.insert(names.end(), {"example2", "example3_fore", "example3_ci",
                               "example3_fci"});
  }

  std::map<std::string, Artifacts> results;
  for (const auto& n : names) results[n];  // materialize slots before the pool
  std::vector<std::function<void()>> tasks;
  for (const auto& n : names) {
    tasks.push_back([&results, n, &out_dir] {
      const Scenario s = parse_scenario(bundled_scenarios().at(n));
      Artifacts art = analyze(s);
      emit(s, art, out_dir);
      results.at(n) = std::move(art);
    });
  }
  run_pool(tasks);

  ReproReport report;
  if (want_sim) sim_rows(results, report.rows);
  if (want_df) df_rows(report.rows);
  if (want_stab) stab_rows(results, report.rows);
  report.all_pass = std::all_of(report.rows.begin(), report.rows.end(),
                                [](const ReproRow& r) { return r.pass; });
  return report;
}

std::string format_repro_table(const ReproReport& report) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%-58s %12s %12s %8s  %s\n", "check",
                "computed", "expected", "tol", "status");
  out += line;
  out += std::string(100, '-') + "\n";
  std::size_t passed = 0;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%-58s %12.4f %12.4f %8.4f  %s\n",
                  r.name.c_str(), r.computed, r.expected, r.tolerance,
                  r.pass ? "pass" : "FAIL");
    out += line;
    if (r.pass) ++passed;
  }
  out += std::string(100, '-') + "\n";
  std::snprintf(line, sizeof line, "%zu/%zu checks within tolerance\n", passed,
                report.rows.size());
  out += line;
  return out;
}

}  // namespace fracreset
