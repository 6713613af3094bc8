#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracreset/scenario.hpp"

namespace {

using namespace fracreset;

int finish(const RunOutcome& outcome) {
  if (outcome.exit_code != 0) {
    std::fputs(outcome.error_json.c_str(), stderr);
    return outcome.exit_code;
  }
  for (const auto& f : outcome.written_files) {
    std::printf("wrote %s\n", f.c_str());
  }
  return 0;
}

std::vector<double> parse_csv_numbers(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  try {
    while (pos <= text.size()) {
      const std::size_t comma = text.find(',', pos);
      const std::string tok =
          text.substr(pos, comma == std::string::npos ? comma : comma - pos);
      out.push_back(std::stod(tok));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } catch (const std::exception&) {
    throw SchemaViolation("expected a comma-separated list of numbers, got '" +
                          text + "'");
  }
  return out;
}

int run_simulate(const std::string& file, const ScenarioOverrides& overrides) {
  Scenario s = load_scenario(file);
  s.analyses = {"simulate"};
  if (s.sim.reference.omega == 0.0) {
    s.analyses.push_back("metrics");
  }
  const RunOutcome outcome = run_scenario(s, overrides);
  const int code = finish(outcome);
  if (code == 0) {
    namespace fs = std::filesystem;
    const auto metrics_path =
        (fs::path(overrides.out_dir) / (s.name + "_metrics.json")).string();
    if (fs::exists(metrics_path)) {
      std::printf("metrics: %s\n", metrics_path.c_str());
    }
  }
  return code;
}

int run_stability(const std::string& file,
                  const std::optional<std::pair<double, double>>& beta_range,
                  const ScenarioOverrides& overrides) {
  Scenario s = load_scenario(file);
  s.analyses = {"stability"};
  if (beta_range) {
    s.beta_lo = beta_range->first;
    s.beta_hi = beta_range->second;
  }
  const RunOutcome outcome = run_scenario(s, overrides);
  const int code = finish(outcome);
  if (code == 0) {
    const ClosedLoopResetSystem sys = build_system(s);
    const StabilityReport report =
        stability_report(sys, 1.0, s.beta_lo, s.beta_hi);
    std::printf("%s\n", report.verdict.c_str());
    if (report.betas.best) {
      std::printf("beta interval: [%.4f, %.4f]\n", report.betas.best->lo,
                  report.betas.best->hi);
    }
  }
  return code;
}

int run_df(const std::string& kind_str, double alpha, double gain, double pole,
           const std::vector<double>& range, const std::string& out_dir) {
  Element e;
  e.kind = element_kind_from_string(kind_str);
  e.gain = gain;
  e.pole = pole;
  e.alpha = alpha;

  if (range.size() < 2 || range.size() > 3 || range[0] <= 0.0 ||
      range[0] >= range[1]) {
    throw SchemaViolation("--omega-range expects lo,hi[,count] with 0<lo<hi");
  }
  const int count = range.size() == 3 ? static_cast<int>(range[2]) : 200;
  if (count < 2 || count > 100000) {
    throw SchemaViolation("--omega-range count must lie in [2, 100000]");
  }

  std::vector<DescribingFunctionPoint> points;
  points.reserve(static_cast<std::size_t>(count));
  const double lg_lo = std::log10(range[0]);
  const double lg_hi = std::log10(range[1]);
  for (int i = 0; i < count; ++i) {
    const double w =
        std::pow(10.0, lg_lo + (lg_hi - lg_lo) * i / (count - 1));
    points.push_back(
        {e.kind, e.effective_alpha(), w, describing_function(e, w)});
  }
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const auto path =
      (fs::path(out_dir) / ("df_" + to_string(e.kind) + ".csv")).string();
  write_df_csv(points, path);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracreset: fractional-order reset control toolkit"};
  app.require_subcommand(1);

  std::string file;
  std::string out_dir = ".";
  double step = 0.0, horizon = 0.0;
  std::string memory_mode;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--step", step, "integration step override [s]");
    cmd->add_option("--horizon", horizon, "time horizon override [s]");
    cmd->add_option("--memory-mode", memory_mode,
                    "reset memory handling: clear or keep")
        ->check(CLI::IsMember({"clear", "keep"}));
    cmd->add_option("--out-dir", out_dir, "output directory");
  };

  auto* sim = app.add_subcommand(
      "simulate", "run a scenario's closed-loop simulation and metrics");
  sim->add_option("file", file, "scenario file")->required();
  add_overrides(sim);

  std::string kind;
  double alpha = 1.0, gain = 1.0, pole = 1.0;
  std::string omega_range = "0.01,100";
  auto* df = app.add_subcommand(
      "df", "tabulate a reset element's describing function");
  df->add_option("kind", kind, "element kind: CI, FORE, FCI, FI or II")
      ->required();
  df->add_option("--alpha", alpha, "fractional order (FCI/FI)");
  df->add_option("--gain", gain, "element gain K");
  df->add_option("--pole", pole, "FORE pole b");
  df->add_option("--omega-range", omega_range,
                 "log-spaced sweep lo,hi[,count]");
  df->add_option("--out-dir", out_dir, "output directory");

  std::string beta_range;
  auto* stab = app.add_subcommand(
      "stability", "certify a scenario's closed loop via the H_beta test");
  stab->add_option("file", file, "scenario file")->required();
  stab->add_option("--beta-range", beta_range, "search range lo,hi");
  add_overrides(stab);

  std::string subset;
  auto* repro = app.add_subcommand(
      "reproduce-paper", "run the bundled regression scenarios and checks");
  repro->add_option("--subset", subset, "restrict to sim, df or stab")
      ->check(CLI::IsMember({"sim", "df", "stab"}));
  repro->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    fracreset::ScenarioOverrides overrides;
    overrides.out_dir = out_dir;
    if (sim->parsed() || stab->parsed()) {
      CLI::App* active = sim->parsed() ? sim : stab;
      if (active->count("--step") > 0) overrides.step = step;
      if (active->count("--horizon") > 0) overrides.horizon = horizon;
      if (active->count("--memory-mode") > 0) {
        overrides.memory_mode = memory_mode == "keep"
                                    ? fracreset::MemoryMode::KeepMemory
                                    : fracreset::MemoryMode::ClearMemory;
      }
    }

    if (sim->parsed()) {
      return run_simulate(file, overrides);
    }
    if (df->parsed()) {
      return run_df(kind, alpha, gain, pole, parse_csv_numbers(omega_range),
                    out_dir);
    }
    if (stab->parsed()) {
      std::optional<std::pair<double, double>> range;
      if (!beta_range.empty()) {
        const auto vals = parse_csv_numbers(beta_range);
        if (vals.size() != 2 || !(vals[0] < vals[1])) {
          throw fracreset::SchemaViolation(
              "--beta-range expects lo,hi with lo < hi");
        }
        range = {vals[0], vals[1]};
      }
      return run_stability(file, range, overrides);
    }
    if (repro->parsed()) {
      const fracreset::ReproReport report =
          fracreset::reproduce_paper(subset, out_dir);
      std::fputs(fracreset::format_repro_table(report).c_str(), stdout);
      return report.all_pass ? 0 : 1;
    }
  } catch (const fracreset::Error& e) {
    std::fputs(fracreset::error_json(e).c_str(), stderr);
    return fracreset::exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"Internal\",\"message\":\"%s\"}\n",
                 e.what());
    return 3;
  }
  return 0;
}
