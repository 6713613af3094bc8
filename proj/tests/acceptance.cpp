// Acceptance gate: one line per criterion, exit code = number of failures.
// Criteria marked FAIL below are genuine reference-value mismatches that are
// reproduced faithfully rather than tuned away; see the README's discussion
// of the regression table.
//
// usage: acceptance <path-to-cli-binary> <path-to-scenario-dir>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracreset/describing.hpp"
#include "fracreset/fode.hpp"
#include "fracreset/models.hpp"
#include "fracreset/scenario.hpp"
#include "fracreset/simreset.hpp"
#include "fracreset/stability.hpp"

using namespace fracreset;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  bool pass;
  std::string detail;
};

class Gate {
 public:
  void record(int id, const Check& c) {
    std::printf("CRITERION %d: %s — %s\n", id, c.pass ? "PASS" : "FAIL",
                c.detail.c_str());
    std::fflush(stdout);
    if (!c.pass) ++failures_;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Check criterion1_closed_form_anchor() {
  const Complex n = df_ci(1.0);
  const Complex expect(4.0 / kPi, -1.0);
  const double phase = std::arg(n) * 180.0 / kPi;
  const double factor = std::abs(n) / std::abs(df_ii(1.0));
  const bool pass = std::abs(n - expect) < 1e-12 &&
                    std::abs(phase - (-38.15)) <= 0.01 &&
                    std::abs(factor - 1.6190) <= 0.001;
  return {pass, fmt("N_CI(1) = %.12f%+.12fj, phase %.4f deg, gain factor %.6f",
                    n.real(), n.imag(), phase, factor)};
}

Check criterion2_reduction_identities() {
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double omega = std::pow(10.0, -2.0 + 4.0 * double(k) / 99.0);
    const Complex ci = df_ci(omega);
    worst = std::max(worst, std::abs(df_fore(1.0, 0.0, omega) - ci));
    worst = std::max(worst, std::abs(df_fci(1.0, omega) - ci));
  }
  return {worst < 1e-12,
          fmt("FORE(1,0,w) and FCI(1,w) vs CI(w) at 100 frequencies, max "
              "abs deviation %.3e",
              worst)};
}

Check criterion3_numerical_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const Element elements[] = {
      Element{ElementKind::CI},
      Element{ElementKind::FORE, 1.0, 1.0},
      Element{ElementKind::FCI, 1.0, 0.0, 0.5},
      Element{ElementKind::FCI, 1.0, 0.0, 0.75},
  };
  double worst = 0.0;
  for (const Element& e : elements) {
    for (double omega : {0.1, 1.0, 10.0}) {
      const double h = 2.0 * kPi / (2000.0 * omega);
      const Complex got = numerical_df(e, 1.0, omega, h);
      const Complex want = describing_function(e, omega);
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
  }
  const double dt = seconds_since(t0);
  return {worst < 0.02 && dt < 60.0,
          fmt("12 first-harmonic estimates vs closed forms, worst relative "
              "error %.4f%% (%.1f s)",
              100.0 * worst, dt)};
}

Check criterion4_phase_lead() {
  const double lead1 = phase_lead(ElementKind::FCI, 1.0);
  bool dominance = true;
  for (int k = 1; k <= 9; ++k) {
    const double alpha = 0.1 * k;
    if (phase_lead(ElementKind::FCI, alpha) <=
        phase_lead(ElementKind::FI, alpha)) {
      dominance = false;
    }
  }
  const double lead_half = phase_lead(ElementKind::FCI, 0.5);
  // The textual claim of a 60-degree lead at order 0.5 does NOT follow from
  // the half-order closed form, which evaluates to about 66.3 degrees; the
  // implementation reports the closed-form value.
  const bool pass = std::abs(lead1 - 51.85) <= 0.1 && dominance &&
                    std::abs(lead_half - 66.2552652972) <= 0.1 &&
                    std::abs(lead_half - 60.0) > 5.0;
  return {pass,
          fmt("lead(1) = %.4f deg, lead(0.5) = %.4f deg (60-deg text claim "
              "not reproducible), dominance over the linear element %s",
              lead1, lead_half, dominance ? "holds" : "violated")};
}

Check criterion5_step_overshoots(const fs::path& scenario_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  struct Row {
    const char* scenario;
    double expect;  // percent
    double got = 0.0;
  };
  Row rows[] = {
      {"example1_baseline", 70.0},
      {"example1_fore", 40.0},
      {"example1_ci", 41.0},
      {"example1_fci", 19.0},
  };
  bool pass = true;
  std::string note;
  for (Row& r : rows) {
    Scenario s =
        load_scenario((scenario_dir / (std::string(r.scenario) + ".scenario"))
                          .string());
    Trajectory traj = simulate(build_system(s), s.sim);
    r.got = 100.0 * step_metrics(traj, s.sim.reference.amplitude).overshoot;
    const bool ok = std::abs(r.got - r.expect) <= 5.0;
    pass = pass && ok;
    note += fmt("%s%.2f%% vs %.0f%%%s", note.empty() ? "" : ", ", r.got,
                r.expect, ok ? "" : " (out of band)");
  }
  const bool ordered = rows[3].got < rows[1].got && rows[1].got < rows[2].got &&
                       rows[2].got < rows[0].got;
  pass = pass && ordered;
  const double dt = seconds_since(t0);
  pass = pass && dt < 30.0;
  return {pass, note + fmt("; ordering %s (%.1f s)",
                           ordered ? "holds" : "violated", dt)};
}

Check criterion6_certificate(const fs::path& scenario_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario s = load_scenario((scenario_dir / "example2.scenario").string());
  ClosedLoopResetSystem sys = build_system(s);
  HBetaPair pair = build_h_beta_affine(sys);

  const std::vector<double> num0_ref = {1.0, 0.9, 0.45};
  const std::vector<double> num1_ref = {0.0, 0.29, 0.84};
  const std::vector<double> den_ref = {1.0, 1.35, 1.35, 1.0};
  double coeff_dev = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    coeff_dev = std::max(coeff_dev, std::abs(pair.num0[i] - num0_ref[i]));
    coeff_dev = std::max(coeff_dev, std::abs(pair.num1[i] - num1_ref[i]));
  }
  for (std::size_t i = 0; i < 4; ++i) {
    coeff_dev = std::max(coeff_dev, std::abs(pair.den[i] - den_ref[i]));
  }

  BetaSearchResult beta = beta_interval(sys, 1.0, s.beta_lo, s.beta_hi);
  const bool has = beta.best.has_value();
  const double lo = has ? beta.best->lo : 0.0;
  const double hi = has ? beta.best->hi : 0.0;
  const double dt = seconds_since(t0);
  const bool pass = coeff_dev <= 0.01 && has &&
                    std::abs(lo - (-0.53)) <= 0.05 &&
                    std::abs(hi - 0.79) <= 0.05 && dt < 5.0;
  return {pass,
          fmt("coefficients within %.4f of the reference, beta interval "
              "[%.4f, %.4f] vs [-0.53, 0.79] (%.1f s)",
              coeff_dev, lo, hi, dt)};
}

Check criterion7_interval_family(const fs::path& scenario_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  auto report_for = [&](const char* name) {
    Scenario s =
        load_scenario((scenario_dir / (std::string(name) + ".scenario"))
                          .string());
    ClosedLoopResetSystem sys = build_system(s);
    return stability_report(sys, 1.0, s.beta_lo, s.beta_hi);
  };

  StabilityReport fore = report_for("example3_fore");
  const bool fore_has = fore.betas.best.has_value();
  const double fore_lo = fore_has ? fore.betas.best->lo : 0.0;
  const double fore_hi = fore_has ? fore.betas.best->hi : 0.0;
  // reference endpoints (0.42, 1.46]: the derived certificate disagrees
  const bool fore_ok = fore_has && std::abs(fore_lo - 0.42) <= 0.05 &&
                       std::abs(fore_hi - 1.46) <= 0.05;

  StabilityReport ci = report_for("example3_ci");
  const bool ci_ok = ci.flow_unstable && !ci.certified &&
                     !ci.betas.best.has_value() &&
                     ci.verdict.rfind("stability cannot be guaranteed", 0) == 0;

  StabilityReport fci = report_for("example3_fci");
  bool fci_ok = fci.betas.best.has_value();
  double fci_hi = 0.0, margin05 = 0.0;
  if (fci_ok) {
    fci_hi = fci.betas.best->hi;
    Scenario s = load_scenario((scenario_dir / "example3_fci.scenario").string());
    SprResult spr = spr_check(build_h_beta_affine(build_system(s)).at(0.5));
    margin05 = spr.min_margin_deg;
    fci_ok = fci.betas.best->lo <= 0.5 && 0.5 <= fci_hi &&
             std::abs(fci_hi - 0.62) <= 0.05 && spr.is_spr && margin05 > 0.0;
  }

  const double dt = seconds_since(t0);
  const bool pass = fore_ok && ci_ok && fci_ok && dt < 10.0;
  return {pass,
          fmt("first-order element [%.4f, %.4f] vs (0.42, 1.46] %s; plain "
              "reset integrator uncertifiable %s; half-order upper end %.4f "
              "vs 0.62 with %.4f deg margin at beta = 0.5 %s (%.1f s)",
              fore_lo, fore_hi, fore_ok ? "ok" : "(out of band)",
              ci_ok ? "ok" : "VIOLATED", fci_hi, margin05,
              fci_ok ? "ok" : "(out of band)", dt)};
}

Check criterion8_property_suites() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string fail;

  // GL weights against the gamma-function oracle
  for (double alpha : {0.25, 0.5, 0.75}) {
    GLWeights w = gl_weights(alpha, 100);
    for (std::size_t i = 1; i <= 100; ++i) {
      const double oracle =
          -alpha * std::exp(std::lgamma(double(i) - alpha) -
                            std::lgamma(1.0 - alpha) -
                            std::lgamma(double(i) + 1.0));
      if (std::abs(w.w[i] - oracle) >= 1e-12) fail += "weights ";
    }
  }

  // order-one stepping is exactly forward Euler
  {
    Matrix a(2, 2);
    a << 0, 1, -2, -0.5;
    StateSpaceModel model{a, (Matrix(2, 1) << 0, 1).finished(),
                          Matrix::Identity(1, 2), 1.0};
    auto weights = std::make_shared<const GLWeights>(gl_weights(1.0, 300));
    GLState state(weights, 0.01, Vector::Zero(2));
    Vector euler = Vector::Zero(2);
    for (int k = 0; k < 200; ++k) {
      const double u = std::sin(0.1 * k);
      Vector got = gl_step(model, state, u);
      euler = euler + 0.01 * (a * euler + model.b.col(0) * u);
      if (got != euler) {
        fail += "euler ";
        break;
      }
    }
  }

  // half-order step response lands on 2/sqrt(pi)
  {
    StateSpaceModel model{Matrix::Zero(1, 1), Matrix::Ones(1, 1),
                          Matrix::Ones(1, 1), 0.5};
    const double h = 1e-4;
    const std::size_t n = 10000;
    auto weights = std::make_shared<const GLWeights>(gl_weights(0.5, n + 1));
    GLState state(weights, h, Vector::Zero(1));
    Vector x = Vector::Zero(1);
    for (std::size_t k = 0; k < n; ++k) x = gl_step(model, state, 1.0);
    if (std::abs(x[0] - 2.0 / std::sqrt(kPi)) >= 1e-2) fail += "halfstep ";
  }

  // spectrum mapping of the fractional power
  {
    Matrix a = Matrix::Zero(5, 5);
    a(0, 2) = 1;
    a(1, 3) = 1;
    a(2, 1) = 1;
    a(3, 1) = -0.2;
    a(3, 4) = 1;
    a(4, 0) = -1;
    a(4, 1) = -1;
    auto src = eig(a.cast<Complex>());
    auto img = eig(matrix_fractional_power(a.cast<Complex>(), 0.5));
    for (Eigen::Index i = 0; i < src.values.size(); ++i) {
      const Complex mapped =
          -std::exp(std::log(-src.values[i]) / 1.5);
      double best = 1e300;
      for (Eigen::Index j = 0; j < img.values.size(); ++j) {
        best = std::min(best, std::abs(img.values[j] - mapped));
      }
      if (best >= 1e-9) fail += "spectrum ";
    }
  }

  // Lyapunov residual
  {
    Matrix a(3, 3);
    a << 0, 1, 0, 0, -0.2, 1, -1, -1, -1;
    Matrix p = lyapunov_solve(a, Matrix::Identity(3, 3));
    Matrix res = a.transpose() * p + p * a + Matrix::Identity(3, 3);
    if (res.cwiseAbs().maxCoeff() >= 1e-9) fail += "lyapunov ";
  }

  // augmentation preserves the frequency response
  {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 10 && fail.empty(); ++trial) {
      const Eigen::Index n = 1 + trial % 3;
      Matrix m(n, n), b(n, 1), c(1, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        b(i, 0) = dist(rng);
        c(0, i) = dist(rng);
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = dist(rng);
      }
      Matrix a = m - (m.cwiseAbs().sum() + 1.0) * Matrix::Identity(n, n);
      StateSpaceModel sys{a, b, c, 1.0};
      StateSpaceModel aug = augment_integer_order(sys, 0.5);
      for (int k = 0; k < 20; ++k) {
        const double omega = std::pow(10.0, -2.0 + 4.0 * k / 19.0);
        const Complex s(0.0, omega);
        auto resolve = [](const StateSpaceModel& ss, Complex lam) {
          const Eigen::Index nn = ss.order();
          return (ss.c.cast<Complex>() *
                  (lam * ComplexMatrix::Identity(nn, nn) -
                   ss.a.cast<Complex>())
                      .fullPivLu()
                      .solve(ss.b.cast<Complex>()))(0, 0);
        };
        if (std::abs(resolve(sys, s) - resolve(aug, std::sqrt(s))) >= 1e-8) {
          fail += "augment ";
          break;
        }
      }
    }
  }

  const double dt = seconds_since(t0);
  const bool pass = fail.empty() && dt < 60.0;
  return {pass, pass ? fmt("weights/euler/half-order step/spectrum/"
                           "lyapunov/augmentation suites all hold (%.1f s)",
                           dt)
                     : "failing suites: " + fail};
}

Check criterion9_unattended_reproduction(const std::string& cli,
                                         const fs::path& scenario_dir) {
  const auto t0 = std::chrono::steady_clock::now();

  // shipped scenario files are byte-identical to the bundled texts
  bool files_match = true;
  for (const auto& [name, text] : bundled_scenarios()) {
    if (slurp(scenario_dir / (name + ".scenario")) != text) {
      files_match = false;
    }
  }

  fs::path work = fs::current_path() / "acceptance_repro";
  fs::remove_all(work);
  fs::create_directories(work);
  const fs::path table = work / "table.txt";
  const int code = run_command("\"" + cli + "\" reproduce-paper --out-dir \"" +
                               work.string() + "\" > \"" + table.string() +
                               "\" 2>/dev/null");
  const std::string text = slurp(table);
  const bool has_table = text.find("checks within tolerance") != std::string::npos;
  const bool has_failures = text.find("FAIL") != std::string::npos;
  // the step-overshoot and interval mismatches recorded by criteria 5 and 7
  // must surface here as a nonzero exit, not be waved through
  const bool exit_consistent = has_failures ? code != 0 : code == 0;

  // a schema violation exits with code 2 through the same front end
  const fs::path bad = work / "bad.scenario";
  std::ofstream(bad) << R"({"name":"bad","plant":{"num":[1],"den":[1,1,0]},)"
                     << R"("element":{"kind":"FCI","alpha":1.5},)"
                     << R"("analyses":["simulate"]})";
  const int bad_code = run_command("\"" + cli + "\" simulate \"" +
                                   bad.string() + "\" --out-dir \"" +
                                   work.string() + "\" 2>/dev/null");

  // an unwritable output target exits with code 3 (serialized IO error)
  const fs::path blocker = work / "blocker";
  std::ofstream(blocker) << "occupied";
  const int io_code = run_command("\"" + cli + "\" reproduce-paper --subset "
                                  "stab --out-dir \"" +
                                  blocker.string() + "\" 2>/dev/null");

  const double dt = seconds_since(t0);
  const bool pass = files_match && has_table && exit_consistent &&
                    bad_code == 2 && io_code == 3 && dt < 180.0;
  fs::remove_all(work);
  return {pass,
          fmt("table emitted with %s, exit %d %s; schema error exit %d; io "
              "error exit %d; shipped scenarios %s bundled texts (%.1f s)",
              has_failures ? "recorded failures" : "all rows passing", code,
              exit_consistent ? "consistent" : "INCONSISTENT", bad_code,
              io_code, files_match ? "match" : "DIVERGE FROM", dt)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <cli-binary> <scenario-dir>\n");
    return 64;
  }
  const std::string cli = argv[1];
  const fs::path scenario_dir = argv[2];

  Gate gate;
  gate.record(1, criterion1_closed_form_anchor());
  gate.record(2, criterion2_reduction_identities());
  gate.record(3, criterion3_numerical_oracle());
  gate.record(4, criterion4_phase_lead());
  gate.record(5, criterion5_step_overshoots(scenario_dir));
  gate.record(6, criterion6_certificate(scenario_dir));
  gate.record(7, criterion7_interval_family(scenario_dir));
  gate.record(8, criterion8_property_suites());
  gate.record(9, criterion9_unattended_reproduction(cli, scenario_dir));

  std::printf("%d/9 criteria satisfied\n", 9 - gate.failures());
  return gate.failures();
}
