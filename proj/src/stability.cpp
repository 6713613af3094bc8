#include "fracreset/stability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "json.hpp"

namespace fracreset {

namespace {
constexpr double kPi = std::numbers::pi;

Matrix transformed_flow(const Matrix& a_cl, double alpha) {
  if (alpha == 1.0) return a_cl;
  return matrix_fractional_power_real(a_cl, alpha);
}

bool flow_is_hurwitz(const Matrix& flow) {
  const EigenDecomposition ed = eig(flow.cast<Complex>());
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    if (ed.values[i].real() >= -1e-9) return false;
  }
  return true;
}

std::vector<double> strip_leading_zeros(const std::vector<double>& c) {
  std::size_t i = 0;
  while (i + 1 < c.size() && c[i] == 0.0) ++i;
  return {c.begin() + static_cast<std::ptrdiff_t>(i), c.end()};
}

/// Re H(j omega) > 0 on the grid and at DC. Assumes a Hurwitz denominator,
/// so the jw-axis is pole free.
bool strictly_positive_on_grid(const RationalFunction& h,
                               const std::vector<double>& grid) {
  const std::vector<double> num = strip_leading_zeros(h.num);
  const std::vector<double> den = strip_leading_zeros(h.den);
  if (num.back() / den.back() <= 0.0) return false;
  for (double w : grid) {
    if (eval_rational(h, Complex(0.0, w)).real() <= 0.0) return false;
  }
  return true;
}

BetaSearchResult search_runs(const HBetaPair& pair, double range_lo,
                             double range_hi,
                             const std::vector<double>& grid) {
  const auto passes = [&](double beta) {
    return strictly_positive_on_grid(pair.at(beta), grid);
  };

  const double step = 0.01;
  const auto count =
      static_cast<std::size_t>(std::floor((range_hi - range_lo) / step + 1e-9));

  BetaSearchResult result;
  bool in_run = false;
  double run_lo = 0.0, run_hi = 0.0;
  for (std::size_t k = 0; k <= count; ++k) {
    const double beta = range_lo + step * static_cast<double>(k);
    if (passes(beta)) {
      if (!in_run) run_lo = beta;
      run_hi = beta;
      in_run = true;
    } else if (in_run) {
      result.all_runs.push_back({run_lo, run_hi});
      in_run = false;
    }
  }
  if (in_run) result.all_runs.push_back({run_lo, run_hi});
  if (result.all_runs.empty()) return result;

  BetaInterval widest = result.all_runs.front();
  for (const auto& r : result.all_runs) {
    if (r.hi - r.lo > widest.hi - widest.lo) widest = r;
  }

  // Bisect each endpoint against its adjacent failing grid point until the
  // bracket is narrower than 0.005, keeping the certified (passing) side.
  if (widest.lo - step >= range_lo - 1e-12) {
    double fail = widest.lo - step, pass = widest.lo;
    while (pass - fail >= 0.005) {
      const double mid = 0.5 * (pass + fail);
      (passes(mid) ? pass : fail) = mid;
    }
    widest.lo = pass;
  }
  if (widest.hi + step <= range_hi + 1e-12) {
    double pass = widest.hi, fail = widest.hi + step;
    while (fail - pass >= 0.005) {
      const double mid = 0.5 * (pass + fail);
      (passes(mid) ? pass : fail) = mid;
    }
    widest.hi = pass;
  }
  result.best = widest;
  return result;
}
}  // namespace

RationalFunction HBetaPair::at(double beta) const {
  RationalFunction h;
  h.num.resize(num0.size());
  for (std::size_t i = 0; i < num0.size(); ++i) {
    h.num[i] = num0[i] + beta * num1[i];
  }
  h.den = den;
  return h;
}

std::vector<double> default_omega_grid() {
  std::vector<double> grid(2000);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] =
        std::pow(10.0, -4.0 + 8.0 * static_cast<double>(i) / 1999.0);
  }
  return grid;
}

HBetaPair build_h_beta_affine(const ClosedLoopResetSystem& sys, double p_r) {
  if (sys.n_reset_element != 1) {
    throw DimensionMismatch(
        "build_h_beta_affine: certificate requires exactly one reset state");
  }
  HBetaPair pair;
  pair.flow = transformed_flow(sys.a_cl, sys.alpha);
  if (!flow_is_hurwitz(pair.flow)) {
    throw UnstableFlow("build_h_beta_affine: transformed flow is not Hurwitz");
  }

  const Eigen::Index n = sys.order();
  const Vector sel = sys.reset_output_row();
  const Vector c_row = sys.c_cl.row(0).transpose();

  // Leverrier–Faddeev resolvent expansion:
  //   (sI - M)^{-1} = sum_k B_k s^{n-1-k} / (s^n + c_1 s^{n-1} + ... + c_n).
  Matrix bk = Matrix::Identity(n, n);
  pair.den.assign(static_cast<std::size_t>(n) + 1, 0.0);
  pair.den[0] = 1.0;
  pair.num0.resize(static_cast<std::size_t>(n));
  pair.num1.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    pair.num0[static_cast<std::size_t>(k)] = p_r * sel.dot(bk * sel);
    pair.num1[static_cast<std::size_t>(k)] = c_row.dot(bk * sel);
    const Matrix mb = pair.flow * bk;
    const double ck = -mb.trace() / static_cast<double>(k + 1);
    pair.den[static_cast<std::size_t>(k) + 1] = ck;
    bk = mb + ck * Matrix::Identity(n, n);
  }
  return pair;
}

RationalFunction build_h_beta(const ClosedLoopResetSystem& sys, double beta,
                              double p_r) {
  return build_h_beta_affine(sys, p_r).at(beta);
}

SprResult spr_check(const RationalFunction& h,
                    const std::vector<double>& omega_grid) {
  const std::vector<double> num = strip_leading_zeros(h.num);
  const std::vector<double> den = strip_leading_zeros(h.den);
  const auto rel_degree = static_cast<std::ptrdiff_t>(den.size()) -
                          static_cast<std::ptrdiff_t>(num.size());
  if (rel_degree <= 0) {
    throw ImproperTransferFunction("spr_check: H must be strictly proper");
  }
  if (!is_hurwitz(den)) {
    throw NonHurwitzDenominator("spr_check: denominator is not Hurwitz");
  }

  double max_abs_phase = 0.0;
  double worst = omega_grid.empty() ? 0.0 : omega_grid.front();
  for (double w : omega_grid) {
    const double phase =
        std::abs(std::arg(eval_rational(h, Complex(0.0, w))));
    if (phase > max_abs_phase) {
      max_abs_phase = phase;
      worst = w;
    }
  }
  SprResult r;
  r.min_margin_deg = 90.0 - max_abs_phase * 180.0 / kPi;
  r.worst_omega = worst;
  const double dc = num.back() / den.back();
  r.is_spr = r.min_margin_deg > 0.0 && dc > 0.0 && rel_degree == 1;
  return r;
}

BetaSearchResult beta_interval(const ClosedLoopResetSystem& sys, double p_r,
                               double range_lo, double range_hi,
                               const std::vector<double>& omega_grid) {
  if (!(range_lo < range_hi)) {
    throw DimensionMismatch("beta_interval: empty search range");
  }
  const HBetaPair pair = build_h_beta_affine(sys, p_r);
  return search_runs(pair, range_lo, range_hi, omega_grid);
}

LyapunovResult lyapunov_check(const ClosedLoopResetSystem& sys) {
  LyapunovResult out;
  const Matrix flow = transformed_flow(sys.a_cl, sys.alpha);
  if (!flow_is_hurwitz(flow)) {
    out.note = "flow matrix is not Hurwitz";
    return out;
  }
  const Eigen::Index n = sys.order();
  const Matrix p = lyapunov_solve(flow, Matrix::Identity(n, n));
  out.p = p;

  Eigen::LLT<Matrix> llt(p);
  const bool positive_definite = llt.info() == Eigen::Success;

  const Matrix jump = sys.a_r.transpose() * p * sys.a_r - p;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (jump + jump.transpose()));
  const double max_jump_eig = es.eigenvalues().maxCoeff();

  out.verdict = positive_definite && max_jump_eig <= 1e-9;
  if (!out.verdict) out.note = "inconclusive (Q = I probe)";
  return out;
}

StabilityReport stability_report(const ClosedLoopResetSystem& sys, double p_r,
                                 double range_lo, double range_hi) {
  StabilityReport rep;
  try {
    rep.h_beta = build_h_beta_affine(sys, p_r);
  } catch (const UnstableFlow&) {
    rep.flow_unstable = true;
    rep.certified = false;
    rep.verdict =
        "stability cannot be guaranteed: the transformed flow matrix is not "
        "Hurwitz";
    rep.lyapunov = lyapunov_check(sys);
    return rep;
  }

  const std::vector<double> grid = default_omega_grid();
  rep.betas = search_runs(rep.h_beta, range_lo, range_hi, grid);
  rep.certified = rep.betas.best.has_value();
  if (rep.certified) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "stable: H_beta is strictly positive real for beta in "
                  "[%.4g, %.4g]",
                  rep.betas.best->lo, rep.betas.best->hi);
    rep.verdict = buf;
  } else {
    rep.verdict =
        "not certified: no strictly positive real H_beta in the searched "
        "range";
  }

  for (int i = 0; i <= 10; ++i) {
    const double beta =
        range_lo + (range_hi - range_lo) * static_cast<double>(i) / 10.0;
    rep.per_beta.emplace_back(beta, spr_check(rep.h_beta.at(beta), grid));
  }
  rep.lyapunov = lyapunov_check(sys);
  return rep;
}

std::string stability_report_json(const StabilityReport& report) {
  nlohmann::json j;
  if (report.flow_unstable) {
    j["h_beta"] = nullptr;
  } else {
    j["h_beta"] = {{"num0", report.h_beta.num0},
                   {"num1", report.h_beta.num1},
                   {"den", report.h_beta.den}};
  }
  if (report.betas.best) {
    j["beta_interval"] = {report.betas.best->lo, report.betas.best->hi};
  } else {
    j["beta_interval"] = nullptr;
  }
  auto runs = nlohmann::json::array();
  for (const auto& r : report.betas.all_runs) {
    runs.push_back({r.lo, r.hi});
  }
  j["beta_runs"] = runs;
  auto per_beta = nlohmann::json::array();
  for (const auto& [beta, spr] : report.per_beta) {
    per_beta.push_back({{"beta", beta},
                        {"margin_deg", spr.min_margin_deg},
                        {"spr", spr.is_spr},
                        {"worst_omega", spr.worst_omega}});
  }
  j["per_beta"] = per_beta;
  nlohmann::json lyap;
  lyap["verdict"] = report.lyapunov.verdict;
  if (report.lyapunov.p) {
    auto rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < report.lyapunov.p->rows(); ++r) {
      auto row = nlohmann::json::array();
      for (Eigen::Index c = 0; c < report.lyapunov.p->cols(); ++c) {
        row.push_back((*report.lyapunov.p)(r, c));
      }
      rows.push_back(row);
    }
    lyap["P"] = rows;
  } else {
    lyap["P"] = nullptr;
  }
  lyap["note"] = report.lyapunov.note;
  j["lyapunov"] = lyap;
  j["verdict"] = report.verdict;
  j["certified"] = report.certified;
  j["flow_unstable"] = report.flow_unstable;
  return j.dump(2) + "\n";
}

std::string phase_csv_string(const RationalFunction& h,
                             const std::vector<double>& omega_grid) {
  std::string body = "omega,re,im,phase_deg\n";
  char buf[160];
  for (double w : omega_grid) {
    const Complex v = eval_rational(h, Complex(0.0, w));
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n", w, v.real(),
                  v.imag(), std::arg(v) * 180.0 / kPi);
    body += buf;
  }
  return body;
}

}  // namespace fracreset
