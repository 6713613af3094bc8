#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracreset/models.hpp"
#include "fracreset/numcore.hpp"

namespace fracreset {

/// The certificate transfer function with its beta-affine numerator:
///   H_beta(s) = (num0(s) + beta * num1(s)) / den(s),
/// where den is the characteristic polynomial of the transformed flow matrix
/// and the coefficients come from a Leverrier–Faddeev resolvent expansion.
struct HBetaPair {
  std::vector<double> num0;  // descending, degree n-1
  std::vector<double> num1;  // descending, degree n-1
  std::vector<double> den;   // descending, degree n (monic)
  Matrix flow;               // the transformed matrix the resolvent is taken of

  RationalFunction at(double beta) const;
};

/// Default 2000-point logarithmic grid over [1e-4, 1e4] rad/s.
std::vector<double> default_omega_grid();

/// Builds the beta-affine certificate for a closed loop with exactly one
/// reset state: output row beta * C_cl + p_r * (reset selector), input column
/// the reset selector. The flow matrix is matrix_fractional_power(A_cl,
/// alpha) (equal to A_cl when alpha == 1) and must be Hurwitz.
/// Throws UnstableFlow, DimensionMismatch (n_reset != 1), BranchCutViolation.
HBetaPair build_h_beta_affine(const ClosedLoopResetSystem& sys,
                              double p_r = 1.0);

/// Single-beta convenience wrapper returning num0 + beta*num1 over den.
RationalFunction build_h_beta(const ClosedLoopResetSystem& sys, double beta,
                              double p_r = 1.0);

struct SprResult {
  bool is_spr = false;
  double min_margin_deg = 0.0;  // 90 - max |arg H(j omega)| over the grid
  double worst_omega = 0.0;
};

/// Strict-positive-realness scan: |arg H(j omega)| < 90 degrees on the grid,
/// positive DC gain, and relative degree <= 1 (the analytic high-frequency
/// limit). The denominator must be Hurwitz and H strictly proper.
/// Throws NonHurwitzDenominator, ImproperTransferFunction.
SprResult spr_check(const RationalFunction& h,
                    const std::vector<double>& omega_grid = default_omega_grid());

/// A contiguous run of certified beta values.
struct BetaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct BetaSearchResult {
  std::optional<BetaInterval> best;       // widest passing run, refined
  std::vector<BetaInterval> all_runs;     // every passing run at grid level
};

/// Scans beta over [range_lo, range_hi] in steps of 0.01, testing
/// Re H(j omega) > 0 on the frequency grid (plus the DC limit); endpoints of
/// the widest contiguous run are bisection-refined to 0.005.
/// Throws whatever build_h_beta_affine throws.
BetaSearchResult beta_interval(const ClosedLoopResetSystem& sys, double p_r,
                               double range_lo, double range_hi,
                               const std::vector<double>& omega_grid =
                                   default_omega_grid());

struct LyapunovResult {
  bool verdict = false;
  std::optional<Matrix> p;   // witness when the solve was performed
  std::string note;          // e.g. inconclusive marker for the Q = I probe
};

/// Sufficiency probe with fixed Q = I: solves flow^T P + P flow = -I, then
/// requires P positive definite and max eig(A_R^T P A_R - P) <= 1e-9. A false
/// verdict is inconclusive (this is not an LMI feasibility search).
LyapunovResult lyapunov_check(const ClosedLoopResetSystem& sys);

struct StabilityReport {
  HBetaPair h_beta;
  BetaSearchResult betas;
  bool certified = false;
  std::string verdict;                         // human-readable outcome
  std::vector<std::pair<double, SprResult>> per_beta;  // sampled margins
  LyapunovResult lyapunov;
  bool flow_unstable = false;
};

/// Aggregates the full pipeline; an unstable flow is reported as
/// "stability cannot be guaranteed" instead of propagating UnstableFlow.
StabilityReport stability_report(const ClosedLoopResetSystem& sys, double p_r,
                                 double range_lo, double range_hi);

/// JSON export: {h_beta: {num0, num1, den}, beta_interval, per_beta,
/// lyapunov: {verdict, P, note}, verdict}.
std::string stability_report_json(const StabilityReport& report);

/// Phase-vs-omega table of H_beta at a fixed beta, CSV columns
/// omega,re,im,phase_deg (plot-ready).
std::string phase_csv_string(const RationalFunction& h,
                             const std::vector<double>& omega_grid =
                                 default_omega_grid());

}  // namespace fracreset
