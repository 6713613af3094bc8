#pragma once

#include <string>
#include <vector>

#include "fracreset/numcore.hpp"

namespace fracreset {

enum class ElementKind { CI, FORE, FCI, FI, II };

ElementKind element_kind_from_string(const std::string& s);
std::string to_string(ElementKind kind);

/// A reset (or linear) integrator element driven directly by a scalar input:
/// base dynamics D^alpha x = -b x + K u, output y = x. CI/FORE/FCI reset on
/// zero crossings of their input; FI/II are linear.
struct Element {
  ElementKind kind = ElementKind::CI;
  double gain = 1.0;   // K
  double pole = 0.0;   // b (FORE only)
  double alpha = 1.0;  // FCI / FI order

  bool resets() const {
    return kind == ElementKind::CI || kind == ElementKind::FORE ||
           kind == ElementKind::FCI;
  }
  double effective_alpha() const {
    return (kind == ElementKind::FCI || kind == ElementKind::FI) ? alpha : 1.0;
  }
};

/// First-order reset element, closed form:
///   N(omega) = K/(b + j omega) * (1 + j 2 omega^2 (1 + e^{-b pi/omega})
///                                   / (pi (b^2 + omega^2))).
Complex df_fore(double gain, double pole, double omega);

/// Clegg integrator, closed form: N(omega) = 4/(pi omega) * (1 - j pi/4).
Complex df_ci(double omega);

/// Fractional Clegg integrator, closed form:
///   N(omega) = 4/(pi omega^alpha) * (sin(alpha pi/2) + (pi/4) e^{-j alpha pi/2}).
/// Throws InvalidOrder unless 0 < alpha <= 1.
Complex df_fci(double alpha, double omega);

/// Linear fractional integrator 1/(j omega)^alpha. Throws InvalidOrder.
Complex df_fi(double alpha, double omega);

/// Linear integer integrator 1/(j omega).
Complex df_ii(double omega);

/// Closed-form describing function for any element kind at frequency omega.
Complex describing_function(const Element& e, double omega);

/// Phase lead of the element over the linear integer integrator, in degrees:
/// FCI: 90 + arg N_FCI(alpha, 1); FI: (1 - alpha) * 90; CI: 90 + arg N_CI(1).
/// Frequency-independent. Throws InvalidOrder.
double phase_lead(ElementKind kind, double alpha);

/// First-harmonic oracle: drives the element with amplitude*sin(omega t) for
/// `cycles` periods via the Grünwald–Letnikov scheme, then evaluates
///   N = (2 j omega / (pi * amplitude)) *
///       integral over one half-period of (y - ybar) e^{-j omega (t - t0)} dt
/// by trapezoidal quadrature, with t0 aligned to a reset instant (an input
/// zero crossing) and ybar the mean over the final full cycle.
///
/// Reset handling inside the oracle: CI and FORE zero their state (at order 1
/// the memory question is moot). The FCI's jump is realized as an output
/// rebase: the underlying fractional integral keeps flowing and the output is
/// measured relative to the value held at the last reset. This is the
/// convention whose first harmonic reproduces the closed form for alpha < 1;
/// restarting the fractional memory instead biases the fundamental's
/// magnitude by roughly 20% (see tests).
///
/// Throws NotPeriodic when the last two cycles differ by more than 1% RMS.
Complex numerical_df(const Element& e, double amplitude, double omega,
                     double h, std::size_t cycles = 10);

struct DescribingFunctionPoint {
  ElementKind kind;
  double alpha;
  double omega;
  Complex value;
};

/// CSV export with columns kind,alpha,omega,re,im,mag_db,phase_deg.
void write_df_csv(const std::vector<DescribingFunctionPoint>& points,
                  const std::string& path);
std::string df_csv_string(const std::vector<DescribingFunctionPoint>& points);

}  // namespace fracreset
