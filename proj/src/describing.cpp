#include "fracreset/describing.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>

#include "fracreset/fode.hpp"
#include "fracreset/models.hpp"

namespace fracreset {

namespace {
constexpr double kPi = std::numbers::pi;

void require_order(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidOrder("describing function: order must lie in (0, 1]");
  }
}
}  // namespace

ElementKind element_kind_from_string(const std::string& s) {
  if (s == "CI") return ElementKind::CI;
  if (s == "FORE") return ElementKind::FORE;
  if (s == "FCI") return ElementKind::FCI;
  if (s == "FI") return ElementKind::FI;
  if (s == "II") return ElementKind::II;
  throw SchemaViolation("unknown element kind: " + s);
}

std::string to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::CI: return "CI";
    case ElementKind::FORE: return "FORE";
    case ElementKind::FCI: return "FCI";
    case ElementKind::FI: return "FI";
    case ElementKind::II: return "II";
  }
  return "?";
}

Complex df_fore(double gain, double pole, double omega) {
  const Complex denom(pole, omega);
  const double correction =
      2.0 * omega * omega * (1.0 + std::exp(-pole * kPi / omega)) /
      (kPi * (pole * pole + omega * omega));
  return gain / denom * Complex(1.0, correction);
}

Complex df_ci(double omega) {
  return 4.0 / (kPi * omega) * Complex(1.0, -kPi / 4.0);
}

Complex df_fci(double alpha, double omega) {
  require_order(alpha);
  const double half = alpha * kPi / 2.0;
  const Complex bracket =
      std::sin(half) + kPi / 4.0 * std::exp(Complex(0.0, -half));
  return 4.0 / (kPi * std::pow(omega, alpha)) * bracket;
}

Complex df_fi(double alpha, double omega) {
  require_order(alpha);
  return std::pow(Complex(0.0, omega), -alpha);
}

Complex df_ii(double omega) { return 1.0 / Complex(0.0, omega); }

Complex describing_function(const Element& e, double omega) {
  switch (e.kind) {
    case ElementKind::CI: return e.gain * df_ci(omega);
    case ElementKind::FORE: return df_fore(e.gain, e.pole, omega);
    case ElementKind::FCI: return e.gain * df_fci(e.alpha, omega);
    case ElementKind::FI: return e.gain * df_fi(e.alpha, omega);
    case ElementKind::II: return e.gain * df_ii(omega);
  }
  throw InvalidOrder("describing_function: unknown element");
}

double phase_lead(ElementKind kind, double alpha) {
  require_order(alpha);
  switch (kind) {
    case ElementKind::CI:
      return 90.0 + std::arg(df_ci(1.0)) * 180.0 / kPi;
    case ElementKind::FCI:
      return 90.0 + std::arg(df_fci(alpha, 1.0)) * 180.0 / kPi;
    case ElementKind::FI:
      return (1.0 - alpha) * 90.0;
    case ElementKind::II:
      return 0.0;
    case ElementKind::FORE:
      throw InvalidOrder(
          "phase_lead: FORE's lead is frequency dependent; no single value");
  }
  throw InvalidOrder("phase_lead: unknown element");
}

Complex numerical_df(const Element& e, double amplitude, double omega,
                     double h, std::size_t cycles) {
  if (amplitude <= 0.0 || omega <= 0.0 || h <= 0.0 || cycles < 3) {
    throw InvalidOrder("numerical_df: need positive amplitude/omega/h, >=3 cycles");
  }
  const double alpha = e.effective_alpha();
  require_order(alpha);

  const std::size_t pts =
      static_cast<std::size_t>(std::llround(2.0 * kPi / (omega * h)));
  const std::size_t total = cycles * pts;

  const double pole = e.kind == ElementKind::FORE ? e.pole : 0.0;
  StateSpaceModel model{Matrix::Constant(1, 1, -pole),
                        Matrix::Constant(1, 1, e.gain),
                        Matrix::Constant(1, 1, 1.0), alpha};
  auto weights = std::make_shared<const GLWeights>(gl_weights(alpha, total + 1));
  GLState state(weights, h, Vector::Zero(1));

  // The FCI's jump is an output rebase (the fractional integral keeps
  // flowing; the output is measured from the held pre-reset value). CI and
  // FORE zero their state outright.
  const bool rebase = e.kind == ElementKind::FCI && alpha < 1.0;
  double offset = 0.0;

  std::vector<double> y(total + 1, 0.0);
  const double out_tol = 1e-9 * amplitude;
  int guard = 0;
  for (std::size_t k = 0; k < total; ++k) {
    const double u_k = amplitude * std::sin(omega * static_cast<double>(k) * h);
    const double u_next =
        amplitude * std::sin(omega * static_cast<double>(k + 1) * h);
    Vector xn = gl_step(model, state, u_k);
    double out = xn[0] - offset;

    bool fired = false;
    if (e.resets() && guard == 0) {
      const bool crossing = u_k * u_next < 0.0 || std::abs(u_next) <= out_tol;
      if (crossing && std::abs(out) > out_tol) {
        if (rebase) {
          offset = xn[0];
        } else {
          state.reset_components({0}, MemoryMode::ClearMemory);
        }
        out = 0.0;
        fired = true;
      }
    }
    guard = fired ? 1 : std::max(0, guard - 1);
    y[k + 1] = out;
  }

  // Periodic steady state: the last two cycles must agree to 1% RMS.
  double diff2 = 0.0, last2 = 0.0;
  for (std::size_t j = 0; j < pts; ++j) {
    const double a = y[total - pts + j];
    const double b = y[total - 2 * pts + j];
    diff2 += (a - b) * (a - b);
    last2 += a * a;
  }
  if (last2 == 0.0 || std::sqrt(diff2 / last2) > 0.01) {
    throw NotPeriodic("numerical_df: response has not settled into a cycle");
  }

  const std::size_t k0 = total - pts;  // start of the last cycle: u ~ 0, reset-aligned
  double ybar = 0.0;
  for (std::size_t j = 0; j < pts; ++j) ybar += y[k0 + j];
  ybar /= static_cast<double>(pts);

  const std::size_t half = static_cast<std::size_t>(std::llround(kPi / (omega * h)));
  Complex integral(0.0, 0.0);
  for (std::size_t j = 0; j <= half; ++j) {
    const double tau = static_cast<double>(j) * h;
    const Complex f =
        (y[k0 + j] - ybar) * std::exp(Complex(0.0, -omega * tau));
    const double wgt = (j == 0 || j == half) ? 0.5 : 1.0;
    integral += wgt * f;
  }
  integral *= h;
  return Complex(0.0, 2.0 * omega / (kPi * amplitude)) * integral;
}

namespace {
void append_g(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  out += buf;
}
}  // namespace

std::string df_csv_string(const std::vector<DescribingFunctionPoint>& points) {
  std::string body = "kind,alpha,omega,re,im,mag_db,phase_deg\n";
  for (const auto& p : points) {
    body += to_string(p.kind);
    body += ',';
    append_g(body, p.alpha);
    body += ',';
    append_g(body, p.omega);
    body += ',';
    append_g(body, p.value.real());
    body += ',';
    append_g(body, p.value.imag());
    body += ',';
    append_g(body, 20.0 * std::log10(std::abs(p.value)));
    body += ',';
    append_g(body, std::arg(p.value) * 180.0 / kPi);
    body += '\n';
  }
  return body;
}

void write_df_csv(const std::vector<DescribingFunctionPoint>& points,
                  const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("IOError", "cannot open " + path);
  f << df_csv_string(points);
}

}  // namespace fracreset
