#include "fracreset/numcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fracreset {

EigenDecomposition eig(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw NonSquare("eig: matrix is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
  if (m.rows() > 32) {
    throw NonSquare("eig: dimension exceeds the supported n <= 32");
  }
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("eig: QR iteration did not converge");
  }

  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  const ComplexVector& vals = solver.eigenvalues();
  std::sort(perm.begin(), perm.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (vals[i].real() != vals[j].real()) return vals[i].real() > vals[j].real();
    return vals[i].imag() > vals[j].imag();
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = vals[perm[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = solver.eigenvectors().col(perm[static_cast<std::size_t>(k)]);
  }
  return out;
}

namespace {

double one_norm(const ComplexMatrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    best = std::max(best, m.col(j).cwiseAbs().sum());
  }
  return best;
}

}  // namespace

ComplexMatrix matrix_fractional_power(const ComplexMatrix& a, double alpha) {
  if (a.rows() != a.cols()) {
    throw NonSquare("matrix_fractional_power: matrix not square");
  }
  if (alpha == 1.0) {
    return a;  // exponent 1/(2-1) = 1: identity transform, returned exactly
  }

  const ComplexMatrix m = -a;
  EigenDecomposition ed = eig(m);
  const double scale = std::max(one_norm(m), 1e-300);

  // Branch-cut guard: the principal logarithm is undefined on (-inf, 0], i.e.
  // wherever A itself has an eigenvalue on [0, +inf).
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    const Complex lam = ed.values[i];
    if (std::abs(lam.imag()) <= 1e-12 * scale && lam.real() <= 1e-12 * scale) {
      throw BranchCutViolation(
          "matrix_fractional_power: eigenvalue on the principal branch cut");
    }
  }

  Eigen::JacobiSVD<ComplexMatrix> svd(ed.vectors);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > 1e12) {
    throw IllConditionedEigenbasis(
        "matrix_fractional_power: eigenvector condition number exceeds 1e12");
  }

  const double exponent = 1.0 / (2.0 - alpha);
  ComplexVector powered(ed.values.size());
  for (Eigen::Index i = 0; i < ed.values.size(); ++i) {
    powered[i] = std::exp(exponent * std::log(ed.values[i]));
  }
  ComplexMatrix result =
      -(ed.vectors * powered.asDiagonal() * ed.vectors.inverse());

  const double imag_max = result.imag().cwiseAbs().maxCoeff();
  if (imag_max < 1e-8 * std::max(one_norm(result), 1e-300)) {
    result.imag().setZero();
  }
  return result;
}

Matrix matrix_fractional_power_real(const Matrix& a, double alpha) {
  ComplexMatrix r = matrix_fractional_power(a.cast<Complex>(), alpha);
  if (r.imag().cwiseAbs().maxCoeff() != 0.0) {
    throw IllConditionedEigenbasis(
        "matrix_fractional_power: result has a genuine imaginary part");
  }
  return r.real();
}

Matrix lyapunov_solve(const Matrix& a, const Matrix& q) {
  if (a.rows() != a.cols()) throw NonSquare("lyapunov_solve: A not square");
  if (q.rows() != q.cols() || q.rows() != a.rows()) {
    throw NonSquare("lyapunov_solve: Q incompatible with A");
  }
  const Eigen::Index n = a.rows();

  // Detect a singular Sylvester operator through the eigenvalue criterion
  // lambda_i + lambda_j = 0 before attempting the solve.
  EigenDecomposition ed = eig(a.cast<Complex>());
  double lam_scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    lam_scale = std::max(lam_scale, std::abs(ed.values[i]));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(ed.values[i] + ed.values[j]) <=
          1e-12 * std::max(lam_scale, 1.0)) {
        throw SingularLyapunovOperator(
            "lyapunov_solve: eigenvalues lambda_i + lambda_j = 0");
      }
    }
  }

  // vec(A^T P + P A) = (I (x) A^T + A^T (x) I) vec(P)
  Matrix k = Matrix::Zero(n * n, n * n);
  const Matrix at = a.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    k.block(i * n, i * n, n, n) += at;            // I (x) A^T
    for (Eigen::Index j = 0; j < n; ++j) {
      k.block(i * n, j * n, n, n) +=
          at(i, j) * Matrix::Identity(n, n);      // A^T (x) I
    }
  }
  Vector rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -q.col(j);

  Vector vec_p = k.fullPivLu().solve(rhs);
  Matrix p(n, n);
  for (Eigen::Index j = 0; j < n; ++j) p.col(j) = vec_p.segment(j * n, n);
  return 0.5 * (p + p.transpose());
}

Complex eval_poly(const std::vector<double>& coeffs, Complex s) {
  Complex r(0.0, 0.0);
  for (double c : coeffs) r = r * s + c;
  return r;
}

Complex eval_rational(const RationalFunction& h, Complex s) {
  const Complex d = eval_poly(h.den, s);
  if (std::abs(d) < 1e-300) {
    throw PoleHit("eval_rational: denominator vanishes at the given point");
  }
  return eval_poly(h.num, s) / d;
}

ComplexVector poly_roots(const std::vector<double>& coeffs) {
  std::size_t lead = 0;
  while (lead < coeffs.size() && coeffs[lead] == 0.0) ++lead;
  const std::size_t deg = coeffs.size() > lead ? coeffs.size() - lead - 1 : 0;
  if (deg == 0) return ComplexVector(0);

  Matrix companion = Matrix::Zero(static_cast<Eigen::Index>(deg),
                                  static_cast<Eigen::Index>(deg));
  const double a0 = coeffs[lead];
  for (std::size_t i = 0; i + 1 < deg; ++i) {
    companion(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
  }
  for (std::size_t i = 0; i < deg; ++i) {
    companion(0, static_cast<Eigen::Index>(i)) = -coeffs[lead + 1 + i] / a0;
  }
  return eig(companion.cast<Complex>()).values;
}

bool is_hurwitz(const std::vector<double>& den) {
  const ComplexVector roots = poly_roots(den);
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    if (roots[i].real() >= -1e-9) return false;
  }
  return true;
}

}  // namespace fracreset
