#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "fracreset/errors.hpp"

namespace fracreset {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Result of a dense eigendecomposition: M * V = V * diag(values).
/// Eigenvalues are sorted by real part descending; ties are broken by
/// imaginary part descending so the ordering is deterministic.
struct EigenDecomposition {
  ComplexVector values;
  ComplexMatrix vectors;
};

/// Dense eigendecomposition for small matrices (n <= 32).
/// Throws NonSquare, ConvergenceFailure.
EigenDecomposition eig(const ComplexMatrix& m);

/// The stability transform: returns -(-A)^{1/(2-alpha)} computed through the
/// eigendecomposition of -A with the principal logarithm branch. For
/// alpha == 1 the exponent is 1 and A is returned unchanged (exactly).
/// The result is realified when the largest imaginary entry is below
/// 1e-8 times the matrix 1-norm.
/// Throws BranchCutViolation (A has an eigenvalue on [0, +inf)),
/// IllConditionedEigenbasis (eigenvector condition number > 1e12).
ComplexMatrix matrix_fractional_power(const ComplexMatrix& a, double alpha);

/// Convenience wrapper for real matrices whose transform is expected to be
/// real after the threshold realification; throws IllConditionedEigenbasis
/// if a genuinely complex result survives.
Matrix matrix_fractional_power_real(const Matrix& a, double alpha);

/// Solves A^T P + P A = -Q by Kronecker vectorization (intended for n <= 10)
/// and returns the symmetrized solution (P + P^T)/2.
/// Throws SingularLyapunovOperator when eigenvalues of A satisfy
/// lambda_i + lambda_j = 0.
Matrix lyapunov_solve(const Matrix& a, const Matrix& q);

/// Real-coefficient rational function in s; coefficients are stored in
/// descending degree order. No common-factor reduction is performed.
struct RationalFunction {
  std::vector<double> num;
  std::vector<double> den;
};

/// Horner evaluation of num(s)/den(s).
/// Throws PoleHit when |den(s)| < 1e-300.
Complex eval_rational(const RationalFunction& h, Complex s);

/// Horner evaluation of a single polynomial (descending coefficients).
Complex eval_poly(const std::vector<double>& coeffs, Complex s);

/// Roots of a real polynomial via its companion matrix. Leading zeros are
/// stripped; a constant polynomial has no roots.
ComplexVector poly_roots(const std::vector<double>& coeffs);

/// True when every root has real part < -1e-9.
bool is_hurwitz(const std::vector<double>& den);

}  // namespace fracreset
