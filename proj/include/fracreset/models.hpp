#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracreset/numcore.hpp"

namespace fracreset {

/// Commensurate fractional-order LTI realization D^alpha x = A x + B u,
/// y = C x. alpha in (0, 1]; alpha == 1 is the ordinary integer-order case.
struct StateSpaceModel {
  Matrix a;
  Matrix b;  // n x m
  Matrix c;  // p x n
  double alpha = 1.0;

  Eigen::Index order() const { return a.rows(); }
};

/// Validates dimensions and order range; throws DimensionMismatch /
/// InvalidOrder.
StateSpaceModel make_state_space(Matrix a, Matrix b, Matrix c, double alpha);

/// Controllable canonical realization of a strictly proper transfer function
/// num(s)/den(s) (descending coefficients). Throws ImproperTransferFunction
/// when deg(num) >= deg(den) after stripping leading zeros.
StateSpaceModel tf_to_state_space(const std::vector<double>& num,
                                  const std::vector<double>& den);

/// Reset rule of a reset controller: the jump matrix A_R = blockdiag(I, 0)
/// zeroing the last n_reset states of the element it belongs to.
struct ResetRule {
  Matrix a_r;
  Eigen::Index n_reset = 0;      // states that are zeroed
  Eigen::Index n_through = 0;    // states that pass through unchanged

  Eigen::Index dim() const { return a_r.rows(); }
};

/// Builds and validates the blockdiag(I_{n_through}, 0_{n_reset}) rule.
ResetRule make_reset_rule(Eigen::Index n_through, Eigen::Index n_reset);

/// Closed loop of reference -> reset element -> linear controller -> plant
/// with unity output feedback:
///   D^alpha x = A_cl x + B_cl r,   y = C_cl x,
///   x(t+) = A_R x(t)  when y crosses the reference and the reset states are
///                     nonzero.
/// State layout is [plant; controller; reset element]; the reset rule is
/// lifted to the full state as blockdiag(I, I, A_R_element).
struct ClosedLoopResetSystem {
  Matrix a_cl;
  Matrix b_cl;               // n x 1
  Matrix c_cl;               // 1 x n
  Matrix a_r;                // lifted reset matrix, n x n
  double alpha = 1.0;
  Eigen::Index n_plant = 0;
  Eigen::Index n_controller = 0;
  Eigen::Index n_reset_element = 0;

  Eigen::Index order() const { return a_cl.rows(); }
  /// Indices of the states zeroed at a reset (the trailing block).
  std::vector<Eigen::Index> reset_indices() const;
  /// Output row of the reset element inside the loop (selects its state).
  Vector reset_output_row() const;
};

/// Rewrites an integer-order system as a commensurate system of order
/// target_alpha with p = 1/target_alpha state blocks: identity blocks on the
/// super-diagonal, A in the bottom-left block, B in the last block row, C on
/// the first block. Transfer functions are preserved under s -> s^alpha.
/// Throws NonReciprocalOrder (1/alpha not an integer), AlreadyFractional.
StateSpaceModel augment_integer_order(const StateSpaceModel& sys,
                                      double target_alpha);

/// Assembles the closed loop. lin_ctrl == nullopt collapses the controller
/// block (the reset element's output feeds the plant directly). All
/// subsystems must share the same order. SISO throughout.
/// Throws OrderMismatch, DimensionMismatch.
ClosedLoopResetSystem assemble_closed_loop(
    const StateSpaceModel& plant, const std::optional<StateSpaceModel>& lin_ctrl,
    const StateSpaceModel& reset_ctrl, const ResetRule& rule);

/// True iff |C_cl x| <= tol and ||(I - A_R) x||_inf > tol: the state lies on
/// the reset surface.
bool on_reset_surface(const ClosedLoopResetSystem& sys, const Vector& x,
                      double tol = 1e-9);

/// Folds a polynomial controller C(s) = sum_k coeffs[k] s^k (ascending k)
/// acting on the plant output into the output row:
///   C_tilde = sum_k coeffs[k] * C A^k,
/// valid when C A^j B = 0 for all j < deg (no direct feedthrough appears).
/// Used to realize improper controllers such as s + 1 as output feedback.
/// Throws ImproperTransferFunction when the fold would need a feedthrough.
StateSpaceModel fold_output_polynomial(const StateSpaceModel& plant,
                                       const std::vector<double>& ascending_coeffs);

}  // namespace fracreset
