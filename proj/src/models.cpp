#include "fracreset/models.hpp"

#include <cmath>

namespace fracreset {

StateSpaceModel make_state_space(Matrix a, Matrix b, Matrix c, double alpha) {
  if (a.rows() != a.cols()) throw NonSquare("state space: A not square");
  if (b.rows() != a.rows()) throw DimensionMismatch("state space: B rows != n");
  if (c.cols() != a.rows()) throw DimensionMismatch("state space: C cols != n");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidOrder("state space: order must lie in (0, 1]");
  }
  return StateSpaceModel{std::move(a), std::move(b), std::move(c), alpha};
}

StateSpaceModel tf_to_state_space(const std::vector<double>& num_in,
                                  const std::vector<double>& den_in) {
  std::vector<double> num = num_in;
  std::vector<double> den = den_in;
  auto strip = [](std::vector<double>& v) {
    std::size_t lead = 0;
    while (lead + 1 < v.size() && v[lead] == 0.0) ++lead;
    v.erase(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(lead));
  };
  strip(num);
  strip(den);
  if (den.empty() || den[0] == 0.0) {
    throw ImproperTransferFunction("tf_to_state_space: zero denominator");
  }
  if (num.size() >= den.size()) {
    throw ImproperTransferFunction(
        "tf_to_state_space: transfer function must be strictly proper");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(den.size()) - 1;
  const double lead = den[0];

  Matrix a = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    a(n - 1, j) = -den[static_cast<std::size_t>(n - j)] / lead;
  }
  Matrix b = Matrix::Zero(n, 1);
  b(n - 1, 0) = 1.0;
  Matrix c = Matrix::Zero(1, n);
  for (std::size_t i = 0; i < num.size(); ++i) {
    // num = b_{m} s^m + ...; coefficient of s^k lands on state k
    c(0, static_cast<Eigen::Index>(num.size() - 1 - i)) = num[i] / lead;
  }
  return StateSpaceModel{std::move(a), std::move(b), std::move(c), 1.0};
}

ResetRule make_reset_rule(Eigen::Index n_through, Eigen::Index n_reset) {
  if (n_through < 0 || n_reset < 0 || n_through + n_reset == 0) {
    throw DimensionMismatch("reset rule: nonpositive dimension");
  }
  const Eigen::Index n = n_through + n_reset;
  Matrix a_r = Matrix::Zero(n, n);
  a_r.topLeftCorner(n_through, n_through).setIdentity();
  return ResetRule{std::move(a_r), n_reset, n_through};
}

std::vector<Eigen::Index> ClosedLoopResetSystem::reset_indices() const {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = order() - n_reset_element; i < order(); ++i) {
    if (a_r(i, i) == 0.0) out.push_back(i);
  }
  return out;
}

Vector ClosedLoopResetSystem::reset_output_row() const {
  Vector row = Vector::Zero(order());
  // SISO reset element with C_r = 1 on its (single) state.
  row[order() - 1] = 1.0;
  return row;
}

StateSpaceModel augment_integer_order(const StateSpaceModel& sys,
                                      double target_alpha) {
  if (sys.alpha != 1.0) {
    throw AlreadyFractional("augment: source system is already fractional");
  }
  if (!(target_alpha > 0.0 && target_alpha <= 1.0)) {
    throw InvalidOrder("augment: target order must lie in (0, 1]");
  }
  const double p_real = 1.0 / target_alpha;
  const double p_round = std::round(p_real);
  if (std::abs(p_real - p_round) > 1e-9) {
    throw NonReciprocalOrder("augment: 1/alpha is not an integer");
  }
  const Eigen::Index p = static_cast<Eigen::Index>(p_round);
  if (p == 1) return sys;  // identity augmentation

  const Eigen::Index n = sys.order();
  const Eigen::Index m = sys.b.cols();
  const Eigen::Index q = sys.c.rows();
  Matrix a = Matrix::Zero(n * p, n * p);
  for (Eigen::Index blk = 0; blk + 1 < p; ++blk) {
    a.block(blk * n, (blk + 1) * n, n, n).setIdentity();
  }
  a.bottomLeftCorner(n, n) = sys.a;
  Matrix b = Matrix::Zero(n * p, m);
  b.bottomRows(n) = sys.b;
  Matrix c = Matrix::Zero(q, n * p);
  c.leftCols(n) = sys.c;
  return StateSpaceModel{std::move(a), std::move(b), std::move(c), target_alpha};
}

ClosedLoopResetSystem assemble_closed_loop(
    const StateSpaceModel& plant, const std::optional<StateSpaceModel>& lin_ctrl,
    const StateSpaceModel& reset_ctrl, const ResetRule& rule) {
  if (reset_ctrl.order() == 0 || plant.order() == 0) {
    throw DimensionMismatch("assemble: zero-dimensional subsystem");
  }
  if (rule.dim() != reset_ctrl.order()) {
    throw DimensionMismatch("assemble: reset rule size differs from element");
  }
  if (plant.c.rows() != 1 || reset_ctrl.c.rows() != 1 ||
      plant.b.cols() != 1 || reset_ctrl.b.cols() != 1) {
    throw DimensionMismatch("assemble: loop must be SISO");
  }
  if (plant.alpha != reset_ctrl.alpha ||
      (lin_ctrl && lin_ctrl->alpha != plant.alpha)) {
    throw OrderMismatch("assemble: subsystems have different orders");
  }

  const Eigen::Index np = plant.order();
  const Eigen::Index nc = lin_ctrl ? lin_ctrl->order() : 0;
  const Eigen::Index nr = reset_ctrl.order();
  const Eigen::Index n = np + nc + nr;

  Matrix a = Matrix::Zero(n, n);
  a.topLeftCorner(np, np) = plant.a;
  if (lin_ctrl) {
    if (lin_ctrl->c.rows() != 1 || lin_ctrl->b.cols() != 1) {
      throw DimensionMismatch("assemble: controller must be SISO");
    }
    a.block(np, np, nc, nc) = lin_ctrl->a;
    a.block(0, np, np, nc) = plant.b * lin_ctrl->c;           // plant <- ctrl
    a.block(np, np + nc, nc, nr) = lin_ctrl->b * reset_ctrl.c;  // ctrl <- reset
  } else {
    a.block(0, np + nc, np, nr) = plant.b * reset_ctrl.c;     // plant <- reset
  }
  a.block(np + nc, 0, nr, np) = -reset_ctrl.b * plant.c;      // reset <- -y
  a.bottomRightCorner(nr, nr) = reset_ctrl.a;

  Matrix b = Matrix::Zero(n, 1);
  b.bottomRows(nr) = reset_ctrl.b;

  Matrix c = Matrix::Zero(1, n);
  c.leftCols(np) = plant.c;

  Matrix a_r = Matrix::Identity(n, n);
  a_r.bottomRightCorner(nr, nr) = rule.a_r;

  ClosedLoopResetSystem sys;
  sys.a_cl = std::move(a);
  sys.b_cl = std::move(b);
  sys.c_cl = std::move(c);
  sys.a_r = std::move(a_r);
  sys.alpha = plant.alpha;
  sys.n_plant = np;
  sys.n_controller = nc;
  sys.n_reset_element = nr;
  return sys;
}

bool on_reset_surface(const ClosedLoopResetSystem& sys, const Vector& x,
                      double tol) {
  if (x.size() != sys.order()) {
    throw DimensionMismatch("on_reset_surface: state dimension differs");
  }
  const double y = (sys.c_cl * x)(0, 0);
  const double jump = ((Matrix::Identity(sys.order(), sys.order()) - sys.a_r) * x)
                          .cwiseAbs()
                          .maxCoeff();
  return std::abs(y) <= tol && jump > tol;
}

StateSpaceModel fold_output_polynomial(
    const StateSpaceModel& plant, const std::vector<double>& ascending_coeffs) {
  if (ascending_coeffs.empty()) {
    throw DimensionMismatch("fold: empty controller polynomial");
  }
  const std::size_t deg = ascending_coeffs.size() - 1;
  // The fold is exact only when no direct feedthrough term appears, i.e. the
  // differentiated output rows never touch the input: C A^j B = 0, j < deg.
  Matrix cak = plant.c;
  for (std::size_t j = 0; j < deg; ++j) {
    if ((cak * plant.b).cwiseAbs().maxCoeff() > 0.0) {
      throw ImproperTransferFunction(
          "fold: controller would introduce direct feedthrough");
    }
    cak = cak * plant.a;
  }
  Matrix folded = Matrix::Zero(plant.c.rows(), plant.order());
  cak = plant.c;
  for (std::size_t k = 0; k <= deg; ++k) {
    folded += ascending_coeffs[k] * cak;
    cak = cak * plant.a;
  }
  StateSpaceModel out = plant;
  out.c = std::move(folded);
  return out;
}

}  // namespace fracreset
