#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <optional>
#include <random>

#include "fracreset/models.hpp"

using namespace fracreset;

namespace {

StateSpaceModel double_integrator_plant() {
  // 1/(s^2 + 0.2 s) in controllable canonical form
  return tf_to_state_space({1.0}, {1.0, 0.2, 0.0});
}

StateSpaceModel integrator_element(double alpha) {
  return make_state_space(Matrix::Zero(1, 1), Matrix::Ones(1, 1),
                          Matrix::Ones(1, 1), alpha);
}

Complex freq_response(const StateSpaceModel& sys, Complex lambda) {
  const Eigen::Index n = sys.order();
  ComplexMatrix resolvent =
      (lambda * ComplexMatrix::Identity(n, n) - sys.a.cast<Complex>())
          .fullPivLu()
          .solve(ComplexMatrix::Identity(n, n));
  return (sys.c.cast<Complex>() * resolvent * sys.b.cast<Complex>())(0, 0);
}

ClosedLoopResetSystem example2_loop() {
  StateSpaceModel plant = augment_integer_order(
      tf_to_state_space({1.0}, {1.0, 0.0}), 0.5);
  StateSpaceModel element = integrator_element(0.5);
  return assemble_closed_loop(plant, std::nullopt, element,
                              make_reset_rule(0, 1));
}

}  // namespace

TEST_CASE("make_state_space validates shapes and order") {
  CHECK_THROWS_AS(make_state_space(Matrix::Zero(2, 3), Matrix::Zero(2, 1),
                                   Matrix::Zero(1, 2), 1.0),
                  NonSquare);
  CHECK_THROWS_AS(make_state_space(Matrix::Zero(2, 2), Matrix::Zero(3, 1),
                                   Matrix::Zero(1, 2), 1.0),
                  DimensionMismatch);
  CHECK_THROWS_AS(make_state_space(Matrix::Zero(2, 2), Matrix::Zero(2, 1),
                                   Matrix::Zero(1, 3), 1.0),
                  DimensionMismatch);
  CHECK_THROWS_AS(make_state_space(Matrix::Zero(2, 2), Matrix::Zero(2, 1),
                                   Matrix::Zero(1, 2), 1.5),
                  InvalidOrder);
}

TEST_CASE("tf_to_state_space produces the controllable canonical form") {
  StateSpaceModel plant = double_integrator_plant();
  Matrix a_expect(2, 2);
  a_expect << 0, 1, 0, -0.2;
  CHECK((plant.a - a_expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(plant.b(0, 0) == 0.0);
  CHECK(plant.b(1, 0) == 1.0);
  CHECK(plant.c(0, 0) == 1.0);
  CHECK(plant.c(0, 1) == 0.0);
  CHECK(plant.alpha == 1.0);

  StateSpaceModel lead = tf_to_state_space({1.0, 1.0}, {1.0, 0.2, 0.0});
  CHECK(lead.c(0, 0) == 1.0);  // constant coefficient on state 0
  CHECK(lead.c(0, 1) == 1.0);  // s coefficient on state 1

  // leading zeros are stripped before the degree test
  StateSpaceModel stripped = tf_to_state_space({0.0, 1.0}, {0.0, 1.0, 1.0});
  CHECK(stripped.order() == 1);
  CHECK(stripped.a(0, 0) == -1.0);
}

TEST_CASE("tf_to_state_space rejects improper fractions") {
  CHECK_THROWS_AS(tf_to_state_space({1.0, 0.0, 1.0}, {1.0, 1.0}),
                  ImproperTransferFunction);
  CHECK_THROWS_AS(tf_to_state_space({1.0, 1.0}, {1.0, 1.0}),
                  ImproperTransferFunction);
  CHECK_THROWS_AS(tf_to_state_space({1.0}, {0.0}), ImproperTransferFunction);
}

TEST_CASE("fold_output_polynomial absorbs s + 1 into the output row") {
  StateSpaceModel folded =
      fold_output_polynomial(double_integrator_plant(), {1.0, 1.0});
  CHECK(folded.c(0, 0) == 1.0);
  CHECK(folded.c(0, 1) == 1.0);
  CHECK(folded.order() == 2);

  // the fold needs C A^j B = 0 below the polynomial degree
  StateSpaceModel lag = tf_to_state_space({1.0}, {1.0, 1.0});
  CHECK_THROWS_AS(fold_output_polynomial(lag, {1.0, 1.0}),
                  ImproperTransferFunction);
}

TEST_CASE("augment_integer_order on the pure integrator") {
  StateSpaceModel aug =
      augment_integer_order(tf_to_state_space({1.0}, {1.0, 0.0}), 0.5);
  Matrix a_expect(2, 2);
  a_expect << 0, 1, 0, 0;
  CHECK((aug.a - a_expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(aug.b(0, 0) == 0.0);
  CHECK(aug.b(1, 0) == 1.0);
  CHECK(aug.c(0, 0) == 1.0);
  CHECK(aug.c(0, 1) == 0.0);
  CHECK(aug.alpha == 0.5);
}

TEST_CASE("augment_integer_order block layout for the damped double integrator") {
  StateSpaceModel aug = augment_integer_order(double_integrator_plant(), 0.5);
  REQUIRE(aug.order() == 4);
  // identity in the upper-right 2x2 block, A in the lower-left
  CHECK(aug.a(0, 2) == 1.0);
  CHECK(aug.a(1, 3) == 1.0);
  CHECK(aug.a(2, 1) == 1.0);
  CHECK(aug.a(3, 1) == -0.2);
  CHECK(aug.a.topLeftCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(aug.a.bottomRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(aug.b.topRows(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(aug.b(3, 0) == 1.0);
  CHECK(aug.c(0, 0) == 1.0);
  CHECK(aug.c.rightCols(3).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("augment_integer_order identity and error cases") {
  StateSpaceModel plant = double_integrator_plant();
  StateSpaceModel same = augment_integer_order(plant, 1.0);
  CHECK((same.a - plant.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(same.alpha == 1.0);

  CHECK_THROWS_AS(augment_integer_order(plant, 0.3), NonReciprocalOrder);
  StateSpaceModel frac = integrator_element(0.5);
  CHECK_THROWS_AS(augment_integer_order(frac, 0.25), AlreadyFractional);
}

TEST_CASE("augmentation preserves the frequency response under s -> s^alpha") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + trial % 4;
    Matrix m(n, n), b(n, 1), c(1, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      b(i, 0) = dist(rng);
      c(0, i) = dist(rng);
      for (Eigen::Index j = 0; j < n; ++j) m(i, j) = dist(rng);
    }
    Matrix a = m - (m.cwiseAbs().sum() + 1.0) * Matrix::Identity(n, n);
    StateSpaceModel sys = make_state_space(a, b, c, 1.0);
    StateSpaceModel aug = augment_integer_order(sys, 0.5);
    for (int k = 0; k < 20; ++k) {
      const double omega = std::pow(10.0, -2.0 + 4.0 * k / 19.0);
      const Complex s(0.0, omega);
      const Complex lambda = std::sqrt(s);  // principal (j omega)^{1/2}
      CHECK(std::abs(freq_response(sys, s) - freq_response(aug, lambda)) <
            1e-8);
    }
  }
}

TEST_CASE("assemble_closed_loop reproduces the half-order integrator loop") {
  ClosedLoopResetSystem sys = example2_loop();
  Matrix a_expect(3, 3);
  a_expect << 0, 1, 0, 0, 0, 1, -1, 0, 0;
  CHECK((sys.a_cl - a_expect).cwiseAbs().maxCoeff() == 0.0);
  Matrix ar_expect = Matrix::Identity(3, 3);
  ar_expect(2, 2) = 0.0;
  CHECK((sys.a_r - ar_expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.c_cl(0, 0) == 1.0);
  CHECK(sys.c_cl(0, 1) == 0.0);
  CHECK(sys.c_cl(0, 2) == 0.0);
  CHECK(sys.b_cl(2, 0) == 1.0);
  CHECK(sys.alpha == 0.5);
  CHECK(sys.n_plant == 2);
  CHECK(sys.n_controller == 0);
  CHECK(sys.n_reset_element == 1);
  CHECK(sys.reset_indices() == std::vector<Eigen::Index>{2});
  CHECK(sys.reset_output_row()[2] == 1.0);
}

TEST_CASE("assemble_closed_loop with a folded first-order-lead output row") {
  StateSpaceModel plant =
      fold_output_polynomial(double_integrator_plant(), {1.0, 1.0});
  StateSpaceModel fore = make_state_space(
      -Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), 1.0);
  ClosedLoopResetSystem sys =
      assemble_closed_loop(plant, std::nullopt, fore, make_reset_rule(0, 1));
  Matrix a_expect(3, 3);
  a_expect << 0, 1, 0, 0, -0.2, 1, -1, -1, -1;
  CHECK((sys.a_cl - a_expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.c_cl(0, 0) == 1.0);
  CHECK(sys.c_cl(0, 1) == 1.0);
  CHECK(sys.c_cl(0, 2) == 0.0);

  // block-extraction round trip
  CHECK((sys.a_cl.topLeftCorner(2, 2) - plant.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.a_cl(2, 2) == fore.a(0, 0));
}

TEST_CASE("assemble_closed_loop rejects degenerate or mismatched loops") {
  StateSpaceModel plant = double_integrator_plant();
  StateSpaceModel empty{Matrix::Zero(0, 0), Matrix::Zero(0, 1),
                        Matrix::Zero(1, 0), 1.0};
  CHECK_THROWS_AS(assemble_closed_loop(plant, std::nullopt, empty,
                                       make_reset_rule(0, 1)),
                  DimensionMismatch);

  StateSpaceModel half_element = integrator_element(0.5);
  CHECK_THROWS_AS(assemble_closed_loop(plant, std::nullopt, half_element,
                                       make_reset_rule(0, 1)),
                  OrderMismatch);
}

TEST_CASE("make_reset_rule builds an idempotent 0/1 projector") {
  ResetRule rule = make_reset_rule(1, 2);
  CHECK(rule.dim() == 3);
  CHECK((rule.a_r * rule.a_r - rule.a_r).cwiseAbs().maxCoeff() == 0.0);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double v = rule.a_r(i, j);
      CHECK((v == 0.0 || v == 1.0));
    }
  }
  CHECK(rule.a_r(0, 0) == 1.0);
  CHECK(rule.a_r(1, 1) == 0.0);
  CHECK_THROWS_AS(make_reset_rule(0, 0), DimensionMismatch);
  CHECK_THROWS_AS(make_reset_rule(-1, 2), DimensionMismatch);
}

TEST_CASE("on_reset_surface tests both clauses") {
  ClosedLoopResetSystem sys = example2_loop();
  Vector zero = Vector::Zero(3);
  CHECK_FALSE(on_reset_surface(sys, zero));

  Vector on(3);
  on << 0.0, 5.0, 3.0;
  CHECK(on_reset_surface(sys, on));

  Vector off(3);
  off << 1.0, 0.0, 3.0;
  CHECK_FALSE(on_reset_surface(sys, off));

  // scaling a non-output, non-reset state leaves the verdict unchanged
  Vector scaled(3);
  scaled << 0.0, 5.0 * 1.7, 3.0;
  CHECK(on_reset_surface(sys, scaled));

  // zero reset component fails the second clause even on the surface
  Vector flat(3);
  flat << 0.0, 5.0, 0.0;
  CHECK_FALSE(on_reset_surface(sys, flat));
}
