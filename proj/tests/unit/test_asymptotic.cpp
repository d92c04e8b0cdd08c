#include <doctest.h>

#include <cmath>

#include "fuchswave/asymptotic.hpp"
#include "fuchswave/error.hpp"
#include "fuchswave/modal.hpp"

using namespace fuchswave;

namespace {

VectorXcd vec2(cd a, cd b) {
  VectorXcd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("asymptotic") {

TEST_CASE("log measure of a constant") {
  auto g = PanelGrid::build(0.0, std::log(1e4), 0.25);
  std::vector<double> one(g.size(), 1.0);
  CHECK(log_measure_integral(g, one, 1e1, 1e3) == doctest::Approx(std::log(100.0)).epsilon(1e-10));
}

TEST_CASE("Levinson with a diagonal remainder is explicit") {
  // V_0 = e_0 exp(int (mu_0 + c s^-2) ds/s); normalised at T the amplitude is
  // exp(-c/2 (tau^-2 - T^-2))
  double c = 0.3, T = 1e3;
  auto sys = constant_fuchs(vec2(-1.0, -2.0), [c](double tau) {
    MatrixXcd R = MatrixXcd::Zero(2, 2);
    R(0, 0) = c / (tau * tau);
    return R;
  });
  auto sol = levinson_solve(sys, 0, 1.0, T);
  for (double tau : {1.5, 4.0, 20.0, 300.0}) {
    double want = std::abs(std::exp(-c / 2 * (1 / (tau * tau) - 1 / (T * T))) - 1.0);
    CHECK(sol.residual_at(tau) == doctest::Approx(want).epsilon(1e-9));
  }
  CHECK(sol.observed_rate <= sol.rate_bound);
}

TEST_CASE("basis fundamental matrix against direct integration") {
  auto sys = constant_fuchs(vec2(-1.0, cd(-2.0, 0.5)), [](double tau) {
    MatrixXcd R(2, 2);
    R << 0.0, 0.4 / tau, 0.2 / tau, 0.1 / (tau * tau);
    return R;
  });
  double t0 = 2.0, T = 1e3;
  std::vector<LevinsonSolution> sols = {levinson_solve(sys, 0, t0, T), levinson_solve(sys, 1, t0, T)};
  auto bf = fundamental_from_basis(sols, 3.0);
  for (double tau : {10.0, 150.0}) {
    MatrixXcd E = bf.E(tau);
    MatrixXcd ref = fuchs_propagator(sys, 3.0, tau, 1e-12);
    CHECK((E - ref).norm() <= 1e-7 * ref.norm());
    CHECK(op_norm(ref) <= bf.bound(tau) * (1 + 1e-9));
  }
  for (const auto& s : sols) CHECK(s.ode_residual <= 1e-6);
}

TEST_CASE("dichotomy of constant exponents") {
  auto sys = constant_fuchs(vec2(-1.0, -2.0), [](double) { return MatrixXcd::Zero(2, 2); });
  auto v = check_dichotomy({sys}, 0, 1, 1e4);
  CHECK(v.strong);
  CHECK(v.C_minus == doctest::Approx(1.0));
  CHECK(v.alternative == Alternative::second);
  CHECK(v.integral.back() == doctest::Approx(std::log(v.tau.back())).epsilon(1e-10));
  CHECK_THROWS_AS(check_dichotomy({sys}, 1, 1, 1e4), Error);
}

TEST_CASE("large remainders refuse to contract") {
  auto sys = constant_fuchs(vec2(-1.0, -2.0), [](double tau) {
    MatrixXcd R(2, 2);
    R << 0.0, 5.0 / std::sqrt(tau), 5.0 / std::sqrt(tau), 0.0;
    return R;
  });
  try {
    levinson_solve(sys, 0, 1.0, 1e4);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::needs_larger_t0);
  }
}

TEST_CASE("diagonalised modal Fuchs form") {
  ZoneConfig z{1.0};
  auto mf = diagonalized_modal_fuchs(CoefficientModel::pure(2, 0.75), z, 1e-3);
  CHECK(mf.tau_theta == doctest::Approx(1000.0));
  // P^-1 A P is diag(mu-, mu+)
  ModalSystem ms{CoefficientModel::pure(2, 0.75), z, 1e-3, SystemForm::fuchs_form};
  Matrix2cd D = mf.Pinv * fuchs_constant(ms) * mf.P;
  auto rc = classify_regime(2, 0.75);
  CHECK(std::abs(D(0, 0) - rc.mu_minus) <= 1e-12);
  CHECK(std::abs(D(1, 1) - rc.mu_plus) <= 1e-12);
  CHECK(std::abs(D(0, 1)) + std::abs(D(1, 0)) <= 1e-12);
  CHECK(mf.sys.R(2000.0).norm() == 0.0);
  CHECK_THROWS_AS(diagonalized_modal_fuchs(CoefficientModel::pure(2, 0.25), z, 1e-3), Error);
}

TEST_CASE("Hartman-Wintner transform") {
  auto m = CoefficientModel::log_perturbation(3, 0.5, 0.05, 0.05, 1.0, 1.5);
  auto mf = diagonalized_modal_fuchs(m, ZoneConfig{1.0}, 1e-6, false);
  auto hw = hartman_wintner(mf.sys, 1.5, 1.0, 1e3);
  for (const auto& N : hw.N) {
    CHECK(N(0, 0) == 0.0);
    CHECK(N(1, 1) == 0.0);
  }
  CHECK(hw.identity_residual <= 1e-6);
  // W = (I+N)^-1 V: transformed propagator conjugates the original one
  double s = 20.0, t = 500.0;
  MatrixXcd I = MatrixXcd::Identity(2, 2);
  MatrixXcd Ev = fuchs_propagator(mf.sys, s, t, 1e-12);
  MatrixXcd Ew = fuchs_propagator(hw.transformed, s, t, 1e-12);
  MatrixXcd pred = (I + hw.N_at(t)).inverse() * Ev * (I + hw.N_at(s));
  CHECK((Ew - pred).norm() <= 1e-6 * pred.norm());
  CHECK_THROWS_AS(hartman_wintner(mf.sys, 2.5, 1.0, 1e3), Error);
}

TEST_CASE("scaling uniformity for constant systems") {
  auto sys = constant_fuchs(vec2(-1.0, -3.0), [](double) { return MatrixXcd::Zero(2, 2); });
  auto rep = scaling_uniformity(sys, {1.0, 10.0, 100.0}, 2.0, 50.0);
  for (double r : rep.ratios) CHECK(r == doctest::Approx(1.0).epsilon(1e-8));
}

}
