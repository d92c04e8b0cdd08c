#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include "fuchswave/error.hpp"
#include "fuchswave/modal.hpp"

using namespace fuchswave;

namespace {

// u = tau^a J_nu(xi tau), a = (1-b0)/2, nu^2 = a^2 - m0 solves the pure-model ODE
struct BesselSolution {
  double a, nu, xi;
  double u(double t) const {
    double tau = 1 + t;
    return std::pow(tau, a) * boost::math::cyl_bessel_j(nu, xi * tau);
  }
  double ut(double t) const {
    double tau = 1 + t;
    return a * std::pow(tau, a - 1) * boost::math::cyl_bessel_j(nu, xi * tau) +
           std::pow(tau, a) * xi * boost::math::cyl_bessel_j_prime(nu, xi * tau);
  }
};

}  // namespace

TEST_SUITE("modal") {

TEST_CASE("oracle reproduces Bessel solutions") {
  double cells[][2] = {{3, 0}, {4, 0}, {3, 0.9}, {1, 0}};
  for (auto& c : cells) {
    CAPTURE(c[0]);
    double a = (1 - c[0]) / 2;
    BesselSolution B{a, std::sqrt(a * a - c[1]), 0.7};
    ModalSystem sys{CoefficientModel::pure(c[0], c[1]), ZoneConfig{1.0}, 0.7, SystemForm::unweighted};
    OracleOptions o;
    o.tol = 1e-11;
    for (double t : {5.0, 60.0, 400.0}) {
      auto E = integrate_fundamental(sys, 0.0, t, o).E;
      Vector2cd y0(B.u(0), B.ut(0));
      Vector2cd y = E * y0;
      double scale = std::hypot(B.u(t), B.ut(t) / 0.7);
      CHECK(std::abs(y(0) - B.u(t)) <= 1e-8 * scale);
      CHECK(std::abs(y(1) - B.ut(t)) <= 1e-8 * scale * 0.7 + 1e-14);
    }
  }
}

TEST_CASE("Euler solutions at xi = 0") {
  // u = tau^r with r^2 + (b0-1) r + m0 = 0
  double b0 = 4, m0 = 0.0;
  for (double r : {0.0, -3.0}) {
    ModalSystem sys{CoefficientModel::pure(b0, m0), ZoneConfig{1.0}, 0.0, SystemForm::unweighted};
    auto E = integrate_fundamental(sys, 0.0, 99.0, {1e-12, false}).E;
    Vector2cd y = E * Vector2cd(1.0, r);
    CHECK(std::abs(y(0) - std::pow(100.0, r)) <= 1e-9);
    CHECK(std::abs(y(1) - r * std::pow(100.0, r - 1)) <= 1e-9);
  }
}

TEST_CASE("free rotation when b = m = 0") {
  double xi = 1.3;
  ModalSystem sys{CoefficientModel::pure(0, 0), ZoneConfig{1.0}, xi, SystemForm::hyp_system};
  double s = 2.0, t = 57.0;
  auto E = integrate_fundamental(sys, s, t, {1e-12, false}).E;
  double ph = xi * (t - s);
  Matrix2cd want;
  want << std::cos(ph), kI * std::sin(ph), kI * std::sin(ph), std::cos(ph);
  CHECK((E - want).norm() <= 1e-9);
}

TEST_CASE("fuchs form is tau times i times the dissipative matrix") {
  for (auto m : {CoefficientModel::pure(2, 0.75), CoefficientModel::example_bounded()}) {
    ModalSystem d{m, ZoneConfig{1.5}, 0.01, SystemForm::diss_system};
    ModalSystem f = d;
    f.form = SystemForm::fuchs_form;
    for (double t : {0.0, 3.0, 40.0}) {
      Matrix2cd lhs = system_matrix(f, t);
      Matrix2cd rhs = kI * (1.0 + t) * system_matrix(d, t);
      CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }
  }
}

TEST_CASE("cocycle and identity at s = t") {
  ModalSystem sys{CoefficientModel::example_bounded(), ZoneConfig{1.0}, 0.2, SystemForm::diss_system};
  CHECK(check_cocycle(sys, 0.0, 2.0, 30.0) <= 1e-8);
  auto E = integrate_fundamental(sys, 3.0, 3.0).E;
  CHECK((E - Matrix2cd::Identity()).norm() == 0.0);
  CHECK_THROWS_AS(system_matrix(ModalSystem{CoefficientModel::pure(1, 1), ZoneConfig{}, 0.0,
                                            SystemForm::hyp_system},
                                1.0),
                  Error);
}

TEST_CASE("path matches single integrations") {
  ModalSystem sys{CoefficientModel::pure(3, 0.9), ZoneConfig{1.0}, 0.5, SystemForm::hyp_system};
  auto times = log_spaced(0.0, 200.0, 5);
  auto path = integrate_fundamental_path(sys, 0.0, times, {1e-11, false});
  REQUIRE(path.size() == times.size());
  auto single = integrate_fundamental(sys, 0.0, times[3], {1e-11, false});
  CHECK((path[3].E - single.E).norm() <= 1e-8 * single.E.norm());
}

TEST_CASE("log spaced endpoints") {
  auto v = log_spaced(0.0, 1e4, 9);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1e4);
  CHECK(v[4] == doctest::Approx(std::sqrt(1e4 + 1) - 1));
}

}
