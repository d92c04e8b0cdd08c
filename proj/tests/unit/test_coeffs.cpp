#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/error.hpp"

using namespace fuchswave;

namespace {

// b = b0/tau + c1 tau^{-p1-1}, derivatives written out by hand
double b_bounded_deriv(double b0, double c1, double p1, double t, int k) {
  double tau = 1.0 + t;
  auto falling = [](double a, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= -(a + i);
    return r;
  };
  return b0 * falling(1.0, k) * std::pow(tau, -1.0 - k) +
         c1 * falling(p1 + 1.0, k) * std::pow(tau, -p1 - 1.0 - k);
}

double quad_log_lambda(const CoefficientModel& m, double t) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return 0.5 * gauss_kronrod<double, 61>::integrate([&](double s) { return m.b(s); }, 0.0, t, 15,
                                                    1e-14, &err);
}

}  // namespace

TEST_SUITE("coeffs") {

TEST_CASE("bounded jets match hand derivatives") {
  auto m = CoefficientModel::bounded(2.0, 0.75, 0.5, 0.5, 0.3, 1.5);
  for (double t : {0.0, 0.7, 13.0, 850.0}) {
    for (int k = 0; k <= 3; ++k) {
      double got = eval_coefficients(m, t, k).first;
      double want = b_bounded_deriv(2.0, 0.5, 0.5, t, k);
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("pure m jets") {
  auto m = CoefficientModel::pure(3.0, 0.9);
  double t = 4.0, tau = 5.0;
  CHECK(eval_coefficients(m, t, 0).second == doctest::Approx(0.9 / (tau * tau)));
  CHECK(eval_coefficients(m, t, 1).second == doctest::Approx(-1.8 / std::pow(tau, 3)));
  CHECK(eval_coefficients(m, t, 2).second == doctest::Approx(5.4 / std::pow(tau, 4)));
}

TEST_CASE("derivative order beyond ell is rejected") {
  auto m = CoefficientModel::pure(1.0, 1.0);
  try {
    eval_coefficients(m, 1.0, m.ell + 1);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::unsupported_order);
  }
  CHECK_THROWS_AS(eval_coefficients(m, -1.0, 0), Error);
}

TEST_CASE("lambda against quadrature") {
  for (auto m : {CoefficientModel::pure(2.0, 0.75), CoefficientModel::example_bounded(),
                 CoefficientModel::bounded(1.0, 0.0, -0.4, 0.0, 0.0, 1.0),
                 CoefficientModel::log_perturbation(3.0, 0.5, 0.05, 0.05, 1.0, 1.5),
                 CoefficientModel::log_perturbation(3.0, 0.5, 0.2, 0.0, 0.7, 1.5)}) {
    for (double t : {0.5, 10.0, 3000.0}) {
      CHECK(log_lambda(m, t) == doctest::Approx(quad_log_lambda(m, t)).epsilon(1e-10));
    }
  }
  CHECK(eval_lambda(CoefficientModel::pure(4.0, 0.0), 9.0) == doctest::Approx(100.0));
}

TEST_CASE("log perturbation lambda grows like a log power") {
  auto m = CoefficientModel::log_perturbation(3.0, 0.5, 0.4, 0.0, 1.0, 1.5);
  auto r = [&](double t) {
    return eval_lambda(m, t) / std::pow(1.0 + t, 1.5) / std::pow(std::log(std::exp(1.0) + t), 0.2);
  };
  CHECK(r(1e6) == doctest::Approx(r(1e8)).epsilon(1e-6));
  CHECK_THROWS_AS(CoefficientModel::log_perturbation(3.0, 0.5, 0.1, 0.1, 0.4, 1.5), Error);
}

TEST_CASE("classifier on eight cells") {
  struct Cell {
    double b0, m0;
    double re_p, im_p, re_m, im_m;
    Regime r;
  };
  // mu = -(b0+1)/2 +- sqrt((b0-1)^2/4 - m0), worked by hand
  Cell cells[] = {
      {1, 1, -1.0, 1.0, -1.0, -1.0, Regime::complex_pair},
      {1, 0.01, -1.0, 0.1, -1.0, -0.1, Regime::complex_pair},
      {2, 0.75, -1.5, std::sqrt(0.5), -1.5, -std::sqrt(0.5), Regime::complex_pair},
      {2, 2, -1.5, std::sqrt(1.75), -1.5, -std::sqrt(1.75), Regime::complex_pair},
      {3, 0, -1.0, 0.0, -3.0, 0.0, Regime::real_large_muplus},
      {4, 0, -1.0, 0.0, -4.0, 0.0, Regime::real_large_muplus},
      {2, 0.25, -1.5, 0.0, -1.5, 0.0, Regime::double_root},
      {0, 5, -0.5, std::sqrt(4.75), -0.5, -std::sqrt(4.75), Regime::complex_pair},
  };
  for (auto c : cells) {
    CAPTURE(c.b0);
    CAPTURE(c.m0);
    auto r = classify_regime(c.b0, c.m0);
    CHECK(std::abs(r.mu_plus - std::complex<double>(c.re_p, c.im_p)) <= 1e-12);
    CHECK(std::abs(r.mu_minus - std::complex<double>(c.re_m, c.im_m)) <= 1e-12);
    CHECK(r.regime == c.r);
  }
  // (3,0): 4m0 = 0 < b0(b0-2) = 3, so mu+ is above -b0/2
  CHECK(classify_regime(3, 0).dominant_exponent == doctest::Approx(-1.0));
  CHECK(classify_regime(4, 0).dominant_exponent == doctest::Approx(-1.0));
  CHECK(classify_regime(2, 2).dominant_exponent == doctest::Approx(-1.0));
}

TEST_CASE("predicted decay") {
  CHECK(predicted_decay(CoefficientModel::pure(4, 0), ZoneLabel::diss) == doctest::Approx(-1.0));
  CHECK(predicted_decay(CoefficientModel::pure(4, 0), ZoneLabel::hyp_large) == doctest::Approx(-2.0));
  auto m = CoefficientModel::bounded(2, 2, 0.1, 1, 0, 1, 1.5);
  CHECK_THROWS_AS(predicted_decay(m, ZoneLabel::diss), Error);
}

TEST_CASE("hypotheses on scale-invariant and perturbed models") {
  auto rep = check_hypotheses(CoefficientModel::pure(2, 0.75), 1e4);
  CHECK(rep.hyp1_pass);
  CHECK(rep.hyp2_pass);
  CHECK(rep.hyp2_b.back() == 0.0);
  auto ex = check_hypotheses(CoefficientModel::example_bounded(), 1e4);
  CHECK(ex.hyp1_pass);
  CHECK(ex.hyp2_pass);
}

TEST_CASE("json round trip and unknown fields") {
  auto m = CoefficientModel::log_perturbation(3, 0.5, 0.05, 0.05, 1.0, 1.5);
  auto back = model_from_json(to_json(m));
  CHECK(back.family == Family::log_perturbation);
  CHECK(back.b1 == 0.05);
  CHECK(back.sigma == 1.5);
  auto j = to_json(CoefficientModel::pure(1, 1));
  j["c1"] = 0.3;
  CHECK_THROWS_AS(model_from_json(j), Error);
}

TEST_CASE("trivial model") {
  CHECK(CoefficientModel::pure(0, 0).trivial());
  CHECK_FALSE(CoefficientModel::example_bounded().trivial());
}

}
