#include <doctest.h>

#include <cmath>

#include "fuchswave/error.hpp"
#include "fuchswave/estimates.hpp"

using namespace fuchswave;

namespace {

std::vector<double> geometric(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, double(i) / (n - 1));
  return v;
}

}  // namespace

TEST_SUITE("estimates") {

TEST_CASE("radial quadrature of a gaussian") {
  // ||exp(-|xi|^2/2)||^2 in R^n is pi^{n/2} (volume normalised by (2 pi)^n)
  for (int n = 1; n <= 3; ++n) {
    auto g = RadialGrid::log_grid(n, 1e-6, 12.0, 801);
    std::vector<double> f(g.xi.size());
    for (size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-g.xi[i] * g.xi[i]);
    double want = std::pow(std::acos(-1.0), n / 2.0) / std::pow(2 * std::acos(-1.0), n);
    CHECK(g.norm(f) * g.norm(f) == doctest::Approx(want).epsilon(1e-5));
  }
  CHECK(sphere_area(3) == doctest::Approx(4 * std::acos(-1.0)));
}

TEST_CASE("synthetic power law") {
  auto t = geometric(1.0, 1e5, 200);
  std::vector<double> v(t.size());
  for (size_t i = 0; i < t.size(); ++i) v[i] = 3.0 / t[i];
  FitOptions o;
  o.time_shift = 0.0;
  o.t_lo = 1e2;
  o.t_hi = 1e4;
  auto f = fit_decay(t, v, -1.0, o);
  CHECK(std::abs(f.exponent + 1.0) <= 1e-6);
  CHECK(f.pass);
  CHECK(f.rms_residual <= 1e-10);
}

TEST_CASE("synthetic power law with log-periodic ripple") {
  auto t = geometric(1.0, 1e5, 400);
  std::vector<double> v(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    double x = std::log(t[i]);
    v[i] = std::pow(t[i], -1.5) * std::exp(0.3 * std::cos(2 * x) + 0.1 * std::sin(4 * x));
  }
  FitOptions o;
  o.time_shift = 0.0;
  o.harmonic_freq = 2.0;
  auto f = fit_decay(t, v, -1.5, o);
  CHECK(f.harmonics);
  CHECK(std::abs(f.exponent + 1.5) <= 1e-8);
  o.harmonic_freq = 0.0;
  auto plain = fit_decay(t, v, -1.5, o);
  CHECK(std::abs(plain.exponent + 1.5) > std::abs(f.exponent + 1.5));
}

TEST_CASE("double root log correction") {
  auto t = geometric(1.0, 1e5, 2000);
  std::vector<double> v(t.size());
  for (size_t i = 0; i < t.size(); ++i) v[i] = std::pow(1 + t[i], -1.5) * std::log(1 + t[i]);
  auto f = fit_decay(t, v, 0.0);
  CHECK(f.exponent == doctest::Approx(double_root_prediction(-1.5, 1e2, 1e4)).epsilon(1e-3));
}

TEST_CASE("invalid windows") {
  auto t = geometric(1.0, 1e4, 50);
  std::vector<double> v(t.size(), 1.0);
  auto kind = [&](FitOptions o) {
    try {
      fit_decay(t, v, 0.0, o);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io;
  };
  FitOptions o;
  o.t_lo = 1e3;
  o.t_hi = 1e2;
  CHECK(kind(o) == ErrorKind::invalid_window);
  o.t_lo = 1e2;
  o.t_hi = 1e3;
  CHECK(kind(o) == ErrorKind::invalid_window);  // one decade, two required
  o.t_hi = 1e5;
  o.t_lo = 1e2;
  o.min_decades = 1;
  CHECK(kind(o) == ErrorKind::invalid_window);  // past the trace
  v[40] = 0.0;
  o.t_hi = 1e4;
  CHECK(kind(o) == ErrorKind::invalid_window);
}

TEST_CASE("zero data gives a zero trace") {
  auto g = RadialGrid::log_grid(2, 1e-3, 4.0, 33);
  DataSpec zero;
  zero.kind = DataKind::zero;
  auto tr = energy_trace(CoefficientModel::example_bounded(), ZoneConfig{1.0}, zero, g, {0.0, 10.0, 100.0});
  for (double v : tr.values) CHECK(v == 0.0);
  for (double v : tr.u_t) CHECK(v == 0.0);
}

TEST_CASE("free waves conserve energy in the hyperbolic zone") {
  auto g = RadialGrid::log_grid(1, 2.0, 4.0, 65);
  TraceOptions o;
  o.tol = 1e-11;
  auto tr = energy_trace(CoefficientModel::pure(0, 0), ZoneConfig{1.0}, DataSpec::ring(3.0, 1.0, 1.0, 0.5), g,
                         {0.0, 7.0, 300.0, 2000.0}, o);
  for (double v : tr.values) CHECK(v == doctest::Approx(tr.values[0]).epsilon(1e-8));
  for (size_t i = 0; i < tr.values.size(); ++i) {
    double e = std::hypot(tr.grad_u[i], tr.u_t[i]);
    CHECK(e == doctest::Approx(tr.values[0]).epsilon(1e-8));
  }
}

TEST_CASE("sharpness limit is quadratic in the data") {
  auto g = RadialGrid::log_grid(1, 2.0, 4.0, 65);
  auto m = CoefficientModel::example_bounded();
  auto d = DataSpec::ring(3.0, 1.0);
  auto a = sharpness_limit(m, ZoneConfig{1.0}, d, g, 100.0);
  auto b = sharpness_limit(m, ZoneConfig{1.0}, d.scaled(2.0), g, 100.0);
  CHECK(b.limit == doctest::Approx(4 * a.limit).epsilon(1e-8));
  CHECK(a.limit > 0);
  CHECK_THROWS_AS(sharpness_limit(m, ZoneConfig{1.0}, DataSpec::lowpass(0.5), g, 100.0), Error);
}

TEST_CASE("moment data") {
  auto md = moment_data(CoefficientModel::pure(4, 0), 1);
  CHECK(md.kappa == doctest::Approx(2.0));
  CHECK(md.kappa_prime == 2);
  CHECK(md.power == 4);
  CHECK_FALSE(md.borderline);
  CHECK(moment_data(CoefficientModel::pure(4, 0), 2).borderline);
  CHECK_THROWS_AS(moment_data(CoefficientModel::pure(2, 0.75), 1), Error);
  auto perturbed = CoefficientModel::bounded(4, 0, 0.1, 1, 0, 1, 1.5);
  CHECK(moment_data(perturbed, 1, 0.3).kappa == doctest::Approx(2.3));
}

TEST_CASE("L^p-L^q rates") {
  auto m = CoefficientModel::pure(2, 0.75);
  auto r2 = lp_lq_rate(m, 2.0, 3);
  CHECK(r2.decay_exponent == doctest::Approx(-1.0));
  CHECK(r2.sobolev_order == doctest::Approx(0.0));
  CHECK(r2.q == doctest::Approx(2.0));
  auto r = lp_lq_rate(m, 6.0 / 5.0, 3);
  CHECK(r.q == doctest::Approx(6.0));
  CHECK(r.decay_exponent == doctest::Approx(-5.0 / 3.0));
  CHECK(r.sobolev_order == doctest::Approx(2.0));
  CHECK_THROWS_AS(lp_lq_rate(m, 1.0, 3), Error);
  try {
    lp_lq_rate(CoefficientModel::pure(4, 0), 1.5, 1);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::regime_unsupported);
  }
}

TEST_CASE("improved bound preconditions") {
  auto g = RadialGrid::log_grid(1, 1e-3, 4.0, 33);
  CHECK_THROWS_AS(improved_u_bound(CoefficientModel::bounded(2, 2, 0.1, 1, 0, 1, 1.5), ZoneConfig{1.0},
                                   DataSpec::gaussian(1), g),
                  Error);
}

TEST_CASE("scattering residual is linear and vanishes for free waves") {
  auto g = RadialGrid::log_grid(1, 0.2, 1.8, 33);
  ScatteringOptions o;
  auto d = DataSpec::ring(1.0, 0.8);
  auto m = CoefficientModel::example_bounded();
  ZoneConfig z{1.0};
  auto a = scattering_residual(m, z, d, g, 1e3, o);
  auto b = scattering_residual(m, z, d.scaled(3.0), g, 1e3, o);
  for (size_t i = 0; i < a.times.size(); ++i) {
    CHECK(b.residual_dt[i] == doctest::Approx(3 * a.residual_dt[i]).epsilon(1e-6));
    CHECK(b.residual_grad[i] == doctest::Approx(3 * a.residual_grad[i]).epsilon(1e-6));
  }
  auto f = scattering_residual(CoefficientModel::pure(0, 0), z, d, g, 1e3, o);
  for (size_t i = 0; i < f.times.size(); ++i) {
    CHECK(f.residual_dt[i] == 0.0);
    CHECK(f.residual_grad[i] == 0.0);
  }
  CHECK_THROWS_AS(scattering_residual(CoefficientModel::pure(4, 0), z, d, g, 1e3, o), Error);
}

TEST_CASE("data json") {
  auto d = data_from_json(to_json(DataSpec::ring(2.0, 0.5, 1.0, 0.3)));
  CHECK(d.kind == DataKind::ring);
  CHECK(d.rho == 2.0);
  CHECK(d.a1 == 0.3);
  CHECK_THROWS_AS(data_from_json(nlohmann::json{{"kind", "ring"}, {"radius", 1.0}}), Error);
}

}
