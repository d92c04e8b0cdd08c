#include <doctest.h>

#include <cmath>
#include <random>

#include "fuchswave/error.hpp"
#include "fuchswave/spectral.hpp"

using namespace fuchswave;

TEST_SUITE("spectral") {

TEST_CASE("fft round trip in 1, 2 and 3 dimensions") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int n = 1; n <= 3; ++n) {
    BoxGrid g{n, n == 3 ? 16 : 64, 10.0};
    BoxFft fft(g);
    std::vector<std::complex<double>> a(g.total());
    for (auto& v : a) v = {nd(rng), nd(rng)};
    CHECK(fft.roundtrip_error(a) <= 1e-13);
  }
}

TEST_CASE("forward transform of a plane wave") {
  BoxGrid g{1, 32, 2 * std::acos(-1.0)};
  BoxFft fft(g);
  std::vector<std::complex<double>> a(32);
  for (int j = 0; j < 32; ++j) a[j] = std::exp(std::complex<double>(0, 3.0 * 2 * std::acos(-1.0) * j / 32));
  fft.forward(a);
  for (int j = 0; j < 32; ++j) CHECK(std::abs(a[j]) == doctest::Approx(j == 3 ? 32.0 : 0.0));
}

TEST_CASE("lattice indices") {
  CHECK(lattice_index(0, 8) == 0);
  CHECK(lattice_index(4, 8) == 4);
  CHECK(lattice_index(5, 8) == -3);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((BoxGrid{1, 100, 1.0}.validate()), Error);
  CHECK_THROWS_AS((BoxGrid{4, 16, 1.0}.validate()), Error);
  CHECK_THROWS_AS((BoxGrid{3, 512, 1.0}.validate()), Error);
  CHECK_THROWS_AS(box_from_json(nlohmann::json{{"n", 1}, {"cells", 4}}), Error);
  auto g = box_from_json(nlohmann::json{{"kind", "box"}, {"n", 2}, {"points", 32}, {"box_length", 5.0}});
  CHECK(g.total() == 1024);
}

TEST_CASE("free standing waves keep their energy") {
  BoxGrid g{1, 256, 2 * std::acos(-1.0) * 20};
  SpectralOptions o;
  o.tol = 1e-11;
  auto tr = spectral_simulate(CoefficientModel::pure(0, 0), ZoneConfig{1.0}, DataSpec::gaussian(1.0), g,
                              {0.0, 5.0, 50.0}, o);
  double e0 = std::hypot(tr.grad_u[0], tr.u_t[0]);
  for (size_t i = 0; i < tr.times.size(); ++i)
    CHECK(std::abs(std::hypot(tr.grad_u[i], tr.u_t[i]) - e0) <= 1e-8 * e0);
  CHECK(tr.plancherel_error <= 1e-12);
}

TEST_CASE("box and radial quadrature agree") {
  auto m = CoefficientModel::pure(2, 0.75);
  ZoneConfig z{1.0};
  std::vector<double> times = {0.0, 3.0, 30.0};
  auto data = DataSpec::gaussian(1.0);
  BoxGrid g{1, 1024, 2 * std::acos(-1.0) * 100};
  auto box = spectral_simulate(m, z, data, g, times);
  auto rad = energy_trace(m, z, data, RadialGrid::log_grid(1, 1e-4, 8.0, 257), times);
  CHECK(plancherel_gap(box, rad) <= 0.005);

  BoxGrid g2{2, 128, 2 * std::acos(-1.0) * 16};
  auto box2 = spectral_simulate(m, z, data, g2, {0.0, 3.0});
  auto rad2 = energy_trace(m, z, data, RadialGrid::log_grid(2, 1e-4, 8.0, 257), {0.0, 3.0});
  CHECK(plancherel_gap(box2, rad2) <= 0.005);
  CHECK(box2.evolved_modes <= box2.distinct_modes);
}

TEST_CASE("coarse boxes warn and strict mode refuses") {
  BoxGrid g{1, 64, 10.0};
  auto m = CoefficientModel::pure(2, 0.75);
  auto tr = spectral_simulate(m, ZoneConfig{1.0}, DataSpec::lowpass(0.25), g, {0.0, 100.0});
  CHECK(tr.warnings.size() == 1);
  SpectralOptions o;
  o.strict = true;
  try {
    spectral_simulate(m, ZoneConfig{1.0}, DataSpec::lowpass(0.25), g, {0.0, 100.0}, o);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resolution);
  }
  CHECK_FALSE(box_resolves_zone(g, ZoneConfig{1.0}, 100.0));
}

}
