#include <doctest.h>

#include <cmath>
#include <limits>

#include "fuchswave/error.hpp"
#include "fuchswave/zones.hpp"

using namespace fuchswave;

TEST_SUITE("zones") {

TEST_CASE("theta is where (1+t) xi meets N") {
  ZoneConfig z{2.0};
  CHECK(theta(z, 1e-3) == doctest::Approx(1999.0));
  CHECK(theta(z, 2.0) == 0.0);
  CHECK(theta(z, 5.0) == 0.0);
  CHECK(std::isinf(theta(z, 0.0)));
  CHECK_THROWS_AS(theta(z, -1.0), Error);
}

TEST_CASE("zone labels") {
  ZoneConfig z{1.0};
  CHECK(classify(z, 10.0, 0.05) == ZoneLabel::diss);
  CHECK(classify(z, 9.0, 0.1) == ZoneLabel::diss);  // boundary belongs to the dissipative zone
  CHECK(classify(z, 30.0, 0.05) == ZoneLabel::hyp_small);
  CHECK(classify(z, 0.0, 3.0) == ZoneLabel::hyp_large);
}

TEST_CASE("chi is a smooth step") {
  CHECK(chi(0.3) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(2.0) == 0.0);
  CHECK(chi(1.5) == doctest::Approx(0.5));
  double prev = 1.0;
  for (double r = 1.0; r <= 2.0; r += 0.01) {
    CHECK(chi(r) <= prev + 1e-15);
    prev = chi(r);
  }
  // jet derivative against a central difference
  RJet r = RJet::variable(1, 1.3);
  double h = 1e-6;
  CHECK(chi(r).derivative(1) == doctest::Approx((chi(1.3 + h) - chi(1.3 - h)) / (2 * h)).epsilon(1e-6));
  // all derivatives vanish at the ends
  CHECK(chi(RJet::variable(3, 1.0)).derivative(2) == 0.0);
}

TEST_CASE("cutoffs form a partition") {
  ZoneConfig z{1.0};
  for (double t : {0.0, 0.4, 3.0, 100.0})
    for (double xi : {0.01, 0.3, 0.7, 1.4, 2.5}) {
      auto c = cutoffs(z, t, xi);
      CHECK(c.diss + c.hyp_small + c.hyp_large == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(c.diss >= 0.0);
      CHECK(c.hyp_small >= 0.0);
    }
}

TEST_CASE("micro weight limits") {
  ZoneConfig z{1.0};
  CHECK(micro_weight(z, 9.0, 0.01) == doctest::Approx(0.1));
  CHECK(micro_weight(z, 500.0, 0.01) == doctest::Approx(0.01));
  CHECK(micro_weight(z, 0.0, 3.0) == doctest::Approx(3.0));
}

TEST_CASE("zone json") {
  auto z = zone_from_json(nlohmann::json{{"N", 4.0}});
  CHECK(z.N == 4.0);
  CHECK(z.set_by == "config");
  CHECK_THROWS_AS(zone_from_json(nlohmann::json{{"N", -1.0}}), Error);
  CHECK_THROWS_AS(zone_from_json(nlohmann::json{{"M", 1.0}}), Error);
}

}
