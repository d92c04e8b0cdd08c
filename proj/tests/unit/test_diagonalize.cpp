#include <doctest.h>

#include <cmath>

#include "fuchswave/diagonalize.hpp"
#include "fuchswave/error.hpp"

using namespace fuchswave;

TEST_SUITE("diagonalize") {

TEST_CASE("preliminary transform conjugates the hyperbolic system") {
  auto m = CoefficientModel::example_bounded();
  for (double t : {0.0, 5.0, 300.0})
    for (double xi : {0.3, 2.0}) {
      auto p = preliminary_transform(m, t, xi);
      ModalSystem sys{m, ZoneConfig{1.0}, xi, SystemForm::hyp_system};
      Matrix2cd lhs = p.Minv * system_matrix(sys, t) * p.M;
      Matrix2cd rhs = p.D + p.B + p.C;
      CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());
      CHECK((p.M * p.Minv - Matrix2cd::Identity()).norm() <= 1e-15);
    }
  CHECK_THROWS_AS(preliminary_transform(m, 1.0, 0.0), Error);
}

TEST_CASE("free propagator is unitary and a cocycle") {
  for (double xi : {1e-3, 0.5, 40.0}) {
    Matrix2cd e = E0(17.0, 2.0, xi);
    CHECK((e.adjoint() * e - Matrix2cd::Identity()).norm() <= 1e-12);
    CHECK((E0(17.0, 5.0, xi) * E0(5.0, 2.0, xi) - e).norm() <= 1e-12);
  }
}

TEST_CASE("first step closed form and commutator equation") {
  auto m = CoefficientModel::example_bounded();
  DiagonalizationStage st(m, 1, ZoneConfig{1.0});
  double t = 4.0, xi = 1.7;
  auto sp = st.at(t, xi);
  Matrix2cd N1 = sp.N_parts[0].value();
  double b = m.b(t);
  Matrix2cd want;
  want << 0.0, -1.0, 1.0, 0.0;
  want *= kI * b / (4 * xi);
  CHECK((N1 - want).norm() <= 1e-14);
  auto p = preliminary_transform(m, t, xi);
  Matrix2cd F0 = sp.F_parts[0].value();
  Matrix2cd comm = p.D * N1 - N1 * p.D;
  CHECK((comm - (F0 - p.B)).norm() <= 1e-14);
  CHECK(std::abs(F0(0, 1)) + std::abs(F0(1, 0)) == 0.0);
}

TEST_CASE("operator identity holds for k = 1, 2, 3") {
  auto m = CoefficientModel::example_bounded();
  m.ell = 6;
  for (int k = 1; k <= 3; ++k) {
    DiagonalizationStage st(m, k, ZoneConfig{1.0});
    for (double t : {1.0, 30.0})
      for (double xi : {0.5, 4.0}) CHECK(st.identity_residual(t, xi) <= 1e-10);
  }
}

TEST_CASE("R_k shrinks with k") {
  auto m = CoefficientModel::example_bounded();
  m.ell = 6;
  double t = 50.0, xi = 1.0;
  double prev = 1e300;
  for (int k = 1; k <= 3; ++k) {
    double r = DiagonalizationStage(m, k, ZoneConfig{1.0}).R_k(t, xi).norm();
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("too many steps") {
  auto m = CoefficientModel::pure(2, 0.75);
  try {
    DiagonalizationStage st(m, m.ell, ZoneConfig{1.0});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::k_too_large);
  }
}

TEST_CASE("zone constant") {
  CHECK(min_zone_constant(DiagonalizationStage(CoefficientModel::pure(0, 0), 2, ZoneConfig{1.0})) == 0.0);
  double N = min_zone_constant(DiagonalizationStage(CoefficientModel::example_bounded(), 2, ZoneConfig{1.0}));
  CHECK(N > 0.0);
  CHECK(N < 2.0);
}

TEST_CASE("representation against the oracle") {
  auto m = CoefficientModel::example_bounded();
  ZoneConfig z{2.0};
  DiagonalizationStage st(m, 2, z);
  double pts[][3] = {{0, 400, 2.5}, {3, 90, 0.9}, {10, 2000, 6.0}};
  for (auto& p : pts) {
    auto r = assemble_representation(st, p[0], p[1], p[2]);
    auto E = integrate_fundamental(ModalSystem{m, z, p[2], SystemForm::hyp_system}, p[0], p[1],
                                   {1e-12, false});
    CHECK((r.E.E - E.E).norm() <= 1e-6 * E.E.norm());
    CHECK(std::abs(r.q.Q.determinant()) >= std::exp(-2 * r.q.C_total));
    CHECK(r.E.provenance == Provenance::representation);
  }
}

TEST_CASE("Peano-Baker and ODE agree for Q") {
  auto m = CoefficientModel::example_bounded();
  DiagonalizationStage st(m, 2, ZoneConfig{1.0});
  auto a = q_propagator(st, 1.0, 200.0, 1.5);
  auto b = q_propagator(st, 1.0, 200.0, 1.5, 0);
  CHECK_FALSE(a.used_ode);
  CHECK(b.used_ode);
  CHECK((a.Q - b.Q).norm() <= 1e-8);
}

TEST_CASE("Q limit is independent of the schedule") {
  DiagonalizationStage st(CoefficientModel::example_bounded(), 2, ZoneConfig{1.0});
  auto L1 = q_limit(st, 0.0, 2.0, 1e-8);
  auto L2 = q_limit(st, 0.0, 2.0, 1e-8, 150.0, 3.0);
  CHECK((L1.Q - L2.Q).norm() <= 1e-6);
}

TEST_CASE("symbol audit of B^(2)") {
  DiagonalizationStage st(CoefficientModel::example_bounded(), 2, ZoneConfig{1.0});
  AuditGrid g;
  g.nt = 10;
  g.nr = 6;
  auto a = audit_symbol(st.symbol("B", 2), ZoneConfig{1.0}, g);
  CHECK(a.pass);
}

}
