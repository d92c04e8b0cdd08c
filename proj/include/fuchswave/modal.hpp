#pragma once

#include <string>
#include <vector>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/linalg.hpp"
#include "fuchswave/zones.hpp"

namespace fuchswave {

// diss_system: D_t U = A~ U with U = (N/(1+t) u, D_t u)
// fuchs_form:  (1+t) d_t U = (A + R) U, same U
// hyp_system:  D_t U = A U with U = (|xi| u, D_t u)
// unweighted:  d_t Y = A_u Y with Y = (u, u_t)
enum class SystemForm { diss_system, fuchs_form, hyp_system, unweighted };
enum class Provenance { oracle, representation, levinson };

const char* form_name(SystemForm f);
const char* provenance_name(Provenance p);

struct ModalSystem {
  CoefficientModel model;
  ZoneConfig zone;
  double xi = 0.0;
  SystemForm form = SystemForm::diss_system;
};

Matrix2cd system_matrix(const ModalSystem& sys, double t);
Matrix2cd fuchs_constant(const ModalSystem& sys);
Matrix2cd fuchs_remainder(const ModalSystem& sys, double t);

struct OracleOptions {
  double tol = 1e-10;
  // rerun at tol/2 on 10 log-spaced checkpoints and report the discrepancy
  bool cross_check = false;
};

struct FundamentalMatrix {
  Matrix2cd E = Matrix2cd::Identity();
  double s = 0.0, t = 0.0, xi = 0.0;
  Provenance provenance = Provenance::oracle;
  double estimated_error = 0.0;
};

FundamentalMatrix integrate_fundamental(const ModalSystem& sys, double s, double t,
                                        const OracleOptions& opt = {});
// E(t_i, s) for increasing times t_i >= s, one integration pass
std::vector<FundamentalMatrix> integrate_fundamental_path(const ModalSystem& sys, double s,
                                                          const std::vector<double>& times,
                                                          const OracleOptions& opt = {});

struct MicroEnergy {
  Vector2cd value = Vector2cd::Zero();
  double t = 0.0, xi = 0.0;
  cd u_hat = 0.0, ut_hat = 0.0;
};

// U(0) = (h(0) u0, -i u1); evolved through (u, u_t) and re-weighted with h(t)
MicroEnergy evolve_micro_energy(const ModalSystem& sys, cd u0_hat, cd u1_hat, double t,
                                const OracleOptions& opt = {});
std::vector<MicroEnergy> evolve_micro_energy_path(const ModalSystem& sys, cd u0_hat, cd u1_hat,
                                                  const std::vector<double>& times,
                                                  const OracleOptions& opt = {});

double check_cocycle(const ModalSystem& sys, double s, double r, double t,
                     const OracleOptions& opt = {});

std::vector<double> log_spaced(double a, double b, int n);

void write_trajectory_csv(const std::string& path, const std::vector<FundamentalMatrix>& path_);

}  // namespace fuchswave
