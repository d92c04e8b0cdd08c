#pragma once

// Systems tau d/dtau V = (D(tau) + R(tau)) V on tau >= 1 and their
// asymptotic integration.

#include <functional>
#include <string>
#include <vector>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/linalg.hpp"
#include "fuchswave/quadrature.hpp"
#include "fuchswave/zones.hpp"

namespace fuchswave {

using DiagFn = std::function<VectorXcd(double tau)>;
using MatFn = std::function<MatrixXcd(double tau)>;

struct FuchsSystem {
  int d = 2;
  DiagFn mu;  // diagonal of D
  MatFn R;
  std::string parameter_set;
  std::vector<double> breakpoints;  // tau where R may jump
};

FuchsSystem constant_fuchs(const VectorXcd& mu, MatFn R, std::string parameter_set = "");

// Fuchs form of the dissipative-zone system at fixed |xi|, with constant A
// diagonalised: U = P V, D = diag(mu_-, mu_+). R is extended by zero where
// tau |xi| > N when cut_at_zone is set.
struct ModalFuchs {
  FuchsSystem sys;
  Matrix2cd P, Pinv;
  double tau_theta;  // 1 + theta(|xi|)
};
ModalFuchs diagonalized_modal_fuchs(const CoefficientModel& model, const ZoneConfig& zone,
                                    double xi, bool cut_at_zone = true);

enum class Alternative { first, second, both, inconclusive };
const char* alternative_name(Alternative a);

struct DichotomyVerdict {
  Alternative alternative = Alternative::inconclusive;
  bool strong = false;
  double C_minus = 0.0;  // sampled sup of Re(mu_i - mu_j)
  double C_plus = 0.0;   // sampled inf
  std::vector<double> tau, integral;  // int_1^tau Re(mu_i - mu_j) ds/s (first sample)
};

DichotomyVerdict check_dichotomy(const std::vector<FuchsSystem>& samples, int i, int j, double T,
                                 int points = 400);

struct LevinsonOptions {
  double tol = 1e-13;
  double panel_width = 0.25;
  int max_iter = 400;
};

struct LevinsonSolution {
  int k = 0;
  int d = 2;
  PanelGrid grid{std::vector<double>{0.0, 1.0}};
  std::vector<VectorXcd> Z;   // V exp(-int mu_k) at nodes
  std::vector<cd> phase;      // int_{t0}^{tau} mu_k ds/s at nodes
  std::vector<double> residual_tau, residual;  // |Z - e_k|
  int iterations = 0;
  std::vector<double> increments;
  double observed_rate = 0.0;
  double rate_bound = 0.0;
  double tail = 0.0;
  double C_minus = 0.0, C_plus = 0.0;
  double truncation_bound = 0.0;
  double ode_residual = 0.0;  // max |tau dV - (D+R)V| / |V| on nodes

  VectorXcd Z_at(double tau) const;
  VectorXcd V(double tau) const;
  double residual_at(double tau) const;
};

LevinsonSolution levinson_solve(const FuchsSystem& sys, int k, double t0, double T,
                                const LevinsonOptions& opt = {});

struct BasisFundamental {
  std::vector<LevinsonSolution> solutions;
  double s = 1.0;
  MatrixXcd Xs_inv;
  double C = 0.0;
  double max_re_mu = 0.0;

  MatrixXcd X(double tau) const;
  MatrixXcd E(double tau) const;  // E_V(tau, s)
  double bound(double tau) const { return C * std::pow(tau / s, max_re_mu); }
};

BasisFundamental fundamental_from_basis(const std::vector<LevinsonSolution>& sols, double s);

// direct integration of tau dE/dtau = (D + R) E, used as the oracle
MatrixXcd fuchs_propagator(const FuchsSystem& sys, double s, double t, double tol = 1e-11);

struct ScalingReport {
  std::vector<double> lambdas, ratios;
  double worst = 0.0;
  double worst_over_first = 0.0;
};
ScalingReport scaling_uniformity(const FuchsSystem& sys, const std::vector<double>& lambdas,
                                 double s, double t);

struct HWTransform {
  PanelGrid grid{std::vector<double>{0.0, 1.0}};
  std::vector<MatrixXcd> N, F, B, R, R1;  // at nodes
  std::vector<int> permutation;  // mu order by increasing real part
  std::vector<std::vector<int>> backward;  // 1 where n_ij uses the backward integral
  double valid_from = 0.0;
  double identity_residual = 0.0;
  double truncation_bound = 0.0;
  double sigma_integral = 0.0;
  FuchsSystem transformed;

  MatrixXcd N_at(double tau) const;
  MatrixXcd R1_at(double tau) const;
  std::vector<double> taus() const;
};

HWTransform hartman_wintner(const FuchsSystem& sys, double sigma, double t0, double T,
                            double panel_width = 0.25);

// samples tau -> |M(tau)| on grid nodes inside [a, b] and their dtau/tau integral
double log_measure_integral(const PanelGrid& g, const std::vector<double>& f, double a, double b);

}  // namespace fuchswave
