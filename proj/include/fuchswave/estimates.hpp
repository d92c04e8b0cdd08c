#pragma once

// Frequency-space experiments: energy traces over a radial grid, decay fits,
// sharpness limits, moment data, modified scattering and rate predictions.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/linalg.hpp"
#include "fuchswave/modal.hpp"
#include "fuchswave/parallel.hpp"
#include "fuchswave/zones.hpp"

namespace fuchswave {

// |xi| samples, log-spaced, with trapezoid weights in ln r times the surface
// measure omega_n / (2 pi)^n, so sum w |f|^2 ~ ||f||^2_{L^2(R^n)} by Plancherel
struct RadialGrid {
  int n = 1;
  std::vector<double> xi, w;

  static RadialGrid log_grid(int n, double xi_min = 1e-4, double xi_max = 64.0, int points = 256);
  double norm(const std::vector<double>& abs2) const;
  // same sum on every other point, for the resolution check
  double norm_coarse(const std::vector<double>& abs2) const;
};

double sphere_area(int n);

enum class DataKind { zero, gaussian, ring, lowpass, moment, file };
const char* data_kind_name(DataKind k);

// u0^ = a0 p(|xi|), u1^ = a1 p(|xi|) for a radial profile p
struct DataSpec {
  DataKind kind = DataKind::gaussian;
  double a0 = 1.0, a1 = 0.0;
  double width = 1.0;      // gaussian width / ring half-width
  double rho = 0.0;        // ring centre
  double cutoff = 0.25;    // lowpass and moment: support |xi| <= cutoff
  int moment_power = 0;    // moment: |xi|^power zero at the origin
  std::string path;        // file: csv xi,u0_re,u0_im,u1_re,u1_im
  std::vector<double> file_xi;
  std::vector<cd> file_u0, file_u1;

  static DataSpec gaussian(double width, double a0 = 1.0, double a1 = 0.0);
  static DataSpec ring(double rho, double half_width, double a0 = 1.0, double a1 = 0.0);
  static DataSpec lowpass(double cutoff, double a0 = 1.0, double a1 = 0.0);
  static DataSpec moment(int power, double cutoff, double a0 = 1.0, double a1 = 0.0);
  static DataSpec from_file(const std::string& path);

  double profile(double xi) const;
  std::pair<cd, cd> at(double xi) const;
  // smallest / largest |xi| where the data can be non-zero
  double support_min() const;
  double support_max() const;
  DataSpec scaled(double c) const;
};

nlohmann::json to_json(const DataSpec& d);
DataSpec data_from_json(const nlohmann::json& j);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> values;  // ||U(t, .)||
  std::vector<double> weighted_u, grad_u, u_t, u;  // ||(1+t)^{-1}u||, ||grad u||, ||u_t||, ||u||
  std::vector<double> sup_amplitude;               // max over the grid of |U(t, xi)|
  DataSpec data;
  int n = 1;
};

struct TraceOptions {
  double tol = 1e-9;
  int threads = 0;  // 0: hardware concurrency (or FUCHSWAVE_THREADS)
  bool check_resolution = true;
  double resolution_tol = 1e-3;
};

EnergyTrace energy_trace(const CoefficientModel& model, const ZoneConfig& zone, const DataSpec& data,
                         const RadialGrid& grid, const std::vector<double>& times,
                         const TraceOptions& opt = {});

struct FitOptions {
  double t_lo = 1e2, t_hi = 1e4;
  double time_shift = 1.0;     // regress against ln(t + shift)
  double min_decades = 2.0;
  double harmonic_freq = 0.0;  // angular frequency in ln t; used if the window spans a period
  double tol = 0.05;
};

struct DecayFit {
  double exponent = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double rms_residual = 0.0;
  double predicted = 0.0;
  bool harmonics = false;
  bool pass = false;
  int samples = 0;
};

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double predicted, const FitOptions& opt = {});

nlohmann::json to_json(const DecayFit& f);

// exponent of tau^mu ln(tau) seen by a log-log fit over the window
double double_root_prediction(double mu, double t_lo, double t_hi, double time_shift = 1.0);

// predicted dissipative-zone exponent of |E(t,0,xi)| for fits over the window
double diss_prediction(const CoefficientModel& model, double t_lo, double t_hi);

struct SharpnessResult {
  std::vector<double> times, values;  // lambda^2 (|grad u|^2 + |u_t|^2)
  double variation = 0.0;             // (max - min)/mean over the last decade
  double limit = 0.0;
  bool pass = false;
};

SharpnessResult sharpness_limit(const CoefficientModel& model, const ZoneConfig& zone,
                                const DataSpec& data, const RadialGrid& grid, double horizon,
                                const TraceOptions& opt = {});

struct MomentData {
  double kappa = 0.0;
  int kappa_prime = 0;  // [kappa']
  int power = 0;        // 2 ceil(([kappa'] + 1)/2)
  bool borderline = false;
  double weighted_norm = 0.0;  // int |xi|^{-2 kappa} |U(0,xi)|^2 near 0
};

MomentData moment_data(const CoefficientModel& model, int n, double slack = 0.1);

struct MomentExperiment {
  MomentData moments;
  DataSpec generic, moment;
  EnergyTrace generic_trace, moment_trace;
  DecayFit generic_fit, moment_fit;          // sup amplitude
  DecayFit generic_l2_fit, moment_l2_fit;    // ||U||, reported only
  bool pass = false;
};

MomentExperiment moment_experiment(const CoefficientModel& model, const ZoneConfig& zone, int n,
                                   const FitOptions& fit = {}, const TraceOptions& opt = {},
                                   double slack = 0.1);

// shared by scattering and L^p-L^q: sigma = 1 and b0(b0-2) <= 4 m0,
// or sigma in (1,2] and b0(b0-2) <= 4 m0 < (b0-1)^2
bool l2_hypotheses(const CoefficientModel& model);

struct WPlusSample {
  double xi = 0.0;
  Matrix2cd W = Matrix2cd::Identity();
  double last_increment = 0.0;
  double t_reached = 0.0;
  bool converged = false;
};

struct ScatteringOptions {
  double eps = 0.1;  // samples must have |xi| >= eps
  double t_first = 100.0;
  double horizon = 1.6e5;
  double tol = 1e-5;
  double oracle_tol = 1e-11;
  int threads = 0;
};

// W_+(xi) = lim lambda(t) E_fr(t,0,xi)^{-1} E(t,0,xi) in the variables (|xi| u, D_t u).
// E(t,0) = E(t,s) E(s,0) with s hyperbolic; E(s,0) from the oracle, E(t,s) from the
// WKB representation, whose N_k(t) -> I factor is dropped so the limit is Q_k(inf, s).
std::vector<WPlusSample> scattering_operator(const CoefficientModel& model, const ZoneConfig& zone,
                                             const std::vector<double>& xi,
                                             const ScatteringOptions& opt = {});

struct ScatteringResidual {
  std::vector<double> times, residual_dt, residual_grad;
  std::vector<WPlusSample> W_plus;
  bool monotone = false;
  double final_ratio_dt = 0.0, final_ratio_grad = 0.0;
  bool pass = false;
};

ScatteringResidual scattering_residual(const CoefficientModel& model, const ZoneConfig& zone,
                                       const DataSpec& data, const RadialGrid& grid,
                                       double horizon, const ScatteringOptions& opt = {});

struct LpLqRate {
  double decay_exponent = 0.0;
  double sobolev_order = 0.0;
  double q = 2.0;
};

LpLqRate lp_lq_rate(const CoefficientModel& model, double p, int n);

// ||u(t)||_{L^2} fit against 1 + Re mu_+
DecayFit improved_u_bound(const CoefficientModel& model, const ZoneConfig& zone,
                          const DataSpec& data, const RadialGrid& grid,
                          const FitOptions& fit = {}, const TraceOptions& opt = {});

}  // namespace fuchswave
