#pragma once

#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/barycentric_rational.hpp>
#include <nlohmann/json.hpp>

#include "fuchswave/jet.hpp"

namespace fuchswave {

enum class Family { pure_scale_invariant, bounded_perturbation, log_perturbation, tabulated };

const char* family_name(Family f);

// Tabulated coefficient: samples (t, value). Internally g = (1+t)^power * value
// is interpolated in x = ln(1+t), so b ~ g/(1+t), m ~ g/(1+t)^2.
class TabulatedCurve {
 public:
  TabulatedCurve(std::vector<double> t, std::vector<double> v, double power);
  static std::shared_ptr<const TabulatedCurve> from_csv(const std::string& path, double power);
  double operator()(double t) const;
  const std::vector<double>& times() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  double power() const { return power_; }

 private:
  std::vector<double> t_, v_, x_, g_;
  double power_;
  std::shared_ptr<boost::math::barycentric_rational<double>> interp_;
};

struct CoefficientModel {
  Family family = Family::pure_scale_invariant;
  double b0 = 0.0;
  double m0 = 0.0;
  double sigma = 1.0;
  int ell = 4;
  // bounded_perturbation: h_j(t) = c_j (1+t)^{-p_j}
  double c1 = 0.0, p1 = 1.0, c2 = 0.0, p2 = 1.0;
  // log_perturbation
  double b1 = 0.0, m1 = 0.0, gamma = 1.0;
  // tabulated
  std::shared_ptr<const TabulatedCurve> tab_b, tab_m;
  std::string tab_b_path, tab_m_path;

  static CoefficientModel pure(double b0, double m0);
  static CoefficientModel bounded(double b0, double m0, double c1, double p1, double c2,
                                  double p2, double sigma = 1.0);
  static CoefficientModel log_perturbation(double b0, double m0, double b1, double m1,
                                           double gamma, double sigma);
  static CoefficientModel tabulated(double b0, double m0, std::shared_ptr<const TabulatedCurve> b,
                                    std::shared_ptr<const TabulatedCurve> m, double sigma = 1.0);
  // the bounded-perturbation instance used throughout the tests: b0=2, m0=3/4
  static CoefficientModel example_bounded();

  bool trivial() const;  // b = m = 0 identically

  // jets of b and m at t (derivatives up to `order`); closed form where available
  RJet b_jet(double t, int order) const;
  RJet m_jet(double t, int order) const;
  double b(double t) const { return b_jet(t, 0).value(); }
  double m(double t) const { return m_jet(t, 0).value(); }
};

std::pair<double, double> eval_coefficients(const CoefficientModel& model, double t, int order);

// (1+t) b - b0 and (1+t)^2 m - m0, written so that the scale-invariant
// part cancels exactly
double b_deviation(const CoefficientModel& m, double t);
double m_deviation(const CoefficientModel& m, double t);

// 0.5 * int_0^t b
double log_lambda(const CoefficientModel& model, double t);
double eval_lambda(const CoefficientModel& model, double t);

enum class Regime { complex_pair, double_root, real_small_muplus, real_large_muplus };
const char* regime_name(Regime r);

struct RegimeClassification {
  std::complex<double> mu_plus, mu_minus;
  Regime regime;
  double dominant_exponent;
  bool fundamental_applies;   // 4m0 != (b0-1)^2
  bool log_perturb_applies;   // 4m0 <  (b0-1)^2
  bool rem_hyp_dominant;  // b0(b0-2) < 4m0
};

RegimeClassification classify_regime(double b0, double m0);
inline RegimeClassification classify_regime(const CoefficientModel& m) {
  return classify_regime(m.b0, m.m0);
}

struct HypothesisGrid {
  int points = 400;
  double tail_tol = 1e-3;
};

struct HypothesisReport {
  std::vector<double> times;
  // hyp1_b[k][i] = (1+t)^{k+1}|d^k b|, hyp1_m[k][i] = (1+t)^{k+2}|d^k m|
  std::vector<std::vector<double>> hyp1_b, hyp1_m;
  std::vector<double> hyp1_sup;
  // cumulative int_1^T |tau b - b0|^sigma dtau/tau and the m analogue, tau = 1+t
  std::vector<double> hyp2_b, hyp2_m;
  double tail_b = 0.0, tail_m = 0.0;            // raw increments over [T/2, T]
  double extrapolated_b = 0.0, extrapolated_m = 0.0;  // fitted remaining tail beyond T
  bool hyp1_pass = false;
  bool hyp2_pass = false;
};

HypothesisReport check_hypotheses(const CoefficientModel& model, double T,
                                  const HypothesisGrid& grid = {});

enum class ZoneLabel { diss, hyp_small, hyp_large };
const char* zone_name(ZoneLabel z);

double predicted_decay(const CoefficientModel& model, ZoneLabel zone);

nlohmann::json to_json(const CoefficientModel& m);
CoefficientModel model_from_json(const nlohmann::json& j);

}  // namespace fuchswave
