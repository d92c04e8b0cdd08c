#include "fuchswave/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "fuchswave/error.hpp"

namespace fuchswave {

namespace {

constexpr double kE = 2.718281828459045235360287;

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::pure_scale_invariant: return "pure_scale_invariant";
    case Family::bounded_perturbation: return "bounded_perturbation";
    case Family::log_perturbation: return "log_perturbation";
    case Family::tabulated: return "tabulated";
  }
  return "?";
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::complex_pair: return "complex_pair";
    case Regime::double_root: return "double_root";
    case Regime::real_small_muplus: return "real_small_muplus";
    case Regime::real_large_muplus: return "real_large_muplus";
  }
  return "?";
}

const char* zone_name(ZoneLabel z) {
  switch (z) {
    case ZoneLabel::diss: return "diss";
    case ZoneLabel::hyp_small: return "hyp_small";
    case ZoneLabel::hyp_large: return "hyp_large";
  }
  return "?";
}

// ---------------------------------------------------------------- tabulated

TabulatedCurve::TabulatedCurve(std::vector<double> t, std::vector<double> v, double power)
    : t_(std::move(t)), v_(std::move(v)), power_(power) {
  if (t_.size() != v_.size() || t_.size() < 4)
    throw Error(ErrorKind::config, "tabulated coefficient needs at least 4 (t, value) rows");
  for (size_t i = 0; i < t_.size(); ++i) {
    if (t_[i] < 0 || (i > 0 && t_[i] <= t_[i - 1]))
      throw Error(ErrorKind::config, "tabulated times must be non-negative and increasing");
    x_.push_back(std::log1p(t_[i]));
    g_.push_back(std::pow(1.0 + t_[i], power_) * v_[i]);
  }
  interp_ = std::make_shared<boost::math::barycentric_rational<double>>(
      x_.data(), g_.data(), x_.size(), 3);
}

std::shared_ptr<const TabulatedCurve> TabulatedCurve::from_csv(const std::string& path,
                                                               double power) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::vector<double> t, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    double a, b;
    if (!(ss >> a >> b)) {
      if (t.empty()) continue;  // header row
      throw Error(ErrorKind::config, path + ":" + std::to_string(lineno) + ": expected t,value");
    }
    t.push_back(a);
    v.push_back(b);
  }
  return std::make_shared<TabulatedCurve>(std::move(t), std::move(v), power);
}

double TabulatedCurve::operator()(double t) const {
  double x = std::log1p(t);
  double g;
  if (x <= x_.front()) g = g_.front();
  else if (x >= x_.back()) g = g_.back();
  else g = (*interp_)(x);
  return g / std::pow(1.0 + t, power_);
}

// ------------------------------------------------------------ constructors

CoefficientModel CoefficientModel::pure(double b0, double m0) {
  CoefficientModel m;
  m.family = Family::pure_scale_invariant;
  m.b0 = b0;
  m.m0 = m0;
  return m;
}

CoefficientModel CoefficientModel::bounded(double b0, double m0, double c1, double p1, double c2,
                                           double p2, double sigma) {
  CoefficientModel m = pure(b0, m0);
  m.family = Family::bounded_perturbation;
  m.c1 = c1;
  m.p1 = p1;
  m.c2 = c2;
  m.p2 = p2;
  m.sigma = sigma;
  return m;
}

CoefficientModel CoefficientModel::log_perturbation(double b0, double m0, double b1, double m1,
                                                    double gamma, double sigma) {
  if (!(gamma > 0.5 && gamma <= 1.0))
    throw Error(ErrorKind::config, "log_perturbation needs gamma in (1/2, 1]");
  CoefficientModel m = pure(b0, m0);
  m.family = Family::log_perturbation;
  m.b1 = b1;
  m.m1 = m1;
  m.gamma = gamma;
  m.sigma = sigma;
  return m;
}

CoefficientModel CoefficientModel::tabulated(double b0, double m0,
                                             std::shared_ptr<const TabulatedCurve> b,
                                             std::shared_ptr<const TabulatedCurve> mm,
                                             double sigma) {
  CoefficientModel m = pure(b0, m0);
  m.family = Family::tabulated;
  m.tab_b = std::move(b);
  m.tab_m = std::move(mm);
  m.sigma = sigma;
  m.ell = 2;
  return m;
}

CoefficientModel CoefficientModel::example_bounded() {
  return bounded(2.0, 0.75, 0.5, 0.5, 0.5, 0.5, 1.0);
}

bool CoefficientModel::trivial() const {
  if (b0 != 0.0 || m0 != 0.0) return false;
  switch (family) {
    case Family::pure_scale_invariant: return true;
    case Family::bounded_perturbation: return c1 == 0.0 && c2 == 0.0;
    case Family::log_perturbation: return b1 == 0.0 && m1 == 0.0;
    case Family::tabulated: return false;
  }
  return false;
}

// ------------------------------------------------------------------- jets

namespace {

// central differences, h = max(1e-6 (1+t), 1e-8)
RJet fd_jet(const TabulatedCurve* c, double t, int order) {
  RJet r(order);
  if (!c) return r;
  double h = std::max(1e-6 * (1.0 + t), 1e-8);
  double f0 = (*c)(t);
  r.coeff_ref(0) = f0;
  if (order >= 1) {
    double fp = (*c)(t + h), fm = (*c)(t - h);
    r.coeff_ref(1) = (fp - fm) / (2 * h);
    if (order >= 2) r.coeff_ref(2) = 0.5 * (fp - 2 * f0 + fm) / (h * h);
  }
  return r;
}

}  // namespace

RJet CoefficientModel::b_jet(double t, int order) const {
  if (order > ell) throw Error(ErrorKind::unsupported_order, "derivative order exceeds ell");
  RJet tau = RJet::variable(order, 1.0 + t);
  switch (family) {
    case Family::pure_scale_invariant:
      return b0 / tau;
    case Family::bounded_perturbation:
      return (b0 + c1 * pow(tau, -p1)) / tau;
    case Family::log_perturbation: {
      RJet y = RJet::variable(order, kE + t);
      return b0 / tau + b1 / (y * pow(log(y), gamma));
    }
    case Family::tabulated:
      return fd_jet(tab_b.get(), t, order);
  }
  return RJet(order);
}

RJet CoefficientModel::m_jet(double t, int order) const {
  if (order > ell) throw Error(ErrorKind::unsupported_order, "derivative order exceeds ell");
  RJet tau = RJet::variable(order, 1.0 + t);
  switch (family) {
    case Family::pure_scale_invariant:
      return m0 / (tau * tau);
    case Family::bounded_perturbation:
      return (m0 + c2 * pow(tau, -p2)) / (tau * tau);
    case Family::log_perturbation: {
      RJet y = RJet::variable(order, kE + t);
      return m0 / (tau * tau) + m1 / (y * y * pow(log(y), gamma));
    }
    case Family::tabulated:
      return fd_jet(tab_m.get(), t, order);
  }
  return RJet(order);
}

std::pair<double, double> eval_coefficients(const CoefficientModel& model, double t, int order) {
  if (t < 0) throw Error(ErrorKind::precondition, "t must be non-negative");
  if (order < 0 || order > model.ell)
    throw Error(ErrorKind::unsupported_order,
                "order " + std::to_string(order) + " > ell " + std::to_string(model.ell));
  return {model.b_jet(t, order).derivative(order), model.m_jet(t, order).derivative(order)};
}

// ----------------------------------------------------------------- lambda

double log_lambda(const CoefficientModel& model, double t) {
  double L = std::log1p(t);
  switch (model.family) {
    case Family::pure_scale_invariant:
      return 0.5 * model.b0 * L;
    case Family::bounded_perturbation: {
      double pert = model.p1 == 0.0 ? model.c1 * L : model.c1 * -std::expm1(-model.p1 * L) / model.p1;
      return 0.5 * (model.b0 * L + pert);
    }
    case Family::log_perturbation: {
      double l = std::log(kE + t);
      double G = model.gamma == 1.0 ? std::log(l)
                                    : (std::pow(l, 1.0 - model.gamma) - 1.0) / (1.0 - model.gamma);
      return 0.5 * (model.b0 * L + model.b1 * G);
    }
    case Family::tabulated: {
      // composite Gauss on log-spaced panels; b varies on the scale 1+t
      using boost::math::quadrature::gauss;
      double x1 = L;
      int panels = std::max(1, int(std::ceil(x1 / 0.25)));
      double s = 0.0;
      for (int p = 0; p < panels; ++p) {
        double a = x1 * p / panels, c = x1 * (p + 1) / panels;
        s += gauss<double, 20>::integrate(
            [&](double x) { return model.b(std::expm1(x)) * std::exp(x); }, a, c);
      }
      return 0.5 * s;
    }
  }
  return 0.0;
}

double eval_lambda(const CoefficientModel& model, double t) {
  if (t == 0.0) return 1.0;
  if (model.family == Family::pure_scale_invariant) return std::pow(1.0 + t, 0.5 * model.b0);
  return std::exp(log_lambda(model, t));
}

// ----------------------------------------------------------------- regime

RegimeClassification classify_regime(double b0, double m0) {
  RegimeClassification r{};
  double d = (b0 - 1.0) * (b0 - 1.0);
  double four_m = 4.0 * m0;
  double c = -(b0 + 1.0) / 2.0;
  if (four_m > d) {
    double w = std::sqrt(four_m - d) / 2.0;
    r.mu_plus = {c, w};
    r.mu_minus = {c, -w};
    r.regime = Regime::complex_pair;
  } else if (four_m == d) {
    r.mu_plus = r.mu_minus = {c, 0.0};
    r.regime = Regime::double_root;
  } else {
    double w = std::sqrt(d - four_m) / 2.0;
    r.mu_plus = {c + w, 0.0};
    r.mu_minus = {c - w, 0.0};
    r.regime = four_m < b0 * (b0 - 2.0) ? Regime::real_large_muplus : Regime::real_small_muplus;
  }
  r.dominant_exponent = std::max(r.mu_plus.real(), -b0 / 2.0);
  r.fundamental_applies = four_m != d;
  r.log_perturb_applies = four_m < d;
  r.rem_hyp_dominant = b0 * (b0 - 2.0) < four_m;
  return r;
}

double predicted_decay(const CoefficientModel& model, ZoneLabel zone) {
  if (zone != ZoneLabel::diss) return -model.b0 / 2.0;
  auto c = classify_regime(model);
  if (model.sigma > 1.0 && !c.log_perturb_applies)
    throw Error(ErrorKind::regime_unsupported,
                "sigma > 1 requires 4 m0 < (b0-1)^2; no table entry for this cell");
  return c.mu_plus.real();
}

// ------------------------------------------------------------- hypotheses

double b_deviation(const CoefficientModel& m, double t) {
  double tau = 1.0 + t;
  switch (m.family) {
    case Family::pure_scale_invariant: return 0.0;
    case Family::bounded_perturbation: return m.c1 * std::pow(tau, -m.p1);
    case Family::log_perturbation:
      return m.b1 * tau / ((kE + t) * std::pow(std::log(kE + t), m.gamma));
    case Family::tabulated: return tau * m.b(t) - m.b0;
  }
  return 0.0;
}

double m_deviation(const CoefficientModel& m, double t) {
  double tau = 1.0 + t;
  switch (m.family) {
    case Family::pure_scale_invariant: return 0.0;
    case Family::bounded_perturbation: return m.c2 * std::pow(tau, -m.p2);
    case Family::log_perturbation: {
      double q = tau / (kE + t);
      return m.m1 * q * q / std::pow(std::log(kE + t), m.gamma);
    }
    case Family::tabulated: return tau * tau * m.m(t) - m.m0;
  }
  return 0.0;
}

namespace {

struct TailModel {
  bool convergent;
  double remaining;
};

// Fit the integrand on the last decade of x = ln tau to either exp(-p x)
// (power decay in tau) or x^{-q} (logarithmic decay) and decide whether
// the improper integral converges. Exponent margin 0.05.
TailModel extrapolate_tail(const std::vector<double>& x, const std::vector<double>& f) {
  double xe = x.back();
  std::vector<double> xs, lf;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] >= xe - std::log(10.0) && f[i] > 0) {
      xs.push_back(x[i]);
      lf.push_back(std::log(f[i]));
    }
  if (xs.size() < 3) return {true, 0.0};
  auto fit = [&](auto map) {
    double n = double(xs.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      double u = map(xs[i]);
      sx += u; sy += lf[i]; sxx += u * u; sxy += u * lf[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double icpt = (sy - slope * sx) / n;
    double rss = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      double e = lf[i] - icpt - slope * map(xs[i]);
      rss += e * e;
    }
    return std::pair<double, double>(slope, rss);
  };
  auto [sa, ra] = fit([](double u) { return u; });
  auto [sb, rb] = fit([](double u) { return std::log(u); });
  double fe = f.back();
  if (ra <= rb) {
    double p = -sa;
    if (p > 0.05) return {true, fe / p};
    return {false, std::numeric_limits<double>::infinity()};
  }
  double q = -sb;
  if (q > 1.05) return {true, fe * xe / (q - 1.0)};
  return {false, std::numeric_limits<double>::infinity()};
}

}  // namespace

HypothesisReport check_hypotheses(const CoefficientModel& model, double T,
                                  const HypothesisGrid& grid) {
  if (!(T > 1.0)) throw Error(ErrorKind::precondition, "horizon must exceed 1");
  using boost::math::quadrature::gauss;
  HypothesisReport rep;
  int n = std::max(grid.points, 16);
  double xe = std::log1p(T);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = xe * i / (n - 1);

  int kmax = model.ell;
  rep.hyp1_b.assign(kmax + 1, {});
  rep.hyp1_m.assign(kmax + 1, {});
  rep.hyp1_sup.assign(2 * (kmax + 1), 0.0);
  bool finite = true, bounded = true;
  for (double x : xs) {
    double t = std::expm1(x);
    rep.times.push_back(t);
    RJet bj = model.b_jet(t, kmax), mj = model.m_jet(t, kmax);
    for (int k = 0; k <= kmax; ++k) {
      double vb = std::pow(1.0 + t, k + 1) * std::abs(bj.derivative(k));
      double vm = std::pow(1.0 + t, k + 2) * std::abs(mj.derivative(k));
      rep.hyp1_b[k].push_back(vb);
      rep.hyp1_m[k].push_back(vm);
      finite = finite && std::isfinite(vb) && std::isfinite(vm);
    }
  }
  // bounded on the horizon: the second half (in log time) adds nothing
  // beyond the tail tolerance to the running supremum
  auto check_seq = [&](const std::vector<double>& v, double& sup) {
    double first = 0, all = 0;
    for (size_t i = 0; i < v.size(); ++i) {
      all = std::max(all, v[i]);
      if (i < v.size() / 2) first = std::max(first, v[i]);
    }
    sup = all;
    if (all > first * (1.0 + grid.tail_tol) + grid.tail_tol) bounded = false;
  };
  for (int k = 0; k <= kmax; ++k) {
    check_seq(rep.hyp1_b[k], rep.hyp1_sup[2 * k]);
    check_seq(rep.hyp1_m[k], rep.hyp1_sup[2 * k + 1]);
  }
  rep.hyp1_pass = finite && bounded;

  double sg = model.sigma;
  auto fb = [&](double x) { return std::pow(std::abs(b_deviation(model, std::expm1(x))), sg); };
  auto fm = [&](double x) { return std::pow(std::abs(m_deviation(model, std::expm1(x))), sg); };
  double ib = 0, im = 0;
  std::vector<double> vb, vm;
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      ib += gauss<double, 15>::integrate(fb, xs[i - 1], xs[i]);
      im += gauss<double, 15>::integrate(fm, xs[i - 1], xs[i]);
    }
    rep.hyp2_b.push_back(ib);
    rep.hyp2_m.push_back(im);
    vb.push_back(fb(xs[i]));
    vm.push_back(fm(xs[i]));
  }
  double xh = std::log1p(T) - std::log(2.0);
  rep.tail_b = gauss<double, 15>::integrate(fb, xh, xe);
  rep.tail_m = gauss<double, 15>::integrate(fm, xh, xe);
  auto tb = extrapolate_tail(xs, vb);
  auto tm = extrapolate_tail(xs, vm);
  rep.extrapolated_b = tb.remaining;
  rep.extrapolated_m = tm.remaining;
  rep.hyp2_pass = tb.convergent && tm.convergent;
  return rep;
}

// ------------------------------------------------------------------- json

nlohmann::json to_json(const CoefficientModel& m) {
  nlohmann::json j;
  j["family"] = family_name(m.family);
  j["b0"] = m.b0;
  j["m0"] = m.m0;
  j["sigma"] = m.sigma;
  j["ell"] = m.ell;
  switch (m.family) {
    case Family::pure_scale_invariant: break;
    case Family::bounded_perturbation:
      j["c1"] = m.c1; j["p1"] = m.p1; j["c2"] = m.c2; j["p2"] = m.p2;
      break;
    case Family::log_perturbation:
      j["b1"] = m.b1; j["m1"] = m.m1; j["gamma"] = m.gamma;
      break;
    case Family::tabulated:
      j["b_csv"] = m.tab_b_path; j["m_csv"] = m.tab_m_path;
      break;
  }
  return j;
}

CoefficientModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "model: expected object");
  std::string fam = j.value("family", "pure_scale_invariant");
  std::set<std::string> allowed = {"family", "b0", "m0", "sigma", "ell"};
  if (fam == "bounded_perturbation") allowed.insert({"c1", "p1", "c2", "p2"});
  else if (fam == "log_perturbation") allowed.insert({"b1", "m1", "gamma"});
  else if (fam == "tabulated") allowed.insert({"b_csv", "m_csv"});
  else if (fam != "pure_scale_invariant")
    throw Error(ErrorKind::config, "model.family: unknown family '" + fam + "'");
  for (auto& [k, v] : j.items())
    if (!allowed.count(k)) throw Error(ErrorKind::config, "model." + k + ": unknown field");
  auto num = [&](const char* k, double def) {
    if (!j.contains(k)) return def;
    if (!j[k].is_number()) throw Error(ErrorKind::config, std::string("model.") + k + ": expected number");
    return j[k].get<double>();
  };
  double b0 = num("b0", 0.0), m0 = num("m0", 0.0), sigma = num("sigma", 1.0);
  if (sigma < 1.0 || sigma > 2.0) throw Error(ErrorKind::config, "model.sigma: must lie in [1,2]");
  CoefficientModel m;
  if (fam == "pure_scale_invariant") {
    m = CoefficientModel::pure(b0, m0);
    m.sigma = sigma;
  } else if (fam == "bounded_perturbation") {
    m = CoefficientModel::bounded(b0, m0, num("c1", 0), num("p1", 1), num("c2", 0), num("p2", 1), sigma);
  } else if (fam == "log_perturbation") {
    m = CoefficientModel::log_perturbation(b0, m0, num("b1", 0), num("m1", 0), num("gamma", 1), sigma);
  } else {
    if (!j.contains("b_csv") || !j.contains("m_csv"))
      throw Error(ErrorKind::config, "model: tabulated family needs b_csv and m_csv");
    m = CoefficientModel::tabulated(b0, m0, TabulatedCurve::from_csv(j["b_csv"], 1.0),
                                    TabulatedCurve::from_csv(j["m_csv"], 2.0), sigma);
    m.tab_b_path = j["b_csv"];
    m.tab_m_path = j["m_csv"];
  }
  if (j.contains("ell")) {
    int e = j["ell"].get<int>();
    if (e < 1) throw Error(ErrorKind::config, "model.ell: must be >= 1");
    if (fam == "tabulated" && e > 2) throw Error(ErrorKind::config, "model.ell: tabulated supports ell <= 2");
    m.ell = e;
  }
  return m;
}

}  // namespace fuchswave
