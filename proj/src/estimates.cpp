#include "fuchswave/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/QR>

#include "fuchswave/diagonalize.hpp"
#include "fuchswave/error.hpp"

namespace fuchswave {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FUCHSWAVE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ------------------------------------------------------------ radial grid

double sphere_area(int n) {
  const double pi = std::acos(-1.0);
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    case 3: return 4.0 * pi;
  }
  throw Error(ErrorKind::precondition, "dimension must be 1, 2 or 3");
}

RadialGrid RadialGrid::log_grid(int n, double xi_min, double xi_max, int points) {
  if (!(xi_min > 0 && xi_max > xi_min)) throw Error(ErrorKind::precondition, "bad radial range");
  if (points < 5) throw Error(ErrorKind::precondition, "radial grid needs at least 5 points");
  if (points % 2 == 0) ++points;  // the coarse check uses every other point
  RadialGrid g;
  g.n = n;
  const double pi = std::acos(-1.0);
  double c = sphere_area(n) / std::pow(2.0 * pi, n);
  double a = std::log(xi_min), b = std::log(xi_max), h = (b - a) / (points - 1);
  for (int i = 0; i < points; ++i) {
    double r = std::exp(a + h * i);
    double wt = (i == 0 || i == points - 1) ? 0.5 * h : h;
    g.xi.push_back(r);
    g.w.push_back(wt * std::pow(r, n) * c);
  }
  return g;
}

double RadialGrid::norm(const std::vector<double>& abs2) const {
  double s = 0.0;
  for (size_t i = 0; i < xi.size(); ++i) s += w[i] * abs2[i];
  return std::sqrt(s);
}

double RadialGrid::norm_coarse(const std::vector<double>& abs2) const {
  double s = 0.0;
  size_t last = xi.size() - 1;
  for (size_t i = 0; i <= last; i += 2) {
    // spacing doubles, end weights included
    s += 2.0 * w[i] * abs2[i];
  }
  return std::sqrt(s);
}

// ------------------------------------------------------------------ data

const char* data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::zero: return "zero";
    case DataKind::gaussian: return "gaussian";
    case DataKind::ring: return "ring";
    case DataKind::lowpass: return "lowpass";
    case DataKind::moment: return "moment";
    case DataKind::file: return "file";
  }
  return "?";
}

DataSpec DataSpec::gaussian(double width, double a0, double a1) {
  DataSpec d;
  d.kind = DataKind::gaussian;
  d.width = width;
  d.a0 = a0;
  d.a1 = a1;
  return d;
}

DataSpec DataSpec::ring(double rho, double half_width, double a0, double a1) {
  if (!(half_width > 0 && rho - half_width >= 0))
    throw Error(ErrorKind::precondition, "ring needs 0 < half_width <= rho");
  DataSpec d;
  d.kind = DataKind::ring;
  d.rho = rho;
  d.width = half_width;
  d.a0 = a0;
  d.a1 = a1;
  return d;
}

DataSpec DataSpec::lowpass(double cutoff, double a0, double a1) {
  DataSpec d;
  d.kind = DataKind::lowpass;
  d.cutoff = cutoff;
  d.a0 = a0;
  d.a1 = a1;
  return d;
}

DataSpec DataSpec::moment(int power, double cutoff, double a0, double a1) {
  if (power < 0) throw Error(ErrorKind::precondition, "moment power must be >= 0");
  DataSpec d;
  d.kind = DataKind::moment;
  d.moment_power = power;
  d.cutoff = cutoff;
  d.a0 = a0;
  d.a1 = a1;
  return d;
}

DataSpec DataSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read data file " + path);
  DataSpec d;
  d.kind = DataKind::file;
  d.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream is(line);
    is.imbue(std::locale::classic());
    double v[5];
    int k = 0;
    while (k < 5 && is >> v[k]) ++k;
    if (k == 0 && lineno == 1) continue;  // header
    if (k != 5)
      throw Error(ErrorKind::config, path + ":" + std::to_string(lineno) +
                                         ": expected xi,u0_re,u0_im,u1_re,u1_im");
    if (!d.file_xi.empty() && v[0] <= d.file_xi.back())
      throw Error(ErrorKind::config, path + ":" + std::to_string(lineno) + ": xi must increase");
    d.file_xi.push_back(v[0]);
    d.file_u0.emplace_back(v[1], v[2]);
    d.file_u1.emplace_back(v[3], v[4]);
  }
  if (d.file_xi.size() < 2) throw Error(ErrorKind::config, path + ": need at least two rows");
  return d;
}

double DataSpec::profile(double xi) const {
  switch (kind) {
    case DataKind::zero: return 0.0;
    case DataKind::gaussian: return std::exp(-0.5 * xi * xi / (width * width));
    case DataKind::ring: {
      double x = (xi - rho) / width;
      return std::abs(x) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - x * x)) : 0.0;
    }
    case DataKind::lowpass: return chi(2.0 * xi / cutoff);
    case DataKind::moment: return std::pow(xi / cutoff, moment_power) * chi(2.0 * xi / cutoff);
    case DataKind::file: return 1.0;
  }
  return 0.0;
}

std::pair<cd, cd> DataSpec::at(double xi) const {
  if (kind == DataKind::file) {
    if (xi < file_xi.front() || xi > file_xi.back()) return {0.0, 0.0};
    auto it = std::upper_bound(file_xi.begin(), file_xi.end(), xi);
    size_t j = std::min<size_t>(it - file_xi.begin(), file_xi.size() - 1);
    size_t i = j - 1;
    double s = (xi - file_xi[i]) / (file_xi[j] - file_xi[i]);
    return {(1 - s) * file_u0[i] + s * file_u0[j], (1 - s) * file_u1[i] + s * file_u1[j]};
  }
  double p = profile(xi);
  return {a0 * p, a1 * p};
}

double DataSpec::support_min() const {
  switch (kind) {
    case DataKind::ring: return rho - width;
    case DataKind::file: return file_xi.front();
    default: return 0.0;
  }
}

double DataSpec::support_max() const {
  switch (kind) {
    case DataKind::zero: return 0.0;
    case DataKind::gaussian: return std::numeric_limits<double>::infinity();
    case DataKind::ring: return rho + width;
    case DataKind::lowpass:
    case DataKind::moment: return cutoff;
    case DataKind::file: return file_xi.back();
  }
  return 0.0;
}

DataSpec DataSpec::scaled(double c) const {
  DataSpec d = *this;
  d.a0 *= c;
  d.a1 *= c;
  for (auto& v : d.file_u0) v *= c;
  for (auto& v : d.file_u1) v *= c;
  return d;
}

nlohmann::json to_json(const DataSpec& d) {
  nlohmann::json j;
  j["kind"] = data_kind_name(d.kind);
  j["a0"] = d.a0;
  j["a1"] = d.a1;
  switch (d.kind) {
    case DataKind::gaussian: j["width"] = d.width; break;
    case DataKind::ring:
      j["rho"] = d.rho;
      j["width"] = d.width;
      break;
    case DataKind::lowpass: j["cutoff"] = d.cutoff; break;
    case DataKind::moment:
      j["cutoff"] = d.cutoff;
      j["power"] = d.moment_power;
      break;
    case DataKind::file:
      j = {{"kind", "file"}, {"path", d.path}};
      break;
    case DataKind::zero: j = {{"kind", "zero"}}; break;
  }
  return j;
}

DataSpec data_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "data: expected an object");
  auto allowed = [&](std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) throw Error(ErrorKind::config, "data: unknown field '" + it.key() + "'");
    }
  };
  std::string kind = j.value("kind", "");
  auto num = [&](const char* k, double def) {
    if (!j.contains(k)) return def;
    if (!j.at(k).is_number()) throw Error(ErrorKind::config, std::string("data.") + k + ": expected a number");
    return j.at(k).get<double>();
  };
  double a0 = num("a0", 1.0), a1 = num("a1", 0.0);
  if (kind == "zero") {
    allowed({"kind"});
    DataSpec d;
    d.kind = DataKind::zero;
    return d;
  }
  if (kind == "gaussian") {
    allowed({"kind", "a0", "a1", "width"});
    return DataSpec::gaussian(num("width", 1.0), a0, a1);
  }
  if (kind == "ring") {
    allowed({"kind", "a0", "a1", "width", "rho"});
    return DataSpec::ring(num("rho", 2.0), num("width", 1.0), a0, a1);
  }
  if (kind == "lowpass") {
    allowed({"kind", "a0", "a1", "cutoff"});
    return DataSpec::lowpass(num("cutoff", 0.25), a0, a1);
  }
  if (kind == "moment") {
    allowed({"kind", "a0", "a1", "cutoff", "power"});
    return DataSpec::moment(int(num("power", 0)), num("cutoff", 0.25), a0, a1);
  }
  if (kind == "file") {
    allowed({"kind", "path"});
    if (!j.contains("path") || !j.at("path").is_string())
      throw Error(ErrorKind::config, "data.path: expected a string");
    return DataSpec::from_file(j.at("path").get<std::string>());
  }
  throw Error(ErrorKind::config, "data.kind: unknown kind '" + kind + "'");
}

// ----------------------------------------------------------------- trace

EnergyTrace energy_trace(const CoefficientModel& model, const ZoneConfig& zone, const DataSpec& data,
                         const RadialGrid& grid, const std::vector<double>& times,
                         const TraceOptions& opt) {
  size_t P = grid.xi.size(), T = times.size();
  std::vector<std::vector<MicroEnergy>> per(P);
  OracleOptions o;
  o.tol = opt.tol;
  parallel_for(int(P), opt.threads, [&](int i) {
    double xi = grid.xi[i];
    auto [u0, u1] = data.at(xi);
    if (u0 == 0.0 && u1 == 0.0) {
      per[i].resize(times.size());
      for (size_t k = 0; k < times.size(); ++k) {
        per[i][k].t = times[k];
        per[i][k].xi = xi;
      }
      return;
    }
    per[i] = evolve_micro_energy_path(ModalSystem{model, zone, xi, SystemForm::unweighted}, u0, u1,
                                      times, o);
  });
  EnergyTrace tr;
  tr.times = times;
  tr.data = data;
  tr.n = grid.n;
  std::vector<double> U2(P), u2(P), g2(P), t2(P);
  for (size_t k = 0; k < T; ++k) {
    double sup = 0.0;
    for (size_t i = 0; i < P; ++i) {
      const auto& me = per[i][k];
      U2[i] = me.value.squaredNorm();
      u2[i] = std::norm(me.u_hat);
      g2[i] = grid.xi[i] * grid.xi[i] * u2[i];
      t2[i] = std::norm(me.ut_hat);
      sup = std::max(sup, std::sqrt(U2[i]));
    }
    double nu = grid.norm(u2);
    tr.values.push_back(grid.norm(U2));
    tr.weighted_u.push_back(nu / (1.0 + times[k]));
    tr.grad_u.push_back(grid.norm(g2));
    tr.u_t.push_back(grid.norm(t2));
    tr.u.push_back(nu);
    tr.sup_amplitude.push_back(sup);
    if (k == 0 && opt.check_resolution && tr.values[0] > 0) {
      double fine = tr.values[0], coarse = grid.norm_coarse(U2);
      if (std::abs(fine - coarse) > opt.resolution_tol * fine) {
        std::ostringstream os;
        os << "radial grid too coarse for the data: norm " << fine << " vs " << coarse
           << " on every other point";
        throw Error(ErrorKind::resolution, os.str());
      }
    }
  }
  return tr;
}

// ------------------------------------------------------------------- fits

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double predicted, const FitOptions& opt) {
  if (times.size() != values.size()) throw Error(ErrorKind::precondition, "times/values size mismatch");
  if (!(opt.t_hi > opt.t_lo)) throw Error(ErrorKind::invalid_window, "empty fit window");
  double decades = std::log10(opt.t_hi / opt.t_lo);
  if (decades < opt.min_decades - 1e-9) {
    std::ostringstream os;
    os << "fit window spans " << decades << " decades, need " << opt.min_decades;
    throw Error(ErrorKind::invalid_window, os.str());
  }
  if (times.empty() || opt.t_lo < times.front() * (1 - 1e-12) ||
      opt.t_hi > times.back() * (1 + 1e-12))
    throw Error(ErrorKind::invalid_window, "fit window outside the trace");
  std::vector<double> xs, ys;
  for (size_t i = 0; i < times.size(); ++i) {
    double t = times[i];
    if (t < opt.t_lo * (1 - 1e-12) || t > opt.t_hi * (1 + 1e-12)) continue;
    if (!(values[i] > 0) || !std::isfinite(values[i]))
      throw Error(ErrorKind::invalid_window, "non-positive value in the fit window");
    xs.push_back(std::log(t + opt.time_shift));
    ys.push_back(std::log(values[i]));
  }
  if (xs.size() < 3) throw Error(ErrorKind::invalid_window, "fewer than 3 samples in the window");
  DecayFit f;
  f.t_lo = opt.t_lo;
  f.t_hi = opt.t_hi;
  f.predicted = predicted;
  f.samples = int(xs.size());
  double span = xs.back() - xs.front();
  const double two_pi = 2.0 * std::acos(-1.0);
  f.harmonics = opt.harmonic_freq > 0 && span * opt.harmonic_freq >= two_pi && xs.size() >= 12;
  int cols = f.harmonics ? 6 : 2;
  Eigen::MatrixXd A(xs.size(), cols);
  Eigen::VectorXd y(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[i];
    if (f.harmonics) {
      double w = opt.harmonic_freq * xs[i];
      A(i, 2) = std::cos(w);
      A(i, 3) = std::sin(w);
      A(i, 4) = std::cos(2 * w);
      A(i, 5) = std::sin(2 * w);
    }
    y(i) = ys[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  f.exponent = c(1);
  f.rms_residual = std::sqrt((A * c - y).squaredNorm() / double(xs.size()));
  f.pass = std::abs(f.exponent - predicted) <= opt.tol;
  return f;
}

nlohmann::json to_json(const DecayFit& f) {
  return {{"exponent", f.exponent}, {"window", {f.t_lo, f.t_hi}}, {"rms_residual", f.rms_residual},
          {"predicted", f.predicted}, {"harmonics", f.harmonics}, {"samples", f.samples},
          {"verdict", f.pass ? "pass" : "fail"}};
}

double double_root_prediction(double mu, double t_lo, double t_hi, double time_shift) {
  // least-squares slope of ln ln(t + shift) against ln(t + shift)
  const int M = 400;
  double a = std::log(t_lo + time_shift), b = std::log(t_hi + time_shift);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < M; ++i) {
    double x = a + (b - a) * i / (M - 1);
    double y = std::log(x);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double slope = (M * sxy - sx * sy) / (M * sxx - sx * sx);
  return mu + slope;
}

double diss_prediction(const CoefficientModel& model, double t_lo, double t_hi) {
  auto rc = classify_regime(model);
  if (rc.regime == Regime::double_root) return double_root_prediction(rc.mu_plus.real(), t_lo, t_hi);
  return predicted_decay(model, ZoneLabel::diss);
}

// -------------------------------------------------------------- sharpness

SharpnessResult sharpness_limit(const CoefficientModel& model, const ZoneConfig& zone,
                                const DataSpec& data, const RadialGrid& grid, double horizon,
                                const TraceOptions& opt) {
  if (!(data.support_min() > zone.N))
    throw Error(ErrorKind::precondition, "sharpness data must be supported in |xi| > N");
  if (data.kind == DataKind::zero || (data.a0 == 0 && data.a1 == 0))
    throw Error(ErrorKind::precondition, "sharpness data must not vanish");
  if (!(horizon >= 10.0)) throw Error(ErrorKind::precondition, "horizon must be at least 10");
  // four samples per doubling, ending at the horizon
  std::vector<double> times = {0.0};
  int per_doubling = 4;
  int steps = int(std::ceil(std::log2(horizon) * per_doubling));
  for (int j = steps; j >= 0; --j) {
    double t = horizon * std::pow(2.0, -double(j) / per_doubling);
    if (t > times.back()) times.push_back(t);
  }
  auto tr = energy_trace(model, zone, data, grid, times, opt);
  SharpnessResult r;
  r.times = times;
  for (size_t i = 0; i < times.size(); ++i) {
    double lam = eval_lambda(model, times[i]);
    r.values.push_back(lam * lam * (tr.grad_u[i] * tr.grad_u[i] + tr.u_t[i] * tr.u_t[i]));
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, sum = 0.0;
  int cnt = 0;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < horizon / 10.0 * (1 - 1e-12)) continue;
    lo = std::min(lo, r.values[i]);
    hi = std::max(hi, r.values[i]);
    sum += r.values[i];
    ++cnt;
  }
  double mean = sum / cnt;
  r.variation = mean > 0 ? (hi - lo) / mean : std::numeric_limits<double>::infinity();
  r.limit = r.values.back();
  r.pass = r.variation < 0.01 && r.limit > 0;
  return r;
}

// ----------------------------------------------------------------- moments

MomentData moment_data(const CoefficientModel& model, int n, double slack) {
  double b0 = model.b0, m0 = model.m0;
  if (!(4 * m0 < b0 * (b0 - 2)))
    throw Error(ErrorKind::precondition, "moment improvement needs 4 m0 < b0 (b0 - 2)");
  if (n < 1 || n > 3) throw Error(ErrorKind::precondition, "dimension must be 1, 2 or 3");
  MomentData md;
  md.kappa = 0.5 * (1.0 + std::sqrt((b0 - 1) * (b0 - 1) - 4 * m0));
  if (model.sigma > 1.0) md.kappa += slack;
  double r = md.kappa - 0.5 * n;
  md.kappa_prime = int(std::floor(r)) + 1;
  md.borderline = std::abs(r - std::round(r)) < 1e-12;
  md.power = 2 * int(std::ceil((md.kappa_prime + 1) / 2.0));
  // int_0^cutoff |xi|^{-2 kappa} |xi|^{2 power} xi^{n-1} d xi with the lowpass profile
  DataSpec d = DataSpec::moment(md.power, 0.25);
  auto g = RadialGrid::log_grid(n, 1e-12, 0.25, 2001);
  std::vector<double> f(g.xi.size());
  for (size_t i = 0; i < f.size(); ++i)
    f[i] = std::pow(g.xi[i], -2.0 * md.kappa) * std::pow(d.profile(g.xi[i]), 2);
  md.weighted_norm = g.norm(f);
  return md;
}

MomentExperiment moment_experiment(const CoefficientModel& model, const ZoneConfig& zone, int n,
                                   const FitOptions& fit, const TraceOptions& opt, double slack) {
  auto rc = classify_regime(model);
  if (rc.regime != Regime::real_large_muplus)
    throw Error(ErrorKind::precondition, "moment experiment needs the real_large_muplus regime");
  MomentExperiment ex;
  ex.moments = moment_data(model, n, slack);
  double cutoff = zone.N / 4.0;
  ex.generic = DataSpec::lowpass(cutoff);
  ex.moment = DataSpec::moment(ex.moments.power, cutoff);
  double xi_min = std::min(1e-6, 0.01 * zone.N / fit.t_hi);
  auto grid = RadialGrid::log_grid(n, xi_min, cutoff, 301);
  auto times = log_spaced(0.0, fit.t_hi, 121);
  for (double t : log_spaced(fit.t_lo, fit.t_hi, 41)) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  ex.generic_trace = energy_trace(model, zone, ex.generic, grid, times, opt);
  ex.moment_trace = energy_trace(model, zone, ex.moment, grid, times, opt);
  double mu = rc.mu_plus.real(), half_b = -model.b0 / 2.0;
  ex.generic_fit = fit_decay(times, ex.generic_trace.sup_amplitude, mu, fit);
  ex.moment_fit = fit_decay(times, ex.moment_trace.sup_amplitude, half_b, fit);
  ex.generic_l2_fit = fit_decay(times, ex.generic_trace.values, mu - 0.5 * n, fit);
  ex.moment_l2_fit = fit_decay(times, ex.moment_trace.values, half_b, fit);
  ex.pass = ex.generic_fit.pass && ex.moment_fit.pass;
  return ex;
}

// -------------------------------------------------------------- scattering

bool l2_hypotheses(const CoefficientModel& model) {
  double b0 = model.b0, m0 = model.m0;
  bool lower = b0 * (b0 - 2) <= 4 * m0;
  if (model.sigma == 1.0) return lower;
  return model.sigma > 1.0 && model.sigma <= 2.0 && lower && 4 * m0 < (b0 - 1) * (b0 - 1);
}

namespace {

Matrix2cd T_xi(double xi) {
  Matrix2cd T = Matrix2cd::Zero();
  T(0, 0) = xi;
  T(1, 1) = -kI;
  return T;
}

WPlusSample w_plus_one(const CoefficientModel& model, const ZoneConfig& zone, double xi,
                       const ScatteringOptions& opt) {
  WPlusSample w;
  w.xi = xi;
  if (model.trivial()) {
    w.converged = true;
    return w;
  }
  int k = std::min(2, model.ell - 1);
  DiagonalizationStage st(model, k, zone);
  // start deep enough in the hyperbolic zone for N_k to be close to I
  double s = std::max(0.0, 2.0 * zone.N / xi - 1.0);
  while (op_norm(Matrix2cd(st.N_k(s, xi) - Matrix2cd::Identity())) > 0.25) s = 2.0 * s + 1.0;
  OracleOptions o;
  o.tol = opt.oracle_tol;
  Matrix2cd EY = integrate_fundamental(ModalSystem{model, zone, xi, SystemForm::unweighted}, 0.0, s, o).E;
  Matrix2cd T = T_xi(xi);
  Matrix2cd EU = T * EY * T.inverse();
  Matrix2cd right = eval_lambda(model, s) * st.N_k(s, xi).inverse() * wkb_Minv() * EU;
  Matrix2cd left = wkb_M() * E0(0.0, s, xi);
  auto L = q_limit(st, s, xi, opt.tol, opt.t_first, 2.0, opt.horizon);
  w.W = left * L.Q * right;
  w.last_increment = L.changes.empty() ? 0.0 : L.changes.back();
  w.t_reached = L.t_reached;
  w.converged = true;
  return w;
}

}  // namespace

std::vector<WPlusSample> scattering_operator(const CoefficientModel& model, const ZoneConfig& zone,
                                             const std::vector<double>& xi,
                                             const ScatteringOptions& opt) {
  if (!l2_hypotheses(model))
    throw Error(ErrorKind::regime_unsupported, "scattering needs b0(b0-2) <= 4 m0 (and 4 m0 < (b0-1)^2 for sigma > 1)");
  for (double x : xi)
    if (!(x >= opt.eps))
      throw Error(ErrorKind::precondition, "scattering samples must satisfy |xi| >= eps");
  std::vector<WPlusSample> out(xi.size());
  parallel_for(int(xi.size()), opt.threads,
               [&](int i) { out[i] = w_plus_one(model, zone, xi[i], opt); });
  return out;
}

ScatteringResidual scattering_residual(const CoefficientModel& model, const ZoneConfig& zone,
                                       const DataSpec& data, const RadialGrid& grid,
                                       double horizon, const ScatteringOptions& opt) {
  if (data.support_min() < opt.eps)
    throw Error(ErrorKind::precondition, "scattering data must be supported in |xi| >= eps");
  std::vector<int> idx;
  std::vector<double> xs;
  for (size_t i = 0; i < grid.xi.size(); ++i) {
    auto [u0, u1] = data.at(grid.xi[i]);
    if (u0 != 0.0 || u1 != 0.0) {
      idx.push_back(int(i));
      xs.push_back(grid.xi[i]);
    }
  }
  ScatteringResidual res;
  res.W_plus = scattering_operator(model, zone, xs, opt);
  std::vector<double> times = {0.0};
  for (double t = 1.0; t < horizon; t *= 2.0) times.push_back(t);
  times.push_back(horizon);
  res.times = times;
  CoefficientModel free = CoefficientModel::pure(0.0, 0.0);
  OracleOptions o;
  o.tol = 1e-10;
  size_t M = xs.size(), T = times.size();
  std::vector<std::vector<MicroEnergy>> U(M), V(M);
  bool trivial = model.trivial();
  parallel_for(int(M), opt.threads, [&](int j) {
    double xi = xs[j];
    auto [u0, u1] = data.at(xi);
    U[j] = evolve_micro_energy_path(ModalSystem{model, zone, xi, SystemForm::unweighted}, u0, u1,
                                    times, o);
    if (trivial) {
      V[j] = U[j];
      return;
    }
    cd v0 = u0, v1 = u1;
    {
      Vector2cd V0 = res.W_plus[j].W * Vector2cd(xi * u0, -kI * u1);
      v0 = V0(0) / xi;
      v1 = kI * V0(1);
    }
    V[j] = evolve_micro_energy_path(ModalSystem{free, zone, xi, SystemForm::unweighted}, v0, v1,
                                    times, o);
  });
  std::vector<double> a(grid.xi.size(), 0.0), b(grid.xi.size(), 0.0);
  for (size_t k = 0; k < T; ++k) {
    double lam = eval_lambda(model, times[k]);
    for (size_t j = 0; j < M; ++j) {
      double xi = xs[j];
      a[idx[j]] = std::norm(lam * U[j][k].ut_hat - V[j][k].ut_hat);
      b[idx[j]] = xi * xi * std::norm(lam * U[j][k].u_hat - V[j][k].u_hat);
    }
    res.residual_dt.push_back(grid.norm(a));
    res.residual_grad.push_back(grid.norm(b));
  }
  auto ratio = [](const std::vector<double>& r) {
    return r.front() > 0 ? r.back() / r.front() : (r.back() == 0 ? 0.0 : 1.0);
  };
  // decreasing trend: no sample rises 5% above the earlier peak, and the
  // log-log slope over t >= 1 is negative
  auto monotone = [&](const std::vector<double>& r) {
    double peak = r.front();
    for (size_t i = 1; i < r.size(); ++i) {
      if (r[i] > 1.05 * peak + 1e-300) return false;
      peak = std::max(peak, r[i]);
    }
    if (r.front() == 0.0 && r.back() == 0.0) return true;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = 0; i < r.size(); ++i) {
      if (times[i] < 1.0 || !(r[i] > 0)) continue;
      double x = std::log(1.0 + times[i]), y = std::log(r[i]);
      sx += x, sy += y, sxx += x * x, sxy += x * y, ++m;
    }
    if (m < 2) return false;
    return (m * sxy - sx * sy) < 0.0;
  };
  res.final_ratio_dt = ratio(res.residual_dt);
  res.final_ratio_grad = ratio(res.residual_grad);
  res.monotone = monotone(res.residual_dt) && monotone(res.residual_grad);
  res.pass = res.monotone && res.final_ratio_dt <= 0.1 && res.final_ratio_grad <= 0.1;
  return res;
}

// ------------------------------------------------------------ predictions

LpLqRate lp_lq_rate(const CoefficientModel& model, double p, int n) {
  if (!(p > 1.0 && p <= 2.0)) throw Error(ErrorKind::precondition, "p must lie in (1, 2]");
  if (n < 1 || n > 3) throw Error(ErrorKind::precondition, "dimension must be 1, 2 or 3");
  if (!l2_hypotheses(model))
    throw Error(ErrorKind::regime_unsupported, "L^p-L^q rate needs b0(b0-2) <= 4 m0 (and 4 m0 < (b0-1)^2 for sigma > 1)");
  LpLqRate r;
  r.q = p / (p - 1.0);
  double d = 1.0 / p - 1.0 / r.q;
  r.decay_exponent = -model.b0 / 2.0 - 0.5 * (n - 1) * d;
  r.sobolev_order = n * d;
  return r;
}

DecayFit improved_u_bound(const CoefficientModel& model, const ZoneConfig& zone,
                          const DataSpec& data, const RadialGrid& grid, const FitOptions& fit,
                          const TraceOptions& opt) {
  auto rc = classify_regime(model);
  double delta = 1.0 + model.b0 / 2.0 + rc.mu_plus.real();
  if (model.sigma != 1.0) throw Error(ErrorKind::precondition, "the improved bound needs sigma = 1");
  if (!(delta > 0)) throw Error(ErrorKind::regime_unsupported, "the improved bound needs 1 + b0/2 + Re mu_+ > 0");
  auto times = log_spaced(0.0, fit.t_hi, 81);
  for (double t : log_spaced(fit.t_lo, fit.t_hi, 41)) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  auto tr = energy_trace(model, zone, data, grid, times, opt);
  double bound = 1.0 + rc.mu_plus.real();
  DecayFit f = fit_decay(times, tr.u, bound, fit);
  f.pass = f.exponent <= bound + fit.tol;
  return f;
}

}  // namespace fuchswave
