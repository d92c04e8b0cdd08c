#include "fuchswave/modal.hpp"

#include <cmath>
#include <sstream>

#include "fuchswave/csv.hpp"
#include "fuchswave/error.hpp"
#include "fuchswave/ode.hpp"

namespace fuchswave {

const char* form_name(SystemForm f) {
  switch (f) {
    case SystemForm::diss_system: return "diss_system";
    case SystemForm::fuchs_form: return "fuchs_form";
    case SystemForm::hyp_system: return "hyp_system";
    case SystemForm::unweighted: return "unweighted";
  }
  return "?";
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::oracle: return "oracle";
    case Provenance::representation: return "representation";
    case Provenance::levinson: return "levinson";
  }
  return "?";
}

std::vector<double> log_spaced(double a, double b, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = b;
    return v;
  }
  double la = std::log1p(a), lb = std::log1p(b);
  for (int i = 0; i < n; ++i) v[i] = std::expm1(la + (lb - la) * i / (n - 1));
  v.front() = a;
  v.back() = b;
  return v;
}

Matrix2cd fuchs_constant(const ModalSystem& sys) {
  double N = sys.zone.N;
  Matrix2cd A;
  A << -1.0, kI * N, kI * sys.model.m0 / N, -sys.model.b0;
  return A;
}

Matrix2cd fuchs_remainder(const ModalSystem& sys, double t) {
  double N = sys.zone.N, tau = 1.0 + t;
  Matrix2cd R = Matrix2cd::Zero();
  R(1, 0) = kI * (tau * tau * sys.xi * sys.xi + m_deviation(sys.model, t)) / N;
  R(1, 1) = -b_deviation(sys.model, t);
  return R;
}

Matrix2cd system_matrix(const ModalSystem& sys, double t) {
  if (t < 0) throw Error(ErrorKind::precondition, "t must be non-negative");
  const auto& md = sys.model;
  double xi = sys.xi, N = sys.zone.N, tau = 1.0 + t;
  double b = md.b(t), m = md.m(t);
  Matrix2cd A;
  switch (sys.form) {
    case SystemForm::diss_system:
      A << kI / tau, N / tau, tau * (xi * xi + m) / N, kI * b;
      return A;
    case SystemForm::fuchs_form:
      return fuchs_constant(sys) + fuchs_remainder(sys, t);
    case SystemForm::hyp_system:
      if (xi == 0.0) throw Error(ErrorKind::precondition, "hyp_system needs xi > 0");
      A << 0.0, xi, xi + m / xi, kI * b;
      return A;
    case SystemForm::unweighted:
      A << 0.0, 1.0, -(xi * xi + m), -b;
      return A;
  }
  return A;
}

namespace {

std::string label_for(const ModalSystem& sys) {
  std::ostringstream os;
  os << form_name(sys.form) << ", xi=" << sys.xi;
  return os.str();
}

// one pass over increasing checkpoints; returns E(t_i, s)
std::vector<Matrix2cd> run_path(const ModalSystem& sys, double s, const std::vector<double>& times,
                                double tol) {
  OdeOptions o;
  o.rtol = tol;
  std::vector<Matrix2cd> out;
  out.reserve(times.size());
  Matrix2cd E = Matrix2cd::Identity();
  std::string label = label_for(sys);
  if (sys.form == SystemForm::fuchs_form) {
    // integrate in x = ln(1+t)
    Fehlberg78<Matrix2cd> dp(
        [&](double x, const Matrix2cd& y, Matrix2cd& dy) {
          double t = std::expm1(x);
          dy.noalias() = (fuchs_constant(sys) + fuchs_remainder(sys, t)) * y;
        },
        o);
    double x = std::log1p(s);
    for (double t : times) {
      double xt = std::log1p(t);
      dp.integrate(E, x, xt, label);
      x = xt;
      out.push_back(E);
    }
    return out;
  }
  bool d_t = sys.form != SystemForm::unweighted;  // D_t E = A E means E' = i A E
  Fehlberg78<Matrix2cd> dp(
      [&](double t, const Matrix2cd& y, Matrix2cd& dy) {
        Matrix2cd A = system_matrix(sys, t);
        if (d_t) A *= kI;
        dy.noalias() = A * y;
      },
      o);
  double t0 = s;
  for (double t : times) {
    dp.integrate(E, t0, t, label);
    t0 = t;
    out.push_back(E);
  }
  return out;
}

void check_times(double s, const std::vector<double>& times) {
  if (s < 0) throw Error(ErrorKind::precondition, "s must be non-negative");
  double prev = s;
  for (double t : times) {
    if (t < prev) throw Error(ErrorKind::precondition, "checkpoint times must be increasing and >= s");
    prev = t;
  }
}

}  // namespace

std::vector<FundamentalMatrix> integrate_fundamental_path(const ModalSystem& sys, double s,
                                                          const std::vector<double>& times,
                                                          const OracleOptions& opt) {
  if (!(opt.tol > 0)) throw Error(ErrorKind::precondition, "tol must be positive");
  check_times(s, times);
  auto Es = run_path(sys, s, times, opt.tol);
  std::vector<FundamentalMatrix> out;
  for (size_t i = 0; i < times.size(); ++i)
    out.push_back({Es[i], s, times[i], sys.xi, Provenance::oracle, 0.0});
  if (opt.cross_check && !times.empty()) {
    auto ref = run_path(sys, s, times, opt.tol / 2);
    double worst = 0.0;
    for (size_t i = 0; i < times.size(); ++i)
      worst = std::max(worst, op_norm(Matrix2cd(Es[i] - ref[i])) / op_norm(ref[i]));
    for (auto& f : out) f.estimated_error = worst;
  }
  return out;
}

FundamentalMatrix integrate_fundamental(const ModalSystem& sys, double s, double t,
                                        const OracleOptions& opt) {
  if (s > t) throw Error(ErrorKind::precondition, "need s <= t");
  if (opt.cross_check) {
    auto path = integrate_fundamental_path(sys, s, log_spaced(s, t, 10), opt);
    return path.back();
  }
  return integrate_fundamental_path(sys, s, {t}, opt).back();
}

std::vector<MicroEnergy> evolve_micro_energy_path(const ModalSystem& sys, cd u0_hat, cd u1_hat,
                                                  const std::vector<double>& times,
                                                  const OracleOptions& opt) {
  check_times(0.0, times);
  std::vector<MicroEnergy> out;
  Vector2cd y(u0_hat, u1_hat);
  ModalSystem us = sys;
  us.form = SystemForm::unweighted;
  auto emit = [&](double t, const Vector2cd& v) {
    MicroEnergy me;
    me.t = t;
    me.xi = sys.xi;
    me.u_hat = v(0);
    me.ut_hat = v(1);
    me.value << micro_weight(sys.zone, t, sys.xi) * v(0), -kI * v(1);
    out.push_back(me);
  };
  if (u0_hat == 0.0 && u1_hat == 0.0) {
    for (double t : times) emit(t, y);
    return out;
  }
  OdeOptions o;
  o.rtol = opt.tol;
  Fehlberg78<Vector2cd> dp(
      [&](double t, const Vector2cd& v, Vector2cd& dv) { dv.noalias() = system_matrix(us, t) * v; },
      o);
  double t0 = 0.0;
  std::string label = label_for(us);
  for (double t : times) {
    dp.integrate(y, t0, t, label);
    t0 = t;
    emit(t, y);
  }
  return out;
}

MicroEnergy evolve_micro_energy(const ModalSystem& sys, cd u0_hat, cd u1_hat, double t,
                                const OracleOptions& opt) {
  return evolve_micro_energy_path(sys, u0_hat, u1_hat, {t}, opt).back();
}

double check_cocycle(const ModalSystem& sys, double s, double r, double t,
                     const OracleOptions& opt) {
  if (!(s <= r && r <= t)) throw Error(ErrorKind::precondition, "need s <= r <= t");
  Matrix2cd ets = integrate_fundamental(sys, s, t, {opt.tol, false}).E;
  Matrix2cd etr = integrate_fundamental(sys, r, t, {opt.tol, false}).E;
  Matrix2cd ers = integrate_fundamental(sys, s, r, {opt.tol, false}).E;
  return op_norm(Matrix2cd(etr * ers - ets)) / op_norm(ets);
}

void write_trajectory_csv(const std::string& path, const std::vector<FundamentalMatrix>& traj) {
  CsvWriter w(path, {"t", "re_e11", "im_e11", "re_e12", "im_e12", "re_e21", "im_e21", "re_e22",
                     "im_e22"});
  for (const auto& f : traj)
    w.row({f.t, f.E(0, 0).real(), f.E(0, 0).imag(), f.E(0, 1).real(), f.E(0, 1).imag(),
           f.E(1, 0).real(), f.E(1, 0).imag(), f.E(1, 1).real(), f.E(1, 1).imag()});
}

}  // namespace fuchswave
