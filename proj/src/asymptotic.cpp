#include "fuchswave/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fuchswave/error.hpp"
#include "fuchswave/modal.hpp"
#include "fuchswave/ode.hpp"

namespace fuchswave {

const char* alternative_name(Alternative a) {
  switch (a) {
    case Alternative::first: return "first";
    case Alternative::second: return "second";
    case Alternative::both: return "both";
    case Alternative::inconclusive: return "inconclusive";
  }
  return "?";
}

FuchsSystem constant_fuchs(const VectorXcd& mu, MatFn R, std::string parameter_set) {
  FuchsSystem s;
  s.d = int(mu.size());
  s.mu = [mu](double) { return mu; };
  s.R = std::move(R);
  s.parameter_set = std::move(parameter_set);
  return s;
}

ModalFuchs diagonalized_modal_fuchs(const CoefficientModel& model, const ZoneConfig& zone,
                                    double xi, bool cut_at_zone) {
  auto rc = classify_regime(model);
  if (rc.regime == Regime::double_root)
    throw Error(ErrorKind::degenerate_basis, "A has a double eigenvalue; not diagonalisable");
  ModalFuchs mf;
  double N = zone.N;
  cd mus[2] = {rc.mu_minus, rc.mu_plus};
  for (int c = 0; c < 2; ++c) {
    Vector2cd v(kI * N, mus[c] + 1.0);
    mf.P.col(c) = v / v.norm();
  }
  mf.Pinv = mf.P.inverse();
  mf.tau_theta = xi > 0 ? 1.0 + theta(zone, xi) : std::numeric_limits<double>::infinity();
  ModalSystem ms{model, zone, xi, SystemForm::fuchs_form};
  Matrix2cd P = mf.P, Pi = mf.Pinv;
  double cut = mf.tau_theta;
  VectorXcd mu(2);
  mu << mus[0], mus[1];
  mf.sys = constant_fuchs(
      mu,
      [ms, P, Pi, cut, cut_at_zone](double tau) -> MatrixXcd {
        if (cut_at_zone && tau > cut) return MatrixXcd::Zero(2, 2);
        return MatrixXcd(Pi * fuchs_remainder(ms, tau - 1.0) * P);
      },
      "xi=" + std::to_string(xi));
  if (cut_at_zone && std::isfinite(cut)) mf.sys.breakpoints.push_back(cut);
  return mf;
}

// ------------------------------------------------------------- dichotomy

DichotomyVerdict check_dichotomy(const std::vector<FuchsSystem>& samples, int i, int j, double T,
                                 int points) {
  if (i == j) throw Error(ErrorKind::precondition, "dichotomy needs i != j");
  if (samples.empty()) throw Error(ErrorKind::precondition, "no parameter samples");
  DichotomyVerdict v;
  double X = std::log(T);
  auto grid = PanelGrid::build(0.0, X, std::max(X / std::max(points / PanelGrid::kQ, 1), 0.05));
  double rise_all = 0, rise_half = 0, drop_all = 0, drop_half = 0;
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  bool first_sample = true;
  for (const auto& sys : samples) {
    std::vector<cd> f(grid.size());
    for (int n = 0; n < grid.size(); ++n) {
      VectorXcd mu = sys.mu(std::exp(grid.node(n)));
      double d = (mu(i) - mu(j)).real();
      f[n] = d;
      sup = std::max(sup, d);
      inf = std::min(inf, d);
    }
    std::vector<cd> In, Ie;
    grid.cumulative(f, In, Ie);
    // running max rise / drop of the integral, over the whole horizon and
    // over its first half in log time
    double lo = 0.0, hi = 0.0;
    for (int n = 0; n < grid.size(); ++n) {
      double I = In[n].real();
      lo = std::min(lo, I);
      hi = std::max(hi, I);
      rise_all = std::max(rise_all, I - lo);
      drop_all = std::max(drop_all, hi - I);
      if (grid.node(n) <= 0.5 * X) {
        rise_half = std::max(rise_half, I - lo);
        drop_half = std::max(drop_half, hi - I);
      }
    }
    if (first_sample) {
      for (int n = 0; n < grid.size(); ++n) {
        v.tau.push_back(std::exp(grid.node(n)));
        v.integral.push_back(In[n].real());
      }
      first_sample = false;
    }
  }
  auto saturated = [](double all, double half) { return all <= half * (1.0 + 1e-3) + 1e-9; };
  bool first = saturated(rise_all, rise_half);
  bool second = saturated(drop_all, drop_half);
  v.alternative = first && second ? Alternative::both
                  : first         ? Alternative::first
                  : second        ? Alternative::second
                                  : Alternative::inconclusive;
  v.C_minus = sup;
  v.C_plus = inf;
  v.strong = sup < 0 || inf > 0;
  return v;
}

// -------------------------------------------------------------- helpers

namespace {

struct NodeData {
  std::vector<VectorXcd> mu;
  std::vector<MatrixXcd> R;
};

NodeData sample(const FuchsSystem& sys, const PanelGrid& g) {
  NodeData nd;
  nd.mu.reserve(g.size());
  nd.R.reserve(g.size());
  for (int n = 0; n < g.size(); ++n) {
    double tau = std::exp(g.node(n));
    nd.mu.push_back(sys.mu(tau));
    nd.R.push_back(sys.R(tau));
  }
  return nd;
}

// int (mu_i - mu_k) dx at nodes and edges
void relative_phase(const PanelGrid& g, const FuchsSystem& sys, const NodeData& nd, int i, int k,
                    std::vector<cd>& dn, std::vector<cd>& de) {
  std::vector<cd> f(g.size());
  for (int n = 0; n < g.size(); ++n) f[n] = nd.mu[n](i) - nd.mu[n](k);
  g.cumulative(f, dn, de);
  (void)sys;
}

// sup over y <= x (forward) or y >= x (backward) of exp(Re d(x) - Re d(y))
double kernel_sup(const std::vector<cd>& dn, bool forward) {
  double best = 0.0;
  if (forward) {
    double lo = 0.0;  // d(x0) = 0
    for (const auto& d : dn) {
      lo = std::min(lo, d.real());
      best = std::max(best, d.real() - lo);
    }
  } else {
    double lo = std::numeric_limits<double>::infinity();
    for (auto it = dn.rbegin(); it != dn.rend(); ++it) {
      lo = std::min(lo, it->real());
      best = std::max(best, it->real() - lo);
    }
  }
  return std::exp(best);
}

// remaining int_X^inf |R| dx from the fitted decay of the last panel
double tail_beyond(const PanelGrid& g, const std::vector<double>& rn) {
  int n = g.size();
  int q = PanelGrid::kQ;
  double f1 = rn[n - 1], f0 = rn[n - q];
  if (f1 == 0.0) return 0.0;
  if (f0 <= f1) return std::numeric_limits<double>::infinity();
  double p = std::log(f0 / f1) / (g.node(n - 1) - g.node(n - q));
  return f1 / p;
}

}  // namespace

double log_measure_integral(const PanelGrid& g, const std::vector<double>& f, double a, double b) {
  double xa = std::log(a), xb = std::log(b);
  xa = std::max(xa, g.x0());
  xb = std::min(xb, g.x1());
  if (xb <= xa) return 0.0;
  const auto& s = PanelGrid::gl_nodes();
  const auto& w = PanelGrid::gl_weights();
  double total = 0.0;
  for (int p = 0; p < g.panels(); ++p) {
    double lo = std::max(xa, g.edge(p)), hi = std::min(xb, g.edge(p + 1));
    if (hi <= lo) continue;
    if (lo == g.edge(p) && hi == g.edge(p + 1)) {
      for (int j = 0; j < PanelGrid::kQ; ++j)
        total += 0.5 * (hi - lo) * w[j] * f[p * PanelGrid::kQ + j];
      continue;
    }
    for (int j = 0; j < PanelGrid::kQ; ++j) {
      double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * s[j];
      total += 0.5 * (hi - lo) * w[j] * g.interpolate(f, x);
    }
  }
  return total;
}

// -------------------------------------------------------------- Levinson

VectorXcd LevinsonSolution::Z_at(double tau) const {
  double x = std::log(tau);
  VectorXcd out(d);
  std::vector<cd> comp(grid.size());
  for (int i = 0; i < d; ++i) {
    for (int n = 0; n < grid.size(); ++n) comp[n] = Z[n](i);
    out(i) = grid.interpolate(comp, x);
  }
  return out;
}

VectorXcd LevinsonSolution::V(double tau) const {
  return Z_at(tau) * std::exp(grid.interpolate(phase, std::log(tau)));
}

double LevinsonSolution::residual_at(double tau) const {
  VectorXcd z = Z_at(tau);
  z(k) -= 1.0;
  return z.norm();
}

LevinsonSolution levinson_solve(const FuchsSystem& sys, int k, double t0, double T,
                                const LevinsonOptions& opt) {
  if (!(t0 >= 1.0 && T > t0)) throw Error(ErrorKind::precondition, "need 1 <= t0 < T");
  int d = sys.d;
  std::vector<double> extra;
  for (double b : sys.breakpoints)
    if (b > t0 && b < T) extra.push_back(std::log(b));
  LevinsonSolution sol;
  sol.k = k;
  sol.d = d;
  sol.grid = PanelGrid::build(std::log(t0), std::log(T), opt.panel_width, extra);
  const auto& g = sol.grid;
  int n = g.size();
  NodeData nd = sample(sys, g);

  // splitting and kernel bounds
  std::vector<std::vector<cd>> dn(d), de(d);
  std::vector<bool> forward(d, false);
  std::vector<FuchsSystem> one = {sys};
  double Cm = 0.0, Cp = 0.0;
  for (int i = 0; i < d; ++i) {
    relative_phase(g, sys, nd, i, k, dn[i], de[i]);
    if (i == k) {
      Cp = std::max(Cp, 1.0);
      continue;
    }
    auto dv = check_dichotomy(one, i, k, T);
    if (dv.alternative == Alternative::inconclusive)
      throw Error(ErrorKind::dichotomy_violation,
                  "pair (" + std::to_string(i) + "," + std::to_string(k) + ") is inconclusive");
    forward[i] = dv.alternative == Alternative::first && dn[i].back().real() < 0;
    if (forward[i]) Cm = std::max(Cm, kernel_sup(dn[i], true));
    else Cp = std::max(Cp, kernel_sup(dn[i], false));
  }
  std::vector<double> rn(n);
  for (int m = 0; m < n; ++m) rn[m] = op_norm(nd.R[m]);
  sol.tail = g.integrate(rn);
  sol.truncation_bound = tail_beyond(g, rn);
  sol.C_minus = Cm;
  sol.C_plus = Cp;
  sol.rate_bound = (Cm + Cp) * sol.tail;
  if (!(sol.rate_bound < 0.5)) {
    std::ostringstream os;
    os << "tail int |R| dtau/tau = " << sol.tail << " with C- + C+ = " << Cm + Cp
       << " does not contract";
    throw Error(ErrorKind::needs_larger_t0, os.str());
  }

  VectorXcd ek = VectorXcd::Zero(d);
  ek(k) = 1.0;
  std::vector<VectorXcd> Z(n, ek), Znew(n);
  std::vector<cd> f(n);
  for (int it = 0; it < opt.max_iter; ++it) {
    for (int m = 0; m < n; ++m) Znew[m] = ek;
    std::vector<VectorXcd> RZ(n);
    for (int m = 0; m < n; ++m) RZ[m] = nd.R[m] * Z[m];
    for (int i = 0; i < d; ++i) {
      for (int m = 0; m < n; ++m) f[m] = RZ[m](i);
      if (forward[i]) {
        auto F = g.weighted_forward(dn[i], de[i], f);
        for (int m = 0; m < n; ++m) Znew[m](i) += F[m];
      } else {
        auto G = g.weighted_backward(dn[i], de[i], f);
        for (int m = 0; m < n; ++m) Znew[m](i) -= G[m];
      }
    }
    double inc = 0.0;
    for (int m = 0; m < n; ++m) inc = std::max(inc, (Znew[m] - Z[m]).norm());
    std::swap(Z, Znew);
    sol.iterations = it + 1;
    sol.increments.push_back(inc);
    if (inc < opt.tol) break;
  }
  // observed contraction: worst ratio of successive increments, ignoring the
  // roundoff floor
  for (size_t i = 1; i < sol.increments.size(); ++i)
    if (sol.increments[i - 1] > 1e3 * opt.tol)
      sol.observed_rate = std::max(sol.observed_rate, sol.increments[i] / sol.increments[i - 1]);
  sol.Z = Z;

  std::vector<cd> fk(n), pn, pe;
  for (int m = 0; m < n; ++m) fk[m] = nd.mu[m](k);
  g.cumulative(fk, pn, pe);
  sol.phase = pn;
  for (int m = 0; m < n; ++m) {
    sol.residual_tau.push_back(std::exp(g.node(m)));
    VectorXcd z = Z[m];
    z(k) -= 1.0;
    sol.residual.push_back(z.norm());
  }
  // ODE residual in Z variables: dZ/dx - (D - mu_k + R) Z
  std::vector<std::vector<cd>> dZ(d);
  for (int i = 0; i < d; ++i) {
    for (int m = 0; m < n; ++m) f[m] = Z[m](i);
    dZ[i] = g.derivative(f);
  }
  double worst = 0.0;
  for (int m = 0; m < n; ++m) {
    VectorXcd rhs = nd.R[m] * Z[m];
    for (int i = 0; i < d; ++i) rhs(i) += (nd.mu[m](i) - nd.mu[m](k)) * Z[m](i);
    VectorXcd lhs(d);
    for (int i = 0; i < d; ++i) lhs(i) = dZ[i][m];
    worst = std::max(worst, (lhs - rhs).norm() / Z[m].norm());
  }
  sol.ode_residual = worst;
  return sol;
}

// ---------------------------------------------------- fundamental matrix

MatrixXcd BasisFundamental::X(double tau) const {
  int d = int(solutions.size());
  MatrixXcd x(d, d);
  for (int c = 0; c < d; ++c) x.col(c) = solutions[c].V(tau);
  return x;
}

MatrixXcd BasisFundamental::E(double tau) const { return X(tau) * Xs_inv; }

BasisFundamental fundamental_from_basis(const std::vector<LevinsonSolution>& sols, double s) {
  if (sols.empty()) throw Error(ErrorKind::precondition, "empty basis");
  int d = int(sols.size());
  BasisFundamental bf;
  bf.solutions = sols;
  bf.s = s;
  MatrixXcd Zs(d, d);
  double colmax = 0.0, colprod = 1.0;
  for (int c = 0; c < d; ++c) {
    Zs.col(c) = sols[c].Z_at(s);
    colmax = std::max(colmax, Zs.col(c).norm());
    colprod *= Zs.col(c).norm();
  }
  cd det = Zs.determinant();
  if (std::abs(det) < 1e-12 * colprod)
    throw Error(ErrorKind::degenerate_basis, "solutions are numerically dependent at s");
  bf.Xs_inv = bf.X(s).inverse();
  // E = Z(t) Lambda(t) Lambda(s)^{-1} Z(s)^{-1}; Hadamard bound for Z(s)^{-1}
  double zsup = 0.0;
  const auto& g = sols[0].grid;
  for (int m = 0; m < g.size(); ++m) {
    MatrixXcd z(d, d);
    for (int c = 0; c < d; ++c) z.col(c) = sols[c].Z[m];
    zsup = std::max(zsup, op_norm(z));
  }
  bf.C = zsup * d * std::pow(colmax, d - 1) / std::abs(det);
  bf.max_re_mu = -std::numeric_limits<double>::infinity();
  for (const auto& so : sols) {
    // average exponent of the phase, exact for constant mu
    double x = g.node(g.size() - 1), x0 = g.x0();
    bf.max_re_mu = std::max(bf.max_re_mu, so.phase.back().real() / (x - x0));
  }
  return bf;
}

MatrixXcd fuchs_propagator(const FuchsSystem& sys, double s, double t, double tol) {
  OdeOptions o;
  o.rtol = tol;
  Fehlberg78<MatrixXcd> dp(
      [&](double x, const MatrixXcd& y, MatrixXcd& dy) {
        double tau = std::exp(x);
        MatrixXcd A = sys.R(tau);
        A.diagonal() += sys.mu(tau);
        dy = A * y;
      },
      o);
  MatrixXcd E = MatrixXcd::Identity(sys.d, sys.d);
  // stop at breakpoints so the integrator never steps across a jump
  std::vector<double> stops;
  for (double b : sys.breakpoints)
    if (b > s && b < t) stops.push_back(b);
  std::sort(stops.begin(), stops.end());
  stops.push_back(t);
  double x = std::log(s);
  for (double b : stops) {
    dp.reset();
    dp.integrate(E, x, std::log(b), "fuchs");
    x = std::log(b);
  }
  return E;
}

ScalingReport scaling_uniformity(const FuchsSystem& sys, const std::vector<double>& lambdas,
                                 double s, double t) {
  ScalingReport rep;
  for (double lam : lambdas) {
    if (lam < 1.0) throw Error(ErrorKind::precondition, "scaling factors must be >= 1");
    double mx = -std::numeric_limits<double>::infinity();
    for (double tau : log_spaced(lam * s - 1.0, lam * t - 1.0, 32))
      mx = std::max(mx, sys.mu(tau + 1.0).real().maxCoeff());
    double nrm = s == t ? 1.0 : op_norm(fuchs_propagator(sys, lam * s, lam * t));
    double r = nrm / std::pow(t / s, mx);
    rep.lambdas.push_back(lam);
    rep.ratios.push_back(r);
    rep.worst = std::max(rep.worst, r);
  }
  if (!rep.ratios.empty()) rep.worst_over_first = rep.worst / rep.ratios.front();
  return rep;
}

// ------------------------------------------------------- Hartman-Wintner

namespace {

MatrixXcd interp_matrix(const PanelGrid& g, const std::vector<MatrixXcd>& M, double tau) {
  int d = int(M[0].rows());
  MatrixXcd out(d, d);
  std::vector<cd> c(g.size());
  double x = std::log(tau);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < g.size(); ++m) c[m] = M[m](i, j);
      out(i, j) = g.interpolate(c, x);
    }
  return out;
}

}  // namespace

MatrixXcd HWTransform::N_at(double tau) const { return interp_matrix(grid, N, tau); }
MatrixXcd HWTransform::R1_at(double tau) const { return interp_matrix(grid, R1, tau); }

std::vector<double> HWTransform::taus() const {
  std::vector<double> t;
  for (double x : grid.nodes()) t.push_back(std::exp(x));
  return t;
}

HWTransform hartman_wintner(const FuchsSystem& sys, double sigma, double t0, double T,
                            double panel_width) {
  if (!(sigma > 1.0 && sigma <= 2.0)) throw Error(ErrorKind::precondition, "sigma must lie in (1,2]");
  if (!(t0 >= 1.0 && T > t0)) throw Error(ErrorKind::precondition, "need 1 <= t0 < T");
  int d = sys.d;
  std::vector<double> extra;
  for (double b : sys.breakpoints)
    if (b > t0 && b < T) extra.push_back(std::log(b));
  HWTransform hw;
  hw.grid = PanelGrid::build(std::log(t0), std::log(T), panel_width, extra);
  const auto& g = hw.grid;
  int n = g.size();
  NodeData nd = sample(sys, g);

  // ordering by increasing real part (the proof's convention)
  hw.permutation.resize(d);
  std::iota(hw.permutation.begin(), hw.permutation.end(), 0);
  VectorXcd mu0 = nd.mu[0];
  std::stable_sort(hw.permutation.begin(), hw.permutation.end(),
                   [&](int a, int b) { return mu0(a).real() < mu0(b).real(); });

  std::vector<double> rs(n);
  for (int m = 0; m < n; ++m) rs[m] = std::pow(op_norm(nd.R[m]), sigma);
  hw.sigma_integral = g.integrate(rs);
  if (!std::isfinite(hw.sigma_integral))
    throw Error(ErrorKind::precondition, "int |R|^sigma dtau/tau is not finite on the horizon");

  hw.N.assign(n, MatrixXcd::Zero(d, d));
  hw.backward.assign(d, std::vector<int>(d, 0));
  std::vector<FuchsSystem> one = {sys};
  std::vector<cd> f(n), dn, de;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      auto dv = check_dichotomy(one, i, j, T);
      bool fwd;
      if (dv.C_minus < 0) fwd = true;
      else if (dv.C_plus > 0) fwd = false;
      else
        throw Error(ErrorKind::dichotomy_violation,
                    "Re(mu_" + std::to_string(i) + " - mu_" + std::to_string(j) +
                        ") is not bounded away from 0");
      hw.backward[i][j] = fwd ? 0 : 1;
      std::vector<cd> mf(n);
      for (int m = 0; m < n; ++m) mf[m] = nd.mu[m](i) - nd.mu[m](j);
      g.cumulative(mf, dn, de);
      for (int m = 0; m < n; ++m) f[m] = nd.R[m](i, j);
      if (fwd) {
        auto F = g.weighted_forward(dn, de, f);
        for (int m = 0; m < n; ++m) hw.N[m](i, j) = F[m];
      } else {
        auto G = g.weighted_backward(dn, de, f);
        for (int m = 0; m < n; ++m) hw.N[m](i, j) = -G[m];
        double rend = std::abs(f[n - 1]);
        hw.truncation_bound = std::max(hw.truncation_bound, rend / dv.C_plus);
      }
    }

  hw.F.resize(n);
  hw.B.resize(n);
  hw.R = nd.R;
  hw.R1.resize(n);
  MatrixXcd I = MatrixXcd::Identity(d, d);
  for (int m = 0; m < n; ++m) {
    hw.F[m] = MatrixXcd::Zero(d, d);
    hw.F[m].diagonal() = nd.R[m].diagonal();
    hw.B[m] = hw.N[m] * hw.F[m] - nd.R[m] * hw.N[m];
    // (t d_t - D - R)(I+N) = (I+N)(t d_t - D - F) + B, so W = (I+N)^{-1} V
    // solves t d_t W = (D + F - (I+N)^{-1} B) W
    hw.R1[m] = -(I + hw.N[m]).inverse() * hw.B[m];
  }

  // valid_from: N stays below 1/2 from here on
  int last_bad = -1;
  for (int m = 0; m < n; ++m)
    if (op_norm(hw.N[m]) >= 0.5) last_bad = m;
  if (last_bad == n - 1) throw Error(ErrorKind::horizon, "|N| never drops below 1/2 on the horizon");
  hw.valid_from = last_bad < 0 ? t0 : std::exp(g.node(last_bad + 1));

  // t dN/dt - (DN - ND) - R~ at the nodes
  double worst = 0.0;
  std::vector<std::vector<cd>> dN(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      for (int m = 0; m < n; ++m) f[m] = hw.N[m](i, j);
      dN[i * d + j] = g.derivative(f);
    }
  for (int m = 0; m < n; ++m) {
    MatrixXcd lhs(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) lhs(i, j) = dN[i * d + j][m];
    MatrixXcd D = nd.mu[m].asDiagonal();
    MatrixXcd res = lhs - (D * hw.N[m] - hw.N[m] * D) - (nd.R[m] - hw.F[m]);
    worst = std::max(worst, op_norm(res) / std::max(1e-300, op_norm(nd.R[m])));
  }
  hw.identity_residual = worst;

  // transformed system, N interpolated between nodes
  auto shared = std::make_shared<HWTransform>(hw);
  FuchsSystem out;
  out.d = d;
  out.parameter_set = sys.parameter_set + " (HW transformed)";
  out.breakpoints = sys.breakpoints;
  DiagFn mu = sys.mu;
  MatFn R = sys.R;
  out.mu = [mu, R](double tau) -> VectorXcd { return mu(tau) + R(tau).diagonal(); };
  out.R = [shared, R, d](double tau) -> MatrixXcd {
    MatrixXcd Nt = shared->N_at(tau);
    MatrixXcd Rt = R(tau);
    MatrixXcd Ft = MatrixXcd::Zero(d, d);
    Ft.diagonal() = Rt.diagonal();
    MatrixXcd Bt = Nt * Ft - Rt * Nt;
    return -(MatrixXcd::Identity(d, d) + Nt).inverse() * Bt;
  };
  hw.transformed = out;
  return hw;
}

}  // namespace fuchswave
