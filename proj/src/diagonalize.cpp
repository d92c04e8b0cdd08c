#include "fuchswave/diagonalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fuchswave/error.hpp"
#include "fuchswave/ode.hpp"
#include "fuchswave/quadrature.hpp"

namespace fuchswave {

// ---------------------------------------------------------------- JetMat2

JetMat2::JetMat2(int order) {
  for (auto& row : a)
    for (auto& e : row) e = CJet(order);
}

JetMat2 JetMat2::identity(int order) {
  JetMat2 r(order);
  r.a[0][0] = CJet(order, 1.0);
  r.a[1][1] = CJet(order, 1.0);
  return r;
}

JetMat2 JetMat2::constant(const Matrix2cd& m, int order) {
  JetMat2 r(order);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.a[i][j] = CJet(order, m(i, j));
  return r;
}

int JetMat2::order() const {
  int o = a[0][0].order();
  for (const auto& row : a)
    for (const auto& e : row) o = std::min(o, e.order());
  return o;
}

Matrix2cd JetMat2::value() const {
  Matrix2cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = a[i][j].value();
  return m;
}

Matrix2cd JetMat2::derivative(int k) const {
  Matrix2cd m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m(i, j) = a[i][j].derivative(k);
  return m;
}

JetMat2 JetMat2::deriv() const {
  JetMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.a[i][j] = a[i][j].deriv();
  return r;
}

JetMat2 JetMat2::diag() const {
  JetMat2 r = *this;
  r.a[0][1] = CJet(a[0][1].order());
  r.a[1][0] = CJet(a[1][0].order());
  return r;
}

JetMat2 operator+(const JetMat2& x, const JetMat2& y) {
  JetMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.a[i][j] = x.a[i][j] + y.a[i][j];
  return r;
}

JetMat2 operator-(const JetMat2& x, const JetMat2& y) {
  JetMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.a[i][j] = x.a[i][j] - y.a[i][j];
  return r;
}

JetMat2 operator*(const JetMat2& x, const JetMat2& y) {
  JetMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.a[i][j] = x.a[i][0] * y.a[0][j] + x.a[i][1] * y.a[1][j];
  return r;
}

JetMat2 operator*(cd s, const JetMat2& x) {
  JetMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.a[i][j] = x.a[i][j] * s;
  return r;
}

// ------------------------------------------------------------- transform

Matrix2cd wkb_M() {
  Matrix2cd M;
  M << 1.0, -1.0, 1.0, 1.0;
  return M / std::sqrt(2.0);
}

Matrix2cd wkb_Minv() {
  Matrix2cd M;
  M << 1.0, 1.0, -1.0, 1.0;
  return M / std::sqrt(2.0);
}

PreliminaryTransform preliminary_transform(const CoefficientModel& model, double t, double xi) {
  if (!(xi > 0.0)) throw Error(ErrorKind::precondition, "preliminary transform needs |xi| > 0");
  PreliminaryTransform p;
  p.M = wkb_M();
  p.Minv = wkb_Minv();
  double b = model.b(t), m = model.m(t);
  p.D = Matrix2cd::Zero();
  p.D(0, 0) = xi;
  p.D(1, 1) = -xi;
  p.B = Matrix2cd::Constant(0.5 * kI * b);
  p.C << 1.0, -1.0, 1.0, -1.0;
  p.C *= m / (2.0 * xi);
  return p;
}

Matrix2cd E0(double t, double s, double xi) {
  Matrix2cd e = Matrix2cd::Zero();
  e(0, 0) = std::exp(kI * xi * (t - s));
  e(1, 1) = std::exp(-kI * xi * (t - s));
  return e;
}

// ----------------------------------------------------------------- stage

namespace {

// D_t = -i d/dt
JetMat2 Dt(const JetMat2& x) { return cd(0.0, -1.0) * x.deriv(); }

// [D, X] with D = diag(xi, -xi)
JetMat2 commD(const JetMat2& x, double xi) {
  JetMat2 r = x;
  r.a[0][0] = x.a[0][0] * cd(0.0);
  r.a[1][1] = x.a[1][1] * cd(0.0);
  r.a[0][1] = x.a[0][1] * cd(2.0 * xi);
  r.a[1][0] = x.a[1][0] * cd(-2.0 * xi);
  return r;
}

// new N part from the non-diagonal part of a remainder S:
// [D, N] = S_offdiag, so n12 = S12/(2 xi), n21 = -S21/(2 xi)
JetMat2 n_from(const JetMat2& S, double xi) {
  int o = S.order();
  JetMat2 n(o);
  n.a[0][1] = S.a[0][1] * cd(1.0 / (2.0 * xi));
  n.a[1][0] = S.a[1][0] * cd(-1.0 / (2.0 * xi));
  return n;
}

}  // namespace

Matrix2cd StagePoint::Rk() const {
  return -Nk.value().inverse() * Bk.value();
}

DiagonalizationStage::DiagonalizationStage(CoefficientModel model, int k, ZoneConfig zone)
    : model_(std::move(model)), k_(k), zone_(std::move(zone)) {
  if (k < 1) throw Error(ErrorKind::precondition, "diagonalisation needs k >= 1");
  if (k > model_.ell - 1)
    throw Error(ErrorKind::k_too_large, "k = " + std::to_string(k) + " exceeds ell - 1 = " +
                                            std::to_string(model_.ell - 1));
  if (k > kMaxSteps) throw Error(ErrorKind::k_too_large, "k exceeds the jet order budget");
}

StagePoint DiagonalizationStage::at(double t, double xi, int extra) const {
  if (!(xi > 0.0)) throw Error(ErrorKind::precondition, "stage evaluation needs |xi| > 0");
  int K = k_ + extra;
  if (K > CJet::kMaxOrder) throw Error(ErrorKind::k_too_large, "derivative budget exceeded");
  CJet b = to_complex(model_.b_jet(t, K));
  CJet m = to_complex(model_.m_jet(t, K));
  StagePoint p;
  JetMat2 B(K), C(K);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      B.a[i][j] = b * cd(0.0, 0.5);
      C.a[i][j] = m * cd((j == 0 ? 1.0 : -1.0) / (2.0 * xi));
    }
  p.R0 = B + C;

  // first step only removes B; C is of lower order and goes into B^(1)
  JetMat2 S = cd(-1.0) * B;
  p.Nk = JetMat2::identity(K);
  p.Fk = JetMat2(K);
  for (int j = 1; j <= k_; ++j) {
    JetMat2 F = cd(-1.0) * S.diag();
    JetMat2 N = n_from(S, xi);
    p.F_parts.push_back(F);
    p.N_parts.push_back(N);
    p.Fk = p.Fk + F;
    p.Nk = p.Nk + N;
    // B^(j) from the operator identity
    S = Dt(p.Nk) - commD(p.Nk, xi) - p.R0 * p.Nk + p.Nk * p.Fk;
    p.B_parts.push_back(S);
  }
  p.Bk = S;
  return p;
}

Matrix2cd DiagonalizationStage::N_k(double t, double xi) const { return at(t, xi).Nk.value(); }
Matrix2cd DiagonalizationStage::F_k(double t, double xi) const { return at(t, xi).Fk.value(); }
Matrix2cd DiagonalizationStage::R_k(double t, double xi) const { return at(t, xi).Rk(); }

Matrix2cd DiagonalizationStage::q_generator(double tau, double s, double xi) const {
  StagePoint p = at(tau, xi);
  Matrix2cd G = p.Fk.value() - p.F_parts[0].value() + p.Rk();
  cd ph = std::exp(cd(0.0, 2.0 * xi * (tau - s)));
  G(0, 1) /= ph;
  G(1, 0) *= ph;
  return G;
}

double DiagonalizationStage::identity_residual(double t, double xi) const {
  // d_t N_k by a five-point difference, independent of the jets
  double h = 1e-3 * (1.0 + t);
  if (t - 2 * h < 0.0) h = t / 2.0;
  Matrix2cd dN;
  if (h > 0.0) {
    dN = (-N_k(t + 2 * h, xi) + 8.0 * N_k(t + h, xi) - 8.0 * N_k(t - h, xi) +
          N_k(t - 2 * h, xi)) /
         (12.0 * h);
  } else {
    h = 1e-3;
    dN = (-3.0 * N_k(t, xi) + 4.0 * N_k(t + h, xi) - N_k(t + 2 * h, xi)) / (2.0 * h);
  }
  StagePoint p = at(t, xi);
  Matrix2cd Nk = p.Nk.value(), Fk = p.Fk.value(), R0 = p.R0.value();
  Matrix2cd D = Matrix2cd::Zero();
  D(0, 0) = xi;
  D(1, 1) = -xi;
  Matrix2cd lhs = -kI * dN - (D * Nk - Nk * D) - R0 * Nk + Nk * Fk;
  return op_norm(Matrix2cd(lhs - p.Bk.value()));
}

SymbolMatrix DiagonalizationStage::symbol(const std::string& kind, int j) const {
  SymbolMatrix s;
  s.name = kind + "^(" + std::to_string(j) + ")";
  s.smoothness = 2;
  int which;
  if (kind == "N") {
    if (j < 1 || j > k_) throw Error(ErrorKind::precondition, "N part out of range");
    s.m1 = -j;
    s.m2 = j;
    which = 0;
  } else if (kind == "F") {
    if (j < 0 || j > k_ - 1) throw Error(ErrorKind::precondition, "F part out of range");
    s.m1 = -j;
    s.m2 = j + 1;
    which = 1;
  } else if (kind == "B") {
    if (j < 1 || j > k_) throw Error(ErrorKind::precondition, "B part out of range");
    s.m1 = -j;
    s.m2 = j + 1;
    which = 2;
  } else {
    throw Error(ErrorKind::precondition, "unknown symbol kind " + kind);
  }
  auto self = *this;
  s.eval = [self, which, j](double t, double xi, int kt) {
    StagePoint p = self.at(t, xi, kt);
    const JetMat2& J = which == 0   ? p.N_parts[j - 1]
                       : which == 1 ? p.F_parts[j]
                                    : p.B_parts[j - 1];
    std::vector<Matrix2cd> out;
    for (int d = 0; d <= kt; ++d) out.push_back(J.derivative(d));
    return out;
  };
  return s;
}

nlohmann::json DiagonalizationStage::audit_json(const AuditGrid& grid) const {
  nlohmann::json j;
  j["k"] = k_;
  j["zone"] = to_json(zone_);
  j["model"] = to_json(model_);
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 1; i <= k_; ++i) arr.push_back(to_json(audit_symbol(symbol("N", i), zone_, grid), grid));
  for (int i = 0; i < k_; ++i) arr.push_back(to_json(audit_symbol(symbol("F", i), zone_, grid), grid));
  for (int i = 1; i <= k_; ++i) arr.push_back(to_json(audit_symbol(symbol("B", i), zone_, grid), grid));
  j["symbols"] = arr;
  return j;
}

// ---------------------------------------------------------------- audits

SymbolAudit audit_symbol(const SymbolMatrix& s, const ZoneConfig& zone, const AuditGrid& grid) {
  SymbolAudit a;
  a.name = s.name;
  a.m1 = s.m1;
  a.m2 = s.m2;
  int KT = std::min(grid.max_t_derivs, s.smoothness);
  int KA = std::min(grid.max_xi_derivs, 2);
  a.worst.assign(KT + 1, std::vector<double>(KA + 1, 0.0));
  a.inner = a.worst;
  double t_in = std::sqrt(1.0 + grid.T) - 1.0;
  double r_in = std::sqrt(grid.ratio_max);
  for (double t : log_spaced(0.0, grid.T, grid.nt)) {
    for (int ir = 0; ir < grid.nr; ++ir) {
      double r = std::pow(grid.ratio_max, double(ir) / (grid.nr - 1));
      double xi = r * zone.N / (1.0 + t);
      double h = 5e-3 * xi;
      auto Sm = s.eval(t, xi - h, KT);
      auto S0 = s.eval(t, xi, KT);
      auto Sp = s.eval(t, xi + h, KT);
      bool inner = t <= t_in && r <= r_in;
      for (int kt = 0; kt <= KT; ++kt) {
        Matrix2cd d[3] = {S0[kt], (Sp[kt] - Sm[kt]) / (2.0 * h),
                          (Sp[kt] - 2.0 * S0[kt] + Sm[kt]) / (h * h)};
        for (int al = 0; al <= KA; ++al) {
          double scale = std::pow(xi, s.m1 - al) * std::pow(1.0 + t, -s.m2 - kt);
          double q = op_norm(d[al]) / scale;
          a.worst[kt][al] = std::max(a.worst[kt][al], q);
          if (inner) a.inner[kt][al] = std::max(a.inner[kt][al], q);
        }
      }
    }
  }
  a.pass = true;
  for (int kt = 0; kt <= KT; ++kt)
    for (int al = 0; al <= KA; ++al) {
      a.worst_constant = std::max(a.worst_constant, a.worst[kt][al]);
      if (!(a.worst[kt][al] <= 2.0 * a.inner[kt][al] + 1e-300)) a.pass = false;
    }
  return a;
}

nlohmann::json to_json(const SymbolAudit& a, const AuditGrid& grid) {
  return {{"symbol", a.name},
          {"order", {a.m1, a.m2}},
          {"grid",
           {{"T", grid.T}, {"ratio_max", grid.ratio_max}, {"nt", grid.nt}, {"nr", grid.nr}}},
          {"worst_constant", a.worst_constant},
          {"constants", a.worst},
          {"pass", a.pass}};
}

// ----------------------------------------------------------- zone constant

double min_zone_constant(const DiagonalizationStage& stage, double T) {
  if (stage.model().trivial()) return 0.0;
  auto times = log_spaced(0.0, T, 40);
  const double ratios[] = {1.0, 1.25, 1.6, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0};
  auto worst = [&](double N) {
    double w = 0.0;
    for (double t : times)
      for (double r : ratios) {
        double xi = r * N / (1.0 + t);
        Matrix2cd d = stage.N_k(t, xi) - Matrix2cd::Identity();
        w = std::max(w, op_norm(d));
      }
    return w;
  };
  double lo = std::log(1e-3), hi = std::log(1e3);
  if (worst(std::exp(hi)) > 0.5) return std::numeric_limits<double>::infinity();
  if (worst(std::exp(lo)) <= 0.5) return std::exp(lo);
  for (int it = 0; it < 50; ++it) {
    double mid = 0.5 * (lo + hi);
    if (worst(std::exp(mid)) <= 0.5) hi = mid;
    else lo = mid;
  }
  return std::exp(hi);
}

// ----------------------------------------------------------- Q propagator

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Q(b, a) for the generator referenced at s_ref, Peano-Baker on panels
QEvaluation pb_segment(const DiagonalizationStage& st, double s_ref, double a, double b, double xi,
                       int depth) {
  constexpr int q = PanelGrid::kQ;
  const auto& nodes = PanelGrid::gl_nodes();
  const auto& w = PanelGrid::gl_weights();
  const auto& S = PanelGrid::integration_matrix();
  QEvaluation ev;
  ev.s = a;
  ev.t = b;
  ev.xi = xi;
  ev.series_depth = depth;
  double tail = 0.0;
  const double pi = std::acos(-1.0);
  double x = a;
  Matrix2cd G[q], term[q], next[q];
  while (x < b) {
    double h = std::min({pi / xi, 0.25 * (1.0 + x), b - x});
    double Cp;
    for (;;) {
      Cp = 0.0;
      for (int j = 0; j < q; ++j) {
        G[j] = st.q_generator(x + 0.5 * h * (1.0 + nodes[j]), s_ref, xi);
        Cp += 0.5 * h * w[j] * op_norm(G[j]);
      }
      if (Cp <= 0.25 || h < 1e-6 * (1.0 + x)) break;
      h *= 0.5;
    }
    Matrix2cd P = Matrix2cd::Identity();
    for (int j = 0; j < q; ++j) term[j] = Matrix2cd::Identity();
    for (int lev = 1; lev <= depth; ++lev) {
      Matrix2cd end = Matrix2cd::Zero();
      for (int j = 0; j < q; ++j) {
        next[j] = Matrix2cd::Zero();
        end += w[j] * (kI * G[j] * term[j]);
      }
      for (int j = 0; j < q; ++j) {
        Matrix2cd f = kI * G[j] * term[j];
        for (int i = 0; i < q; ++i) next[i] += S(i, j) * f;
      }
      for (int j = 0; j < q; ++j) term[j] = 0.5 * h * next[j];
      P += 0.5 * h * end;
    }
    ev.Q = P * ev.Q;
    ev.C_total += Cp;
    tail += std::pow(Cp, depth + 1) / factorial(depth + 1) * std::exp(Cp);
    ++ev.panels;
    x += h;
  }
  ev.tail_bound = tail * std::exp(ev.C_total);
  return ev;
}

QEvaluation ode_segment(const DiagonalizationStage& st, double s_ref, double a, double b,
                        double xi, double tol) {
  QEvaluation ev;
  ev.s = a;
  ev.t = b;
  ev.xi = xi;
  ev.used_ode = true;
  ev.series_depth = 0;
  OdeOptions o;
  o.rtol = tol;
  o.atol = tol * 1e-3;
  o.h_max = 0.5 / xi;
  double C = 0.0;
  Fehlberg78<Matrix2cd> dp(
      [&](double tau, const Matrix2cd& y, Matrix2cd& dy) {
        dy = kI * st.q_generator(tau, s_ref, xi) * y;
      },
      o);
  Matrix2cd Q = Matrix2cd::Identity();
  dp.integrate(Q, a, b, "Q_k");
  ev.Q = Q;
  // C_total by Gauss panels
  auto g = PanelGrid::build(a, b, std::min(0.25 * (1.0 + a), 3.0 / xi));
  std::vector<double> nrm(g.size());
  for (int i = 0; i < g.size(); ++i) nrm[i] = op_norm(st.q_generator(g.node(i), s_ref, xi));
  C = g.integrate(nrm);
  ev.C_total = C;
  return ev;
}

QEvaluation q_segment(const DiagonalizationStage& st, double s_ref, double a, double b, double xi,
                      int depth, double tol) {
  if (b == a) {
    QEvaluation ev;
    ev.s = a;
    ev.t = b;
    ev.xi = xi;
    ev.series_depth = depth;
    return ev;
  }
  if (depth > 0) {
    auto ev = pb_segment(st, s_ref, a, b, xi, depth);
    if (ev.tail_bound <= tol) return ev;
  }
  return ode_segment(st, s_ref, a, b, xi, tol);
}

}  // namespace

QEvaluation q_propagator(const DiagonalizationStage& stage, double s, double t, double xi,
                         int depth, double tol) {
  if (t < s) throw Error(ErrorKind::precondition, "Q_k needs t >= s");
  if ((1.0 + s) * xi < stage.zone().N * (1.0 - 1e-12))
    throw Error(ErrorKind::precondition, "(s, xi) is not in the hyperbolic zone");
  return q_segment(stage, s, s, t, xi, depth, tol);
}

// -------------------------------------------------------- representation

Representation assemble_representation(const DiagonalizationStage& stage, double s, double t,
                                       double xi, int depth) {
  if (t < s) throw Error(ErrorKind::precondition, "representation needs t >= s");
  Matrix2cd I = Matrix2cd::Identity();
  Matrix2cd Ns = stage.N_k(s, xi), Nt = stage.N_k(t, xi);
  Representation rep;
  rep.Nk_s_dev = op_norm(Matrix2cd(Ns - I));
  rep.Nk_t_dev = op_norm(Matrix2cd(Nt - I));
  if (rep.Nk_s_dev >= 1.0 || rep.Nk_t_dev >= 1.0)
    throw Error(ErrorKind::zone_constant,
                "N_k is not safely invertible here; |N_k - I| = " +
                    std::to_string(std::max(rep.Nk_s_dev, rep.Nk_t_dev)) + ", increase N");
  rep.q = q_propagator(stage, s, t, xi, depth);
  double ratio = std::exp(log_lambda(stage.model(), s) - log_lambda(stage.model(), t));
  rep.E.E = ratio * wkb_M() * Nt * E0(t, s, xi) * rep.q.Q * Ns.inverse() * wkb_Minv();
  rep.E.s = s;
  rep.E.t = t;
  rep.E.xi = xi;
  rep.E.provenance = Provenance::representation;
  rep.E.estimated_error = rep.q.tail_bound;
  return rep;
}

Representation assemble_representation_small(const DiagonalizationStage& stage, double t,
                                             double xi, const OracleOptions& opt) {
  const auto& z = stage.zone();
  if (!(xi > 0.0 && xi <= z.N))
    throw Error(ErrorKind::precondition, "small-frequency representation needs 0 < |xi| <= N");
  double th = theta(z, xi);
  if (t < th) throw Error(ErrorKind::precondition, "small-frequency representation needs t >= theta");
  auto diss = integrate_fundamental(ModalSystem{stage.model(), z, xi, SystemForm::diss_system},
                                    0.0, th, opt);
  auto rep = assemble_representation(stage, th, t, xi);
  // (N/(1+t)) u = |xi| u on the boundary, so the variables glue
  rep.E.E = rep.E.E * diss.E;
  rep.E.s = 0.0;
  rep.E.estimated_error += diss.estimated_error;
  return rep;
}

// ----------------------------------------------------------------- limit

QLimit q_limit(const DiagonalizationStage& stage, double s, double xi, double tol, double t_first,
               double factor, double t_max) {
  if (!(factor > 1.0 && t_first > 0.0)) throw Error(ErrorKind::precondition, "bad doubling schedule");
  QLimit L;
  Matrix2cd Q = q_propagator(stage, s, s, xi).Q;
  double prev_t = s;
  std::vector<Matrix2cd> extrap;
  for (int j = 0;; ++j) {
    double T = s + t_first * std::pow(factor, j);
    if (T > t_max) break;
    Q = q_segment(stage, s, prev_t, T, xi, 8, 1e-13).Q * Q;
    prev_t = T;
    L.times.push_back(T);
    L.values.push_back(Q);
    L.t_reached = T;
    size_t n = L.values.size();
    if (n < 3) continue;
    const Matrix2cd &x0 = L.values[n - 3], &x1 = L.values[n - 2], &x2 = L.values[n - 1];
    Matrix2cd A;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) {
        cd d1 = x2(i, k) - x1(i, k), d0 = x1(i, k) - x0(i, k);
        cd den = d1 - d0;
        A(i, k) = std::abs(den) > 1e-14 * (std::abs(x2(i, k)) + 1e-300) &&
                          std::abs(d1) < std::abs(d0)
                      ? x2(i, k) - d1 * d1 / den
                      : x2(i, k);
      }
    extrap.push_back(A);
    if (extrap.size() >= 2) {
      double ch = op_norm(Matrix2cd(extrap.back() - extrap[extrap.size() - 2]));
      L.changes.push_back(ch);
      if (ch < tol) {
        L.Q = A;
        return L;
      }
    }
  }
  throw Error(ErrorKind::horizon,
              "Q_k(t) did not settle to " + std::to_string(tol) + " before t = " +
                  std::to_string(L.t_reached));
}

// ------------------------------------------------------ boundary symbol

BoundarySymbolReport boundary_symbol_check(const CoefficientModel& model, const ZoneConfig& zone,
                                           double xi_min, double xi_max, int points) {
  if (!classify_regime(model).rem_hyp_dominant)
    throw Error(ErrorKind::regime_unsupported,
                "the zone-boundary symbol estimate needs b0(b0-2) < 4 m0");
  if (!(xi_min > 0.0 && xi_max <= zone.N && xi_min < xi_max))
    throw Error(ErrorKind::precondition, "need 0 < xi_min < xi_max <= N");
  BoundarySymbolReport rep;
  OracleOptions o;
  o.tol = 1e-12;
  auto S = [&](double u) {
    double xi = std::exp(u);
    double th = theta(zone, xi);
    auto E = integrate_fundamental(ModalSystem{model, zone, xi, SystemForm::diss_system}, 0.0, th, o);
    return Matrix2cd(eval_lambda(model, th) * E.E);
  };
  const double h = 0.05;
  double u_mid = 0.5 * (std::log(xi_min) + std::log(xi_max));
  for (int i = 0; i < points; ++i) {
    double u = std::log(xi_min) + (std::log(xi_max) - std::log(xi_min)) * i / (points - 1);
    Matrix2cd a = S(u - h), b = S(u), c = S(u + h);
    Matrix2cd d1 = (c - a) / (2 * h);
    Matrix2cd d2 = (c - 2.0 * b + a) / (h * h);
    // xi d/dxi = d/du, xi^2 d^2/dxi^2 = d^2/du^2 - d/du
    double v[3] = {op_norm(b), op_norm(d1), op_norm(Matrix2cd(d2 - d1))};
    rep.xi.push_back(std::exp(u));
    rep.c0.push_back(v[0]);
    rep.c1.push_back(v[1]);
    rep.c2.push_back(v[2]);
    for (int a2 = 0; a2 < 3; ++a2) {
      rep.C[a2] = std::max(rep.C[a2], v[a2]);
      if (u >= u_mid) rep.C_inner[a2] = std::max(rep.C_inner[a2], v[a2]);
    }
  }
  rep.pass = true;
  for (int a2 = 0; a2 < 3; ++a2)
    if (rep.C[a2] > 2.0 * rep.C_inner[a2] + 1e-300) rep.pass = false;
  return rep;
}

}  // namespace fuchswave
