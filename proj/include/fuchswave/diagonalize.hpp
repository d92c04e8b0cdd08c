#pragma once

// WKB diagonalisation in the hyperbolic zone. With V = M^{-1} U the hyperbolic
// system reads D_t V = (D + B + C) V; N_k = I + N^(1) + ... + N^(k) removes the
// non-diagonal part step by step and R_k = -N_k^{-1} B^(k) is what is left.

#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/jet.hpp"
#include "fuchswave/linalg.hpp"
#include "fuchswave/modal.hpp"
#include "fuchswave/zones.hpp"

namespace fuchswave {

// 2x2 matrix of complex jets in t
struct JetMat2 {
  CJet a[2][2];

  JetMat2() = default;
  explicit JetMat2(int order);
  static JetMat2 identity(int order);
  static JetMat2 constant(const Matrix2cd& m, int order);

  int order() const;
  Matrix2cd value() const;
  Matrix2cd derivative(int k) const;  // d^k/dt^k, not D_t
  JetMat2 deriv() const;
  JetMat2 diag() const;

  friend JetMat2 operator+(const JetMat2& x, const JetMat2& y);
  friend JetMat2 operator-(const JetMat2& x, const JetMat2& y);
  friend JetMat2 operator*(const JetMat2& x, const JetMat2& y);
  friend JetMat2 operator*(cd s, const JetMat2& x);
};

struct PreliminaryTransform {
  Matrix2cd M, Minv;
  Matrix2cd D, B, C;
};

// rejects xi = 0
PreliminaryTransform preliminary_transform(const CoefficientModel& model, double t, double xi);
Matrix2cd wkb_M();
Matrix2cd wkb_Minv();

// free propagator of D_t = diag(|xi|, -|xi|)
Matrix2cd E0(double t, double s, double xi);

// all symbols of one stage at a point, as jets in t of `extra` remaining orders
struct StagePoint {
  std::vector<JetMat2> N_parts;  // N^(1)..N^(k)
  std::vector<JetMat2> F_parts;  // F^(0)..F^(k-1)
  std::vector<JetMat2> B_parts;  // B^(1)..B^(k)
  JetMat2 Nk, Fk, Bk;            // N_k, F_{k-1}, B^(k)
  JetMat2 R0;                    // B + C

  Matrix2cd Rk() const;  // -N_k^{-1} B^(k)
};

struct SymbolMatrix {
  std::string name;
  // d^j/dt^j of the symbol for j = 0..kt
  std::function<std::vector<Matrix2cd>(double t, double xi, int kt)> eval;
  int m1 = 0, m2 = 0;
  int smoothness = 2;
};

struct AuditGrid {
  double T = 1e4;
  double ratio_max = 1e3;  // (1+t)|xi|/N up to this
  int nt = 24, nr = 12;
  int max_t_derivs = 2, max_xi_derivs = 2;
};

struct SymbolAudit {
  std::string name;
  int m1 = 0, m2 = 0;
  // worst[k][a] = sup |d_t^k d_xi^a S| / (|xi|^{m1-a} (1+t)^{-m2-k})
  std::vector<std::vector<double>> worst, inner;
  double worst_constant = 0.0;
  bool pass = false;
};

SymbolAudit audit_symbol(const SymbolMatrix& s, const ZoneConfig& zone, const AuditGrid& grid = {});
nlohmann::json to_json(const SymbolAudit& a, const AuditGrid& grid);

class DiagonalizationStage {
 public:
  DiagonalizationStage(CoefficientModel model, int k, ZoneConfig zone);

  int k() const { return k_; }
  const CoefficientModel& model() const { return model_; }
  const ZoneConfig& zone() const { return zone_; }

  StagePoint at(double t, double xi, int extra = 0) const;
  Matrix2cd N_k(double t, double xi) const;
  Matrix2cd F_k(double t, double xi) const;  // F_{k-1}
  Matrix2cd R_k(double t, double xi) const;
  // E0(s,tau) (F_{k-1} - F^(0) + R_k)(tau) E0(tau,s), the generator of Q_k
  Matrix2cd q_generator(double tau, double s, double xi) const;
  // |(D_t - D - B - C) N_k - N_k (D_t - D - F_{k-1}) - B^(k)| with d_t N_k from jets
  double identity_residual(double t, double xi) const;

  // kind: "N" (j = 1..k), "F" (j = 0..k-1), "B" (j = 1..k)
  SymbolMatrix symbol(const std::string& kind, int j) const;
  nlohmann::json audit_json(const AuditGrid& grid = {}) const;

  // N_k cannot exceed the jet budget
  static constexpr int kMaxSteps = CJet::kMaxOrder - 3;

 private:
  CoefficientModel model_;
  int k_;
  ZoneConfig zone_;
};

// smallest N (bisection) with |N_k - I| <= 1/2 on sampled Z_hyp(N); 0 when b = m = 0
double min_zone_constant(const DiagonalizationStage& stage, double T = 1e4);

struct QEvaluation {
  Matrix2cd Q = Matrix2cd::Identity();
  double s = 0.0, t = 0.0, xi = 0.0;
  int series_depth = 8;
  double C_total = 0.0;     // int_s^t |generator|
  double tail_bound = 0.0;  // Peano-Baker truncation, all panels
  bool used_ode = false;
  int panels = 0;
};

// Peano-Baker series on short panels, composed; direct ODE if depth <= 0 or the
// series tail bound exceeds tol
QEvaluation q_propagator(const DiagonalizationStage& stage, double s, double t, double xi,
                         int depth = 8, double tol = 1e-12);

struct Representation {
  FundamentalMatrix E;  // hyp_system variables (|xi| u, D_t u)
  QEvaluation q;
  double Nk_s_dev = 0.0, Nk_t_dev = 0.0;  // |N_k - I| at s and t
};

// (lambda(s)/lambda(t)) M N_k(t) E0(t,s) Q_k(t,s) N_k(s)^{-1} M^{-1}; needs (s, xi) hyperbolic
Representation assemble_representation(const DiagonalizationStage& stage, double s, double t,
                                       double xi, int depth = 8);
// |xi| <= N, t >= theta: hyperbolic representation from theta times the dissipative-zone
// oracle E(theta, 0, xi); maps (N u, D_t u)(0) to (|xi| u, D_t u)(t)
Representation assemble_representation_small(const DiagonalizationStage& stage, double t,
                                             double xi, const OracleOptions& opt = {});

struct QLimit {
  Matrix2cd Q = Matrix2cd::Identity();
  std::vector<double> times;
  std::vector<Matrix2cd> values;
  std::vector<double> changes;  // |extrapolated_j - extrapolated_{j-1}|
  double t_reached = 0.0;
};

// Q_k(infinity, s, xi): advance t = s + t_first * factor^j, Aitken extrapolate
QLimit q_limit(const DiagonalizationStage& stage, double s, double xi, double tol = 1e-8,
               double t_first = 100.0, double factor = 2.0, double t_max = 1e6);

// lambda(theta) E(theta, 0, xi) as a homogeneous symbol of order 0 in xi
struct BoundarySymbolReport {
  std::vector<double> xi;
  std::vector<double> c0, c1, c2;  // |S|, |xi S'|, |xi^2 S''|
  double C[3] = {0, 0, 0};
  double C_inner[3] = {0, 0, 0};
  bool pass = false;
};
BoundarySymbolReport boundary_symbol_check(const CoefficientModel& model, const ZoneConfig& zone,
                                           double xi_min, double xi_max, int points = 16);

}  // namespace fuchswave
