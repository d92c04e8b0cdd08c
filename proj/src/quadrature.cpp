#include "fuchswave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/legendre.hpp>

namespace fuchswave {

namespace {

struct Tables {
  std::vector<double> s, w, bary;
  Eigen::MatrixXd S, D;

  Tables() {
    constexpr int q = PanelGrid::kQ;
    using G = boost::math::quadrature::gauss<double, q>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    // boost stores the non-negative half
    for (int i = int(ab.size()) - 1; i >= 0; --i) {
      if (ab[i] == 0.0) continue;
      s.push_back(-ab[i]);
      w.push_back(wt[i]);
    }
    for (size_t i = 0; i < ab.size(); ++i) {
      s.push_back(ab[i]);
      w.push_back(wt[i]);
    }
    // Legendre-Vandermonde and its integrated / differentiated versions
    Eigen::MatrixXd V(q, q), W(q, q), Dp(q, q);
    for (int j = 0; j < q; ++j) {
      double x = s[j];
      for (int m = 0; m < q; ++m) {
        V(j, m) = boost::math::legendre_p(m, x);
        W(j, m) = m == 0 ? x + 1.0
                         : (boost::math::legendre_p(m + 1, x) - boost::math::legendre_p(m - 1, x)) /
                               (2.0 * m + 1.0);
        Dp(j, m) = boost::math::legendre_p_prime(m, x);
      }
    }
    Eigen::MatrixXd Vi = V.inverse();
    S = W * Vi;
    D = Dp * Vi;
    bary.resize(q);
    for (int j = 0; j < q; ++j) {
      double p = 1.0;
      for (int k = 0; k < q; ++k)
        if (k != j) p *= (s[j] - s[k]);
      bary[j] = 1.0 / p;
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

const std::vector<double>& PanelGrid::gl_nodes() { return tables().s; }
const std::vector<double>& PanelGrid::gl_weights() { return tables().w; }
const Eigen::MatrixXd& PanelGrid::integration_matrix() { return tables().S; }
const Eigen::MatrixXd& PanelGrid::differentiation_matrix() { return tables().D; }

PanelGrid::PanelGrid(std::vector<double> edges) : edges_(std::move(edges)) {
  if (edges_.size() < 2) throw std::invalid_argument("panel grid needs two edges");
  const auto& s = gl_nodes();
  for (int p = 0; p < panels(); ++p) {
    double a = edges_[p], b = edges_[p + 1];
    for (int j = 0; j < kQ; ++j) nodes_.push_back(0.5 * (a + b) + 0.5 * (b - a) * s[j]);
  }
}

PanelGrid PanelGrid::build(double x0, double x1, double max_width,
                           const std::vector<double>& extra_edges) {
  std::vector<double> cuts = {x0, x1};
  for (double e : extra_edges)
    if (e > x0 && e < x1) cuts.push_back(e);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> edges = {x0};
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = cuts[i], b = cuts[i + 1];
    int n = std::max(1, int(std::ceil((b - a) / max_width)));
    for (int k = 1; k <= n; ++k) edges.push_back(k == n ? b : a + (b - a) * k / n);
  }
  return PanelGrid(edges);
}

int PanelGrid::panel_of(double x) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  int p = int(it - edges_.begin()) - 1;
  return std::clamp(p, 0, panels() - 1);
}

cd PanelGrid::integrate(const std::vector<cd>& f) const {
  const auto& w = gl_weights();
  cd s = 0.0;
  for (int p = 0; p < panels(); ++p) {
    double h = 0.5 * (edges_[p + 1] - edges_[p]);
    for (int j = 0; j < kQ; ++j) s += h * w[j] * f[p * kQ + j];
  }
  return s;
}

double PanelGrid::integrate(const std::vector<double>& f) const {
  std::vector<cd> c(f.begin(), f.end());
  return integrate(c).real();
}

void PanelGrid::cumulative(const std::vector<cd>& f, std::vector<cd>& at_nodes,
                           std::vector<cd>& at_edges) const {
  const auto& S = integration_matrix();
  const auto& w = gl_weights();
  at_nodes.assign(size(), 0.0);
  at_edges.assign(panels() + 1, 0.0);
  cd base = 0.0;
  for (int p = 0; p < panels(); ++p) {
    double h = 0.5 * (edges_[p + 1] - edges_[p]);
    cd full = 0.0;
    for (int j = 0; j < kQ; ++j) {
      cd acc = 0.0;
      for (int k = 0; k < kQ; ++k) acc += S(j, k) * f[p * kQ + k];
      at_nodes[p * kQ + j] = base + h * acc;
      full += w[j] * f[p * kQ + j];
    }
    base += h * full;
    at_edges[p + 1] = base;
  }
}

std::vector<cd> PanelGrid::weighted_forward(const std::vector<cd>& dn, const std::vector<cd>& de,
                                            const std::vector<cd>& f) const {
  const auto& S = integration_matrix();
  const auto& w = gl_weights();
  std::vector<cd> out(size());
  cd Fa = 0.0;
  cd g[kQ];
  for (int p = 0; p < panels(); ++p) {
    double h = 0.5 * (edges_[p + 1] - edges_[p]);
    for (int k = 0; k < kQ; ++k) g[k] = std::exp(de[p] - dn[p * kQ + k]) * f[p * kQ + k];
    cd full = 0.0;
    for (int j = 0; j < kQ; ++j) {
      cd acc = 0.0;
      for (int k = 0; k < kQ; ++k) acc += S(j, k) * g[k];
      out[p * kQ + j] = std::exp(dn[p * kQ + j] - de[p]) * (Fa + h * acc);
      full += w[j] * g[j];
    }
    Fa = std::exp(de[p + 1] - de[p]) * (Fa + h * full);
  }
  return out;
}

std::vector<cd> PanelGrid::weighted_backward(const std::vector<cd>& dn,
                                             const std::vector<cd>& de,
                                             const std::vector<cd>& f) const {
  const auto& S = integration_matrix();
  const auto& w = gl_weights();
  std::vector<cd> out(size());
  cd Gb = 0.0;
  cd g[kQ];
  for (int p = panels() - 1; p >= 0; --p) {
    double h = 0.5 * (edges_[p + 1] - edges_[p]);
    for (int k = 0; k < kQ; ++k) g[k] = std::exp(de[p + 1] - dn[p * kQ + k]) * f[p * kQ + k];
    cd full = 0.0;
    for (int k = 0; k < kQ; ++k) full += w[k] * g[k];
    for (int j = 0; j < kQ; ++j) {
      cd acc = 0.0;
      for (int k = 0; k < kQ; ++k) acc += S(j, k) * g[k];
      // int_{x_j}^{b} = full - int_{a}^{x_j}
      out[p * kQ + j] = std::exp(dn[p * kQ + j] - de[p + 1]) * (Gb + h * (full - acc));
    }
    Gb = std::exp(de[p] - de[p + 1]) * (Gb + h * full);
  }
  return out;
}

std::vector<cd> PanelGrid::derivative(const std::vector<cd>& f) const {
  const auto& D = differentiation_matrix();
  std::vector<cd> out(size());
  for (int p = 0; p < panels(); ++p) {
    double h = 0.5 * (edges_[p + 1] - edges_[p]);
    for (int j = 0; j < kQ; ++j) {
      cd acc = 0.0;
      for (int k = 0; k < kQ; ++k) acc += D(j, k) * f[p * kQ + k];
      out[p * kQ + j] = acc / h;
    }
  }
  return out;
}

namespace {

template <class T>
T interp_panel(const std::vector<T>& f, const std::vector<double>& edges, int p, double x) {
  constexpr int q = PanelGrid::kQ;
  double a = edges[p], b = edges[p + 1];
  double s = (2.0 * x - a - b) / (b - a);
  const auto& nodes = PanelGrid::gl_nodes();
  const auto& bw = tables().bary;
  T num = T(0);
  double den = 0.0;
  for (int j = 0; j < q; ++j) {
    double d = s - nodes[j];
    if (d == 0.0) return f[p * q + j];
    double c = bw[j] / d;
    num += c * f[p * q + j];
    den += c;
  }
  return num / den;
}

}  // namespace

cd PanelGrid::interpolate(const std::vector<cd>& f, double x) const {
  return interp_panel(f, edges_, panel_of(x), x);
}

double PanelGrid::interpolate(const std::vector<double>& f, double x) const {
  return interp_panel(f, edges_, panel_of(x), x);
}

}  // namespace fuchswave
