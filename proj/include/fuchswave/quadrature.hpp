#pragma once

// Composite Gauss-Legendre panels on an interval of x = ln(tau), with
// spectral cumulative integration, differentiation and interpolation.

#include <vector>

#include <Eigen/Dense>

#include "fuchswave/linalg.hpp"

namespace fuchswave {

class PanelGrid {
 public:
  static constexpr int kQ = 16;

  // panel edges; each panel gets kQ Gauss-Legendre nodes
  explicit PanelGrid(std::vector<double> edges);
  // uniform panels of width <= max_width with the given extra edges inserted
  static PanelGrid build(double x0, double x1, double max_width,
                         const std::vector<double>& extra_edges = {});

  int panels() const { return int(edges_.size()) - 1; }
  int size() const { return panels() * kQ; }
  double x0() const { return edges_.front(); }
  double x1() const { return edges_.back(); }
  double edge(int p) const { return edges_[p]; }
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int i) const { return nodes_[i]; }
  int panel_of(double x) const;

  // integral over the whole grid of node samples
  cd integrate(const std::vector<cd>& f) const;
  double integrate(const std::vector<double>& f) const;
  // running integral from x0: values at nodes and at panel edges
  void cumulative(const std::vector<cd>& f, std::vector<cd>& at_nodes,
                  std::vector<cd>& at_edges) const;

  // F(x) = int_{x0}^{x} exp(d(x)-d(y)) f(y) dy          (forward)
  // G(x) = int_{x}^{x1} exp(d(x)-d(y)) f(y) dy          (backward)
  // d given at nodes and edges. Both evaluated panel-by-panel so that
  // exponentials never exceed one panel's worth of growth.
  std::vector<cd> weighted_forward(const std::vector<cd>& d_nodes, const std::vector<cd>& d_edges,
                                   const std::vector<cd>& f) const;
  std::vector<cd> weighted_backward(const std::vector<cd>& d_nodes,
                                    const std::vector<cd>& d_edges,
                                    const std::vector<cd>& f) const;

  // spectral derivative of node samples, panelwise
  std::vector<cd> derivative(const std::vector<cd>& f) const;
  // barycentric interpolation of node samples at x
  cd interpolate(const std::vector<cd>& f, double x) const;
  double interpolate(const std::vector<double>& f, double x) const;

  static const std::vector<double>& gl_nodes();    // on [-1,1]
  static const std::vector<double>& gl_weights();
  static const Eigen::MatrixXd& integration_matrix();  // S_jk = int_{-1}^{s_j} l_k
  static const Eigen::MatrixXd& differentiation_matrix();

 private:
  std::vector<double> edges_;
  std::vector<double> nodes_;
};

}  // namespace fuchswave
