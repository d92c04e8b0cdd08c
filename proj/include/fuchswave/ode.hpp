#pragma once

// Embedded Fehlberg 7(8) pair (the odeint error stepper) under our own PI
// step-size control, for Eigen-valued states.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <boost/numeric/odeint/external/eigen/eigen.hpp>

#include "fuchswave/error.hpp"

namespace fuchswave {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-300;
  double h_init = 0.0;   // 0: automatic
  double h_max = 0.0;    // 0: unlimited
  long max_steps = 50'000'000;
};

struct OdeStats {
  long steps = 0;
  long rejected = 0;
  long evals = 0;
};

template <class State>
class Fehlberg78 {
 public:
  // rhs(t, y, dy)
  using Rhs = std::function<void(double, const State&, State&)>;
  static constexpr int kOrder = 8;

  Fehlberg78(Rhs rhs, OdeOptions opt = {}) : f_(std::move(rhs)), opt_(opt) {}

  // Advance y from t0 to t1. `label` is reported on step underflow.
  void integrate(State& y, double t0, double t1, const std::string& label = "") {
    if (t1 == t0) return;
    double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double h = h_ != 0.0 ? std::abs(h_) : initial_step(y, t, dir);
    if (opt_.h_init > 0 && h_ == 0.0) h = opt_.h_init;
    auto sys = [this](const State& x, State& dx, double s) {
      f_(s, x, dx);
      ++stats_.evals;
    };
    while (dir * (t1 - t) > 0) {
      if (stats_.steps > opt_.max_steps) fail(t, label, "step budget exhausted");
      if (opt_.h_max > 0) h = std::min(h, opt_.h_max);
      bool last = false;
      if (h >= std::abs(t1 - t)) {
        h = std::abs(t1 - t);
        last = true;
      }
      ynew_ = y;
      stepper_.do_step(sys, ynew_, t, dir * h, err_);
      double yref = std::max(maxabs(y), maxabs(ynew_));
      double err = maxabs(err_) / (opt_.atol + opt_.rtol * yref);
      if (err <= 1.0) {
        ++stats_.steps;
        t = last ? t1 : t + dir * h;
        std::swap(y, ynew_);
        double fac = err == 0.0 ? 5.0
                                : 0.9 * std::pow(err, -0.7 / kOrder) *
                                      std::pow(err_prev_, 0.4 / kOrder);
        fac = std::clamp(fac, 0.2, 5.0);
        err_prev_ = std::max(err, 1e-4);
        if (!last) h *= fac;
        else h_keep_ = h * fac;
      } else {
        ++stats_.rejected;
        h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / kOrder));
      }
      if (h < 1e-14 * std::max(1.0, std::abs(t))) fail(t, label, "step size underflow");
    }
    h_ = std::max(h_keep_, h);
  }

  const OdeStats& stats() const { return stats_; }
  void reset() { h_ = 0.0; h_keep_ = 0.0; err_prev_ = 1e-4; }

 private:
  [[noreturn]] void fail(double t, const std::string& label, const char* what) {
    std::ostringstream os;
    os << what << " at t=" << t;
    if (!label.empty()) os << " (" << label << ")";
    throw Error(ErrorKind::stiffness, os.str());
  }

  static double maxabs(const State& a) { return a.cwiseAbs().maxCoeff(); }

  double initial_step(const State& y, double t, double dir) {
    State k1 = y;
    f_(t, y, k1);
    ++stats_.evals;
    double y0 = maxabs(y), f0 = maxabs(k1);
    double h0 = (y0 < 1e-300 || f0 < 1e-300) ? 1e-6 : 0.01 * y0 / f0;
    h0 = std::min(h0, std::max(1.0, std::abs(t)));
    (void)dir;
    return h0;
  }

  Rhs f_;
  OdeOptions opt_;
  OdeStats stats_;
  boost::numeric::odeint::runge_kutta_fehlberg78<State, double, State, double,
                                                 boost::numeric::odeint::vector_space_algebra>
      stepper_;
  State ynew_, err_;
  double h_ = 0.0, h_keep_ = 0.0, err_prev_ = 1e-4;
};

}  // namespace fuchswave
