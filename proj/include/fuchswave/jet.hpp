#pragma once

// Truncated Taylor polynomials in one variable. c[k] holds f^(k)/k!.
// Used for exact time derivatives of coefficients and of the WKB recursion.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace fuchswave {

template <class T>
class Jet {
 public:
  static constexpr int kMaxOrder = 12;

  Jet() { c_.fill(T{}); }
  explicit Jet(int order, T value = T{}) : order_(order) {
    if (order < 0 || order > kMaxOrder) throw std::out_of_range("jet order");
    c_.fill(T{});
    c_[0] = value;
  }

  static Jet constant(int order, T value) { return Jet(order, value); }
  static Jet variable(int order, T value) {
    Jet j(order, value);
    if (order >= 1) j.c_[1] = T(1);
    return j;
  }

  int order() const { return order_; }
  T value() const { return c_[0]; }
  T coeff(int k) const { return k <= order_ ? c_[k] : T{}; }
  T& coeff_ref(int k) { return c_[k]; }

  // k-th derivative at the expansion point
  T derivative(int k) const {
    if (k > order_) throw std::out_of_range("jet derivative beyond order");
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c_[k] * f;
  }

  // d/dt, loses one order
  Jet deriv() const {
    Jet r(std::max(order_ - 1, 0));
    if (order_ == 0) return r;
    for (int k = 0; k < order_; ++k) r.c_[k] = T(k + 1) * c_[k + 1];
    return r;
  }

  Jet truncated(int order) const {
    Jet r(std::min(order, order_));
    for (int k = 0; k <= r.order_; ++k) r.c_[k] = c_[k];
    return r;
  }

  Jet operator-() const {
    Jet r(order_);
    for (int k = 0; k <= order_; ++k) r.c_[k] = -c_[k];
    return r;
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r(std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r(std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) {
      T s{};
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    Jet r(std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) {
      T s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }

  friend Jet operator+(const Jet& a, T s) { Jet r = a; r.c_[0] += s; return r; }
  friend Jet operator+(T s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, T s) { Jet r = a; r.c_[0] -= s; return r; }
  friend Jet operator-(T s, const Jet& a) { return (-a) + s; }
  friend Jet operator*(const Jet& a, T s) {
    Jet r = a;
    for (int k = 0; k <= r.order_; ++k) r.c_[k] *= s;
    return r;
  }
  friend Jet operator*(T s, const Jet& a) { return a * s; }
  friend Jet operator/(const Jet& a, T s) { return a * (T(1) / s); }
  friend Jet operator/(T s, const Jet& a) { return Jet(a.order_, s) / a; }

  friend Jet exp(const Jet& a) {
    Jet r(a.order_);
    r.c_[0] = std::exp(a.c_[0]);
    for (int k = 1; k <= a.order_; ++k) {
      T s{};
      for (int j = 1; j <= k; ++j) s += T(j) * a.c_[j] * r.c_[k - j];
      r.c_[k] = s / T(k);
    }
    return r;
  }
  friend Jet log(const Jet& a) {
    Jet r(a.order_);
    r.c_[0] = std::log(a.c_[0]);
    for (int k = 1; k <= a.order_; ++k) {
      T s{};
      for (int j = 1; j < k; ++j) s += T(j) * r.c_[j] * a.c_[k - j];
      r.c_[k] = (a.c_[k] - s / T(k)) / a.c_[0];
    }
    return r;
  }
  friend Jet pow(const Jet& a, double p) {
    Jet r(a.order_);
    r.c_[0] = std::pow(a.c_[0], p);
    for (int k = 1; k <= a.order_; ++k) {
      T s{};
      for (int j = 1; j <= k; ++j) s += (T(p * j) - T(k - j)) * a.c_[j] * r.c_[k - j];
      r.c_[k] = s / (T(k) * a.c_[0]);
    }
    return r;
  }

 private:
  int order_ = 0;
  std::array<T, kMaxOrder + 1> c_;
};

using RJet = Jet<double>;
using CJet = Jet<std::complex<double>>;

inline CJet to_complex(const RJet& a) {
  CJet r(a.order());
  for (int k = 0; k <= a.order(); ++k) r.coeff_ref(k) = a.coeff(k);
  return r;
}

}  // namespace fuchswave
