#pragma once

#include <stdexcept>
#include <string>

namespace fuchswave {

enum class ErrorKind {
  unsupported_order,
  regime_unsupported,
  stiffness,
  precondition,
  horizon,
  zone_constant,
  degenerate_basis,
  needs_larger_t0,
  dichotomy_violation,
  resolution,
  invalid_window,
  k_too_large,
  config,
  io,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::unsupported_order: return "unsupported-order";
    case ErrorKind::regime_unsupported: return "regime-unsupported";
    case ErrorKind::stiffness: return "stiffness";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::horizon: return "horizon";
    case ErrorKind::zone_constant: return "zone-constant";
    case ErrorKind::degenerate_basis: return "degenerate-basis";
    case ErrorKind::needs_larger_t0: return "needs-larger-t0";
    case ErrorKind::dichotomy_violation: return "dichotomy-violation";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::invalid_window: return "invalid-window";
    case ErrorKind::k_too_large: return "k-too-large";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "error";
}

}  // namespace fuchswave
