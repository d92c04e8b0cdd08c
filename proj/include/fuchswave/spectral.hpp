#pragma once

// Periodic-box pseudospectral runs: radial data sampled on the FFT lattice,
// every distinct |k| evolved with the modal oracle, fields back in physical
// space at checkpoints.

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/estimates.hpp"
#include "fuchswave/zones.hpp"

namespace fuchswave {

struct BoxGrid {
  int n = 1;
  int points = 4096;  // per dimension, power of two
  double box_length = 2.0 * 3.14159265358979323846 * 1e3;

  void validate() const;
  double dk() const;
  long total() const;
};

nlohmann::json to_json(const BoxGrid& g);
BoxGrid box_from_json(const nlohmann::json& j);

// n-dimensional complex FFT on the box lattice; plans are created under a
// lock, execution is reentrant
class BoxFft {
 public:
  explicit BoxFft(const BoxGrid& g);
  ~BoxFft();
  BoxFft(const BoxFft&) = delete;
  BoxFft& operator=(const BoxFft&) = delete;

  // unnormalised transforms, in place
  void forward(std::vector<std::complex<double>>& a) const;
  void backward(std::vector<std::complex<double>>& a) const;
  // max |backward(forward(a))/size - a| / max |a|
  double roundtrip_error(const std::vector<std::complex<double>>& a) const;

 private:
  BoxGrid g_;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

// signed wavenumber index of lattice position i along one axis
int lattice_index(int i, int points);

struct SpectralOptions {
  double tol = 1e-9;
  int threads = 0;
  bool strict = false;
};

struct SpectralTrace {
  std::vector<double> times;
  std::vector<double> weighted_u, grad_u, u_t, u;  // physical-space L^2 norms on the box
  std::vector<std::string> warnings;
  double roundtrip_error = 0.0;
  double plancherel_error = 0.0;  // physical vs lattice sum at t = 0
  int distinct_modes = 0;
  int evolved_modes = 0;
};

// resolution: 2 pi / L must not exceed N / (1 + t_final)
bool box_resolves_zone(const BoxGrid& g, const ZoneConfig& zone, double t_final);

SpectralTrace spectral_simulate(const CoefficientModel& model, const ZoneConfig& zone,
                                const DataSpec& data, const BoxGrid& grid,
                                const std::vector<double>& times,
                                const SpectralOptions& opt = {});

// largest relative gap between box and radial-quadrature norms over the common times
double plancherel_gap(const SpectralTrace& box, const EnergyTrace& radial);

}  // namespace fuchswave
