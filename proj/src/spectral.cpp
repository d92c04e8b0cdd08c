#include "fuchswave/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include <fftw3.h>

#include "fuchswave/error.hpp"
#include "fuchswave/modal.hpp"
#include "fuchswave/parallel.hpp"

namespace fuchswave {

namespace {

std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

bool power_of_two(int p) { return p > 0 && (p & (p - 1)) == 0; }

}  // namespace

void BoxGrid::validate() const {
  if (n < 1 || n > 3) throw Error(ErrorKind::config, "grid.n must be 1, 2 or 3");
  if (!power_of_two(points) || points < 4)
    throw Error(ErrorKind::config, "grid.points must be a power of two >= 4");
  if (!(box_length > 0) || !std::isfinite(box_length))
    throw Error(ErrorKind::config, "grid.box_length must be positive");
  if (total() > (1L << 24)) throw Error(ErrorKind::config, "grid has more than 2^24 points");
}

double BoxGrid::dk() const { return 2.0 * std::acos(-1.0) / box_length; }

long BoxGrid::total() const {
  long t = 1;
  for (int d = 0; d < n; ++d) t *= points;
  return t;
}

nlohmann::json to_json(const BoxGrid& g) {
  return {{"n", g.n}, {"points", g.points}, {"box_length", g.box_length}};
}

BoxGrid box_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "grid: expected an object");
  BoxGrid g;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& k = it.key();
    if (k == "n") g.n = it->get<int>();
    else if (k == "points") g.points = it->get<int>();
    else if (k == "box_length") g.box_length = it->get<double>();
    else if (k == "kind") {
      if (it->get<std::string>() != "box") throw Error(ErrorKind::config, "grid.kind: expected \"box\"");
    } else throw Error(ErrorKind::config, "grid." + k + ": unknown field");
  }
  g.validate();
  return g;
}

int lattice_index(int i, int points) { return i <= points / 2 ? i : i - points; }

BoxFft::BoxFft(const BoxGrid& g) : g_(g) {
  g_.validate();
  int dims[3] = {g.points, g.points, g.points};
  std::vector<std::complex<double>> tmp(g.total());
  auto* p = reinterpret_cast<fftw_complex*>(tmp.data());
  std::lock_guard<std::mutex> lk(planner_mutex());
  fwd_ = fftw_plan_dft(g.n, dims, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  bwd_ = fftw_plan_dft(g.n, dims, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!fwd_ || !bwd_) throw Error(ErrorKind::config, "fftw could not plan the grid");
}

BoxFft::~BoxFft() {
  std::lock_guard<std::mutex> lk(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void BoxFft::forward(std::vector<std::complex<double>>& a) const {
  if (long(a.size()) != g_.total()) throw Error(ErrorKind::precondition, "fft size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(static_cast<fftw_plan>(fwd_), p, p);
}

void BoxFft::backward(std::vector<std::complex<double>>& a) const {
  if (long(a.size()) != g_.total()) throw Error(ErrorKind::precondition, "fft size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(static_cast<fftw_plan>(bwd_), p, p);
}

double BoxFft::roundtrip_error(const std::vector<std::complex<double>>& a) const {
  auto b = a;
  forward(b);
  backward(b);
  double scale = 1.0 / double(g_.total()), worst = 0.0, ref = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(b[i] * scale - a[i]));
    ref = std::max(ref, std::abs(a[i]));
  }
  return ref > 0 ? worst / ref : worst;
}

bool box_resolves_zone(const BoxGrid& g, const ZoneConfig& zone, double t_final) {
  return g.dk() <= zone.N / (1.0 + t_final) * (1 + 1e-12);
}

SpectralTrace spectral_simulate(const CoefficientModel& model, const ZoneConfig& zone,
                                const DataSpec& data, const BoxGrid& grid,
                                const std::vector<double>& times, const SpectralOptions& opt) {
  grid.validate();
  if (times.empty()) throw Error(ErrorKind::precondition, "no checkpoint times");
  for (size_t i = 0; i < times.size(); ++i)
    if (!(times[i] >= 0) || (i && times[i] <= times[i - 1]))
      throw Error(ErrorKind::precondition, "checkpoint times must be increasing and >= 0");

  SpectralTrace tr;
  tr.times = times;
  if (!box_resolves_zone(grid, zone, times.back())) {
    std::ostringstream os;
    os << "box frequency spacing " << grid.dk() << " exceeds N/(1+t_final) = "
       << zone.N / (1.0 + times.back()) << "; the lowest modes leave the dissipative zone early";
    if (opt.strict) throw Error(ErrorKind::resolution, os.str());
    tr.warnings.push_back(os.str());
  }

  const int P = grid.points, n = grid.n;
  const long total = grid.total();
  const double dk = grid.dk();
  // lattice squared radius index m1^2 + ... + mn^2 for each position
  std::vector<long> rad2(total);
  std::vector<std::array<int, 3>> kidx(total);
  for (long p = 0; p < total; ++p) {
    long rest = p, r2 = 0;
    std::array<int, 3> m{0, 0, 0};
    for (int d = n - 1; d >= 0; --d) {
      m[d] = lattice_index(int(rest % P), P);
      rest /= P;
      r2 += long(m[d]) * m[d];
    }
    rad2[p] = r2;
    kidx[p] = m;
  }
  // Nyquist modes are not symmetric; drop them so the fields stay real
  auto nyquist = [&](long p) {
    for (int d = 0; d < n; ++d)
      if (std::abs(kidx[p][d]) == P / 2) return true;
    return false;
  };

  std::map<long, int> distinct;
  for (long p = 0; p < total; ++p)
    if (!nyquist(p)) distinct.emplace(rad2[p], 0);
  std::vector<long> keys;
  for (auto& kv : distinct) {
    kv.second = int(keys.size());
    keys.push_back(kv.first);
  }
  tr.distinct_modes = int(keys.size());

  const size_t T = times.size();
  std::vector<std::vector<MicroEnergy>> evo(keys.size());
  std::vector<char> live(keys.size(), 0);
  OracleOptions o;
  o.tol = opt.tol;
  parallel_for(int(keys.size()), opt.threads, [&](int j) {
    double xi = dk * std::sqrt(double(keys[j]));
    auto [u0, u1] = data.at(xi);
    if (u0 == 0.0 && u1 == 0.0) return;
    live[j] = 1;
    evo[j] = evolve_micro_energy_path(ModalSystem{model, zone, xi, SystemForm::unweighted}, u0, u1,
                                      times, o);
  });
  for (char c : live) tr.evolved_modes += c;

  // u(x) = L^{-n} sum_k u^(k) e^{ikx}; int_box |u|^2 = L^{-n} sum_k |u^(k)|^2
  BoxFft fft(grid);
  const double Ln = std::pow(grid.box_length, n);
  const double cell = Ln / double(total);
  auto phys_norm = [&](std::vector<std::complex<double>>& field) {
    fft.backward(field);
    double s = 0.0;
    for (auto& v : field) s += std::norm(v / Ln);
    return std::sqrt(s * cell);
  };

  std::vector<std::complex<double>> u(total), ut(total), work(total);
  for (size_t k = 0; k < T; ++k) {
    double lattice_u = 0.0;
    for (long p = 0; p < total; ++p) {
      u[p] = ut[p] = 0.0;
      if (nyquist(p)) continue;
      int j = distinct[rad2[p]];
      if (!live[j]) continue;
      u[p] = evo[j][k].u_hat;
      ut[p] = evo[j][k].ut_hat;
      lattice_u += std::norm(u[p]);
    }
    if (k == 0) {
      work = u;
      tr.roundtrip_error = fft.roundtrip_error(work);
    }
    work = u;
    double nu = phys_norm(work);
    if (k == 0) {
      double ref = std::sqrt(lattice_u / Ln);
      tr.plancherel_error = ref > 0 ? std::abs(nu - ref) / ref : std::abs(nu);
    }
    double g2 = 0.0;
    for (int d = 0; d < n; ++d) {
      for (long p = 0; p < total; ++p)
        work[p] = std::complex<double>(0.0, dk * kidx[p][d]) * u[p];
      double gd = phys_norm(work);
      g2 += gd * gd;
    }
    work = ut;
    double nt = phys_norm(work);
    tr.u.push_back(nu);
    tr.weighted_u.push_back(nu / (1.0 + times[k]));
    tr.grad_u.push_back(std::sqrt(g2));
    tr.u_t.push_back(nt);
  }
  return tr;
}

double plancherel_gap(const SpectralTrace& box, const EnergyTrace& radial) {
  double worst = 0.0;
  auto gap = [&](double a, double b) {
    double ref = std::max(std::abs(a), std::abs(b));
    if (ref > 0) worst = std::max(worst, std::abs(a - b) / ref);
  };
  for (size_t i = 0; i < box.times.size(); ++i) {
    auto it = std::find_if(radial.times.begin(), radial.times.end(), [&](double t) {
      return std::abs(t - box.times[i]) <= 1e-12 * std::max(1.0, t);
    });
    if (it == radial.times.end()) continue;
    size_t j = size_t(it - radial.times.begin());
    gap(box.u[i], radial.u[j]);
    gap(box.grad_u[i], radial.grad_u[j]);
    gap(box.u_t[i], radial.u_t[j]);
  }
  return worst;
}

}  // namespace fuchswave
