#include "fuchswave/zones.hpp"

#include <cmath>
#include <limits>

#include "fuchswave/error.hpp"

namespace fuchswave {

namespace {

double psi(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }

RJet psi(const RJet& x) {
  if (x.value() <= 0) return RJet(x.order());
  return exp(-1.0 / x);
}

}  // namespace

double chi(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  double s = r - 1.0;
  double a = psi(s), b = psi(1.0 - s);
  return b / (a + b);
}

RJet chi(const RJet& r) {
  double v = r.value();
  if (v <= 1.0) return RJet::constant(r.order(), 1.0);
  if (v >= 2.0) return RJet::constant(r.order(), 0.0);
  RJet s = r - 1.0;
  RJet a = psi(s), b = psi(1.0 - s);
  return b / (a + b);
}

double theta(const ZoneConfig& z, double xi) {
  if (xi < 0) throw Error(ErrorKind::precondition, "xi_norm must be non-negative");
  if (xi == 0.0) return std::numeric_limits<double>::infinity();
  if (xi >= z.N) return 0.0;
  return z.N / xi - 1.0;
}

ZoneLabel classify(const ZoneConfig& z, double t, double xi) {
  if ((1.0 + t) * xi <= z.N) return ZoneLabel::diss;
  if (xi <= z.N) return ZoneLabel::hyp_small;
  return ZoneLabel::hyp_large;
}

Cutoffs cutoffs(const ZoneConfig& z, double t, double xi) {
  double c1 = chi(xi / z.N);
  double c2 = chi((1.0 + t) * xi / z.N);
  Cutoffs c;
  c.diss = c1 * c2;
  c.hyp_large = 1.0 - c1;
  // remainder of the partition, so the sum is 1 up to a single rounding
  c.hyp_small = 1.0 - c.hyp_large - c.diss;
  if (c.hyp_small < 0) c.hyp_small = 0.0;
  return c;
}

double micro_weight(const ZoneConfig& z, double t, double xi) {
  Cutoffs c = cutoffs(z, t, xi);
  return z.N / (1.0 + t) * c.diss + xi * (c.hyp_small + c.hyp_large);
}

nlohmann::json to_json(const ZoneConfig& z) {
  return {{"N", z.N}, {"set_by", z.set_by}};
}

ZoneConfig zone_from_json(const nlohmann::json& j) {
  ZoneConfig z;
  for (auto& [k, v] : j.items()) {
    if (k == "N") {
      if (!v.is_number() || v.get<double>() <= 0)
        throw Error(ErrorKind::config, "zone.N: expected positive number");
      z.N = v.get<double>();
      z.set_by = "config";
    } else if (k == "set_by") {
      z.set_by = v.get<std::string>();
    } else {
      throw Error(ErrorKind::config, "zone." + k + ": unknown field");
    }
  }
  return z;
}

}  // namespace fuchswave
