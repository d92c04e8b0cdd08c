#pragma once

#include <string>
#include <tuple>

#include <nlohmann/json.hpp>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/jet.hpp"

namespace fuchswave {

// chi = 1 on [0,1], 0 on [2,inf), smoothstep from exp(-1/x) in between
double chi(double r);
RJet chi(const RJet& r);

struct ZoneConfig {
  double N = 1.0;
  std::string set_by = "default";

  static ZoneConfig with_N(double N, std::string who = "user") { return {N, std::move(who)}; }
};

double theta(const ZoneConfig& z, double xi);
ZoneLabel classify(const ZoneConfig& z, double t, double xi);

struct Cutoffs {
  double diss, hyp_small, hyp_large;
};
Cutoffs cutoffs(const ZoneConfig& z, double t, double xi);

double micro_weight(const ZoneConfig& z, double t, double xi);

nlohmann::json to_json(const ZoneConfig& z);
ZoneConfig zone_from_json(const nlohmann::json& j);

}  // namespace fuchswave
