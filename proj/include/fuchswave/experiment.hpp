#pragma once

// JSON experiment configs, result records, persistence and the runners behind
// each CLI subcommand.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuchswave/coeffs.hpp"
#include "fuchswave/estimates.hpp"
#include "fuchswave/spectral.hpp"
#include "fuchswave/zones.hpp"

namespace fuchswave {

enum class ExperimentKind {
  simulate,
  classify,
  table_sweep,
  scattering,
  moments,
  levinson_demo,
  hw_demo,
  representation_check
};
const char* experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(const std::string& s);

struct RadialSpec {
  int n = 1;
  double xi_min = 1e-4, xi_max = 64.0;
  int points = 256;
  RadialGrid build() const { return RadialGrid::log_grid(n, xi_min, xi_max, points); }
};

struct SweepCell {
  double b0 = 0.0, m0 = 0.0, sigma = 1.0;
};

struct ExperimentConfig {
  int schema = 1;
  ExperimentKind experiment = ExperimentKind::classify;
  CoefficientModel model;
  ZoneConfig zone;
  bool use_box = false;
  BoxGrid box;
  RadialSpec radial;
  DataSpec data = DataSpec::lowpass(0.25);
  double t_final = 1e4;
  int time_points = 41;
  double oracle_tol = 1e-9;
  double fit_tol = 0.05;
  std::vector<SweepCell> sweep;
  int table = 1;
  double xi = 1e-4;         // levinson_demo / hw_demo frequency
  double sweep_xi_low = 1e-5;
  int k = 2;                // diagonalisation steps for representation_check
  int samples = 20;
  std::uint64_t seed = 0;
  double slack = 0.1;       // moment-order slack
  int threads = 0;
  bool strict = false;
};

// every field validated, unknown fields rejected with their path
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
// parse errors carry line and column
ExperimentConfig load_config(const std::string& path);

// 64-bit FNV-1a of the text, as 16 hex digits
std::string fnv1a_hex(const std::string& text);
std::string config_hash(const ExperimentConfig& c);

struct Trace {
  std::string name;
  std::string file;  // fixed file name; empty means <hash8>_<name>.csv
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(const std::vector<double>& row);
  void add_text(const std::vector<std::string>& row);
};

struct Verdict {
  std::string name;
  bool pass = false;
  double value = 0.0, threshold = 0.0;
  std::string detail;
};

struct ResultRecord {
  std::string config_hash;
  nlohmann::json config;
  nlohmann::json outputs = nlohmann::json::object();
  std::vector<Trace> traces;
  std::vector<Verdict> verdicts;
  std::vector<std::string> warnings;
  double wall_time = 0.0;
  std::string version = FUCHSWAVE_VERSION;

  bool all_pass() const;
};

ResultRecord run_experiment(const ExperimentConfig& c);

// manifest.json + one CSV per trace; an existing manifest is archived with a
// timestamp suffix. Returns the manifest path.
std::string persist(const ResultRecord& r, const std::string& dir);
// hash of the manifest content without wall time
std::string manifest_hash(const ResultRecord& r);

// one table row per (b0, m0, sigma) cell
struct SweepRow {
  SweepCell cell;
  bool applicable = true;
  int table_row = 0;
  std::string regime;
  DecayFit low, high;
  std::string error;
  bool pass = false;
};
std::vector<SweepRow> table_sweep(const ExperimentConfig& c);

}  // namespace fuchswave
