#include "fuchswave/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <locale>
#include <random>
#include <sstream>

#include "fuchswave/asymptotic.hpp"
#include "fuchswave/diagonalize.hpp"
#include "fuchswave/error.hpp"
#include "fuchswave/modal.hpp"

namespace fuchswave {

namespace fs = std::filesystem;
using nlohmann::json;

const char* experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::classify: return "classify";
    case ExperimentKind::table_sweep: return "table_sweep";
    case ExperimentKind::scattering: return "scattering";
    case ExperimentKind::moments: return "moments";
    case ExperimentKind::levinson_demo: return "levinson_demo";
    case ExperimentKind::hw_demo: return "hw_demo";
    case ExperimentKind::representation_check: return "representation_check";
  }
  return "?";
}

ExperimentKind experiment_from_name(const std::string& s) {
  for (auto k : {ExperimentKind::simulate, ExperimentKind::classify, ExperimentKind::table_sweep,
                 ExperimentKind::scattering, ExperimentKind::moments, ExperimentKind::levinson_demo,
                 ExperimentKind::hw_demo, ExperimentKind::representation_check})
    if (s == experiment_name(k)) return k;
  throw Error(ErrorKind::config, "experiment: unknown experiment '" + s + "'");
}

// ------------------------------------------------------------------ config

namespace {

void only(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw Error(ErrorKind::config, path + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw Error(ErrorKind::config, (path.empty() ? "" : path + ".") + it.key() + ": unknown field");
  }
}

double num(const json& j, const char* key, const std::string& path, double def) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number()) throw Error(ErrorKind::config, path + key + ": expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorKind::config, path + key + ": must be finite");
  return x;
}

int integer(const json& j, const char* key, const std::string& path, int def) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw Error(ErrorKind::config, path + key + ": expected an integer");
  return v.get<int>();
}

bool boolean(const json& j, const char* key, const std::string& path, bool def) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_boolean()) throw Error(ErrorKind::config, path + key + ": expected true or false");
  return v.get<bool>();
}

void positive(double v, const std::string& what) {
  if (!(v > 0)) throw Error(ErrorKind::config, what + ": must be positive");
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  only(j, "", {"schema", "experiment", "model", "zone", "grid", "data", "times", "tolerances",
               "sweep", "xi", "k", "samples", "seed", "slack", "threads", "strict"});
  ExperimentConfig c;
  if (!j.contains("schema")) throw Error(ErrorKind::config, "schema: missing (expected 1)");
  c.schema = integer(j, "schema", "", 0);
  if (c.schema != 1) throw Error(ErrorKind::config, "schema: unsupported version " + std::to_string(c.schema));
  if (!j.contains("experiment") || !j.at("experiment").is_string())
    throw Error(ErrorKind::config, "experiment: missing or not a string");
  c.experiment = experiment_from_name(j.at("experiment").get<std::string>());
  if (j.contains("model")) c.model = model_from_json(j.at("model"));
  if (j.contains("zone")) c.zone = zone_from_json(j.at("zone"));
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (!g.is_object()) throw Error(ErrorKind::config, "grid: expected an object");
    std::string kind = g.value("kind", "radial");
    if (kind == "box") {
      c.use_box = true;
      c.box = box_from_json(g);
    } else if (kind == "radial") {
      only(g, "grid", {"kind", "n", "xi_min", "xi_max", "points"});
      c.radial.n = integer(g, "n", "grid.", 1);
      c.radial.xi_min = num(g, "xi_min", "grid.", 1e-4);
      c.radial.xi_max = num(g, "xi_max", "grid.", 64.0);
      c.radial.points = integer(g, "points", "grid.", 256);
      if (c.radial.n < 1 || c.radial.n > 3) throw Error(ErrorKind::config, "grid.n: must be 1, 2 or 3");
      positive(c.radial.xi_min, "grid.xi_min");
      if (!(c.radial.xi_max > c.radial.xi_min)) throw Error(ErrorKind::config, "grid.xi_max: must exceed xi_min");
      if (c.radial.points < 5) throw Error(ErrorKind::config, "grid.points: need at least 5");
    } else {
      throw Error(ErrorKind::config, "grid.kind: expected \"radial\" or \"box\"");
    }
  }
  if (j.contains("data")) c.data = data_from_json(j.at("data"));
  if (j.contains("times")) {
    const auto& t = j.at("times");
    only(t, "times", {"t_final", "points"});
    c.t_final = num(t, "t_final", "times.", c.t_final);
    c.time_points = integer(t, "points", "times.", c.time_points);
    positive(c.t_final, "times.t_final");
    if (c.time_points < 2) throw Error(ErrorKind::config, "times.points: need at least 2");
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    only(t, "tolerances", {"oracle", "fit"});
    c.oracle_tol = num(t, "oracle", "tolerances.", c.oracle_tol);
    c.fit_tol = num(t, "fit", "tolerances.", c.fit_tol);
    positive(c.oracle_tol, "tolerances.oracle");
    positive(c.fit_tol, "tolerances.fit");
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    only(s, "sweep", {"table", "xi_low", "cells"});
    c.table = integer(s, "table", "sweep.", 1);
    if (c.table != 1 && c.table != 2) throw Error(ErrorKind::config, "sweep.table: must be 1 or 2");
    c.sweep_xi_low = num(s, "xi_low", "sweep.", c.sweep_xi_low);
    positive(c.sweep_xi_low, "sweep.xi_low");
    if (s.contains("cells")) {
      if (!s.at("cells").is_array()) throw Error(ErrorKind::config, "sweep.cells: expected an array");
      int i = 0;
      for (const auto& cell : s.at("cells")) {
        std::string p = "sweep.cells[" + std::to_string(i++) + "]";
        only(cell, p, {"b0", "m0", "sigma"});
        if (!cell.contains("b0") || !cell.contains("m0"))
          throw Error(ErrorKind::config, p + ": needs b0 and m0");
        SweepCell sc;
        sc.b0 = num(cell, "b0", p + ".", 0.0);
        sc.m0 = num(cell, "m0", p + ".", 0.0);
        sc.sigma = num(cell, "sigma", p + ".", 1.0);
        if (sc.b0 < 0 || sc.m0 < 0) throw Error(ErrorKind::config, p + ": b0 and m0 must be >= 0");
        if (sc.sigma < 1 || sc.sigma > 2) throw Error(ErrorKind::config, p + ".sigma: must lie in [1,2]");
        c.sweep.push_back(sc);
      }
    }
  }
  c.xi = num(j, "xi", "", c.xi);
  positive(c.xi, "xi");
  c.k = integer(j, "k", "", c.k);
  if (c.k < 1) throw Error(ErrorKind::config, "k: must be >= 1");
  c.samples = integer(j, "samples", "", c.samples);
  if (c.samples < 1) throw Error(ErrorKind::config, "samples: must be >= 1");
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw Error(ErrorKind::config, "seed: expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.slack = num(j, "slack", "", c.slack);
  if (c.slack < 0) throw Error(ErrorKind::config, "slack: must be >= 0");
  c.threads = integer(j, "threads", "", c.threads);
  if (c.threads < 0) throw Error(ErrorKind::config, "threads: must be >= 0");
  c.strict = boolean(j, "strict", "", c.strict);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = c.schema;
  j["experiment"] = experiment_name(c.experiment);
  j["model"] = to_json(c.model);
  j["zone"] = {{"N", c.zone.N}};
  if (c.use_box) {
    j["grid"] = to_json(c.box);
    j["grid"]["kind"] = "box";
  } else {
    j["grid"] = {{"kind", "radial"}, {"n", c.radial.n}, {"xi_min", c.radial.xi_min},
                 {"xi_max", c.radial.xi_max}, {"points", c.radial.points}};
  }
  j["data"] = to_json(c.data);
  j["times"] = {{"t_final", c.t_final}, {"points", c.time_points}};
  j["tolerances"] = {{"oracle", c.oracle_tol}, {"fit", c.fit_tol}};
  json cells = json::array();
  for (const auto& s : c.sweep) cells.push_back({{"b0", s.b0}, {"m0", s.m0}, {"sigma", s.sigma}});
  j["sweep"] = {{"table", c.table}, {"xi_low", c.sweep_xi_low}, {"cells", cells}};
  j["xi"] = c.xi;
  j["k"] = c.k;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["slack"] = c.slack;
  j["threads"] = c.threads;
  j["strict"] = c.strict;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    size_t pos = std::min<size_t>(e.byte ? e.byte - 1 : 0, text.size());
    int line = 1, col = 1;
    for (size_t i = 0; i < pos; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << path << ":" << line << ":" << col << ": malformed JSON (" << e.what() << ")";
    throw Error(ErrorKind::config, os.str());
  }
  try {
    return config_from_json(j);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, path + ": " + e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config, path + ": " + e.what());
  }
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(to_json(c).dump()); }

// ------------------------------------------------------------------ records

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

std::string utc_stamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

std::string trace_file(const ResultRecord& r, const Trace& t) {
  return t.file.empty() ? r.config_hash.substr(0, 8) + "_" + t.name + ".csv" : t.file;
}

json manifest_body(const ResultRecord& r) {
  json j;
  j["tool"] = "fuchswave";
  j["version"] = r.version;
  j["config"] = r.config;
  j["config_hash"] = r.config_hash;
  j["outputs"] = r.outputs;
  json v = json::array();
  for (const auto& x : r.verdicts)
    v.push_back({{"name", x.name}, {"verdict", x.pass ? "pass" : "fail"}, {"value", x.value},
                 {"threshold", x.threshold}, {"detail", x.detail}});
  j["verdicts"] = v;
  json tr = json::array();
  for (const auto& t : r.traces)
    tr.push_back({{"name", t.name}, {"file", trace_file(r, t)}, {"columns", t.columns},
                  {"rows", t.rows.size()}});
  j["traces"] = tr;
  j["warnings"] = r.warnings;
  j["all_pass"] = r.all_pass();
  return j;
}

}  // namespace

void Trace::add(const std::vector<double>& row) {
  std::vector<std::string> s;
  for (double v : row) s.push_back(fmt(v));
  rows.push_back(std::move(s));
}

void Trace::add_text(const std::vector<std::string>& row) { rows.push_back(row); }

bool ResultRecord::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string manifest_hash(const ResultRecord& r) { return fnv1a_hex(manifest_body(r).dump()); }

std::string persist(const ResultRecord& r, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::io, "cannot create output directory " + dir);
  fs::path manifest = fs::path(dir) / "manifest.json";
  if (fs::exists(manifest)) {
    std::string stamp = utc_stamp();
    fs::path archived = fs::path(dir) / ("manifest." + stamp + ".json");
    for (int i = 1; fs::exists(archived); ++i)
      archived = fs::path(dir) / ("manifest." + stamp + "." + std::to_string(i) + ".json");
    fs::rename(manifest, archived, ec);
    if (ec) throw Error(ErrorKind::io, "cannot archive " + manifest.string());
  }
  for (const auto& t : r.traces) {
    fs::path p = fs::path(dir) / trace_file(r, t);
    std::ofstream out(p);
    if (!out) throw Error(ErrorKind::io, "cannot write " + p.string());
    for (size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
      for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << '\n';
    }
    if (!out) throw Error(ErrorKind::io, "write failed: " + p.string());
  }
  json j = manifest_body(r);
  j["manifest_hash"] = fnv1a_hex(j.dump());
  j["wall_time"] = r.wall_time;
  std::ofstream out(manifest);
  if (!out) throw Error(ErrorKind::io, "cannot write " + manifest.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed: " + manifest.string());
  fs::path advisory = fs::path(dir) / "advisory.json";
  std::ofstream adv(advisory);
  if (!adv) throw Error(ErrorKind::io, "cannot write " + advisory.string());
  adv << "{}\n";
  return manifest.string();
}

// ------------------------------------------------------------------ sweep

std::vector<SweepRow> table_sweep(const ExperimentConfig& c) {
  std::vector<SweepRow> out;
  for (const auto& cell : c.sweep) {
    SweepRow row;
    row.cell = cell;
    auto model = CoefficientModel::pure(cell.b0, cell.m0);
    model.sigma = cell.sigma;
    auto rc = classify_regime(model);
    row.regime = regime_name(rc.regime);
    double b0 = cell.b0, m0 = cell.m0;
    double lo = b0 * (b0 - 2.0), hi = (b0 - 1.0) * (b0 - 1.0);
    if (c.table == 1) {
      switch (rc.regime) {
        case Regime::complex_pair: row.table_row = 1; break;
        case Regime::double_root: row.table_row = 2; break;
        case Regime::real_small_muplus: row.table_row = 3; break;
        case Regime::real_large_muplus: row.table_row = 4; break;
      }
    } else {
      // the second table only covers 4 m0 < (b0-1)^2 with 4 m0 != b0(b0-2)
      if (4 * m0 >= hi || 4 * m0 == lo) row.applicable = false;
      else row.table_row = 4 * m0 > lo ? 1 : 2;
    }
    if (!row.applicable) {
      out.push_back(row);
      continue;
    }
    try {
      OracleOptions o;
      o.tol = c.oracle_tol;
      double xl = c.sweep_xi_low, th = theta(c.zone, xl);
      auto tl = log_spaced(0.0, th, 240);
      auto pl = integrate_fundamental_path(ModalSystem{model, c.zone, xl, SystemForm::diss_system}, 0.0,
                                           tl, o);
      std::vector<double> vl;
      for (const auto& f : pl) vl.push_back(op_norm(f.E));
      FitOptions fl;
      fl.t_lo = 1e2;
      fl.t_hi = th;
      fl.tol = c.fit_tol;
      fl.harmonic_freq = 2.0 * std::abs(rc.mu_plus.imag());
      row.low = fit_decay(tl, vl, diss_prediction(model, fl.t_lo, fl.t_hi), fl);

      double xh = 2.0 * c.zone.N;
      auto thi = log_spaced(0.0, c.t_final, 240);
      auto ph = integrate_fundamental_path(ModalSystem{model, c.zone, xh, SystemForm::hyp_system}, 0.0,
                                           thi, o);
      std::vector<double> vh;
      for (const auto& f : ph) vh.push_back(op_norm(f.E));
      FitOptions fh;
      fh.t_lo = 1e2;
      fh.t_hi = c.t_final;
      fh.tol = c.fit_tol;
      row.high = fit_decay(thi, vh, predicted_decay(model, ZoneLabel::hyp_large), fh);
      row.pass = row.low.pass && row.high.pass;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.pass = false;
    }
    out.push_back(row);
  }
  return out;
}

// ------------------------------------------------------------------ runners

namespace {

Verdict verdict(std::string name, bool pass, double value, double threshold, std::string detail = "") {
  return {std::move(name), pass, value, threshold, std::move(detail)};
}

void add_energy_trace(ResultRecord& r, const std::string& name, const CoefficientModel& model,
                      const std::vector<double>& times, const std::vector<double>& wu,
                      const std::vector<double>& gu, const std::vector<double>& ut,
                      const std::vector<double>& u) {
  Trace t;
  t.name = name;
  t.columns = {"t", "weighted_u", "grad_u", "u_t", "u", "lambda", "lambda_energy"};
  for (size_t i = 0; i < times.size(); ++i) {
    double lam = eval_lambda(model, times[i]);
    t.add({times[i], wu[i], gu[i], ut[i], u[i], lam, lam * (wu[i] + gu[i] + ut[i])});
  }
  r.traces.push_back(std::move(t));
}

void run_simulate(const ExperimentConfig& c, ResultRecord& r) {
  auto times = log_spaced(0.0, c.t_final, c.time_points);
  std::vector<double> wu, gu, ut, u;
  if (c.use_box) {
    SpectralOptions so;
    so.tol = c.oracle_tol;
    so.threads = c.threads;
    so.strict = c.strict;
    auto st = spectral_simulate(c.model, c.zone, c.data, c.box, times, so);
    for (auto& w : st.warnings) r.warnings.push_back(w);
    wu = st.weighted_u, gu = st.grad_u, ut = st.u_t, u = st.u;
    r.outputs["fft_roundtrip_error"] = st.roundtrip_error;
    r.outputs["plancherel_error"] = st.plancherel_error;
    r.outputs["distinct_modes"] = st.distinct_modes;
    r.outputs["evolved_modes"] = st.evolved_modes;
    r.verdicts.push_back(verdict("fft_roundtrip", st.roundtrip_error <= 1e-12, st.roundtrip_error, 1e-12));
  } else {
    TraceOptions to;
    to.tol = c.oracle_tol;
    to.threads = c.threads;
    auto tr = energy_trace(c.model, c.zone, c.data, c.radial.build(), times, to);
    wu = tr.weighted_u, gu = tr.grad_u, ut = tr.u_t, u = tr.u;
  }
  add_energy_trace(r, "energy", c.model, times, wu, gu, ut, u);
  // the lambda-weighted energy must stop growing when b0(b0-2) <= 4 m0 and sigma = 1
  if (c.model.b0 * (c.model.b0 - 2.0) <= 4.0 * c.model.m0 && c.model.sigma == 1.0) {
    double early = 0.0, late = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
      double e = eval_lambda(c.model, times[i]) * (wu[i] + gu[i] + ut[i]);
      if (times[i] <= c.t_final / 10) early = std::max(early, e);
      else late = std::max(late, e);
    }
    r.outputs["lambda_energy_early_max"] = early;
    r.outputs["lambda_energy_late_max"] = late;
    r.verdicts.push_back(verdict("lambda_energy_bounded", late <= 1.05 * early, late, 1.05 * early,
                                 "max over the last decade vs max before it"));
  }
}

void run_classify(const ExperimentConfig& c, ResultRecord& r) {
  auto rc = classify_regime(c.model);
  r.outputs["mu_plus"] = {rc.mu_plus.real(), rc.mu_plus.imag()};
  r.outputs["mu_minus"] = {rc.mu_minus.real(), rc.mu_minus.imag()};
  r.outputs["regime"] = regime_name(rc.regime);
  r.outputs["dominant_exponent"] = rc.dominant_exponent;
  r.outputs["fundamental_estimate_applies"] = rc.fundamental_applies;
  r.outputs["log_perturbation_applies"] = rc.log_perturb_applies;
  r.outputs["hyperbolic_dominates_boundary"] = rc.rem_hyp_dominant;
  r.outputs["predicted_diss"] = predicted_decay(c.model, ZoneLabel::diss);
  r.outputs["predicted_hyp"] = predicted_decay(c.model, ZoneLabel::hyp_large);
}

void run_sweep(const ExperimentConfig& c, ResultRecord& r) {
  auto rows = table_sweep(c);
  Trace t;
  t.name = "table" + std::to_string(c.table);
  t.file = "table" + std::to_string(c.table) + "_results.csv";
  t.columns = {"b0", "m0", "sigma", "table_row", "regime", "applicable", "low_predicted",
               "low_fitted", "low_verdict", "high_predicted", "high_fitted", "high_verdict",
               "verdict"};
  json jrows = json::array();
  for (const auto& row : rows) {
    std::string v = !row.applicable ? "not-applicable" : (row.pass ? "pass" : "fail");
    auto fv = [&](const DecayFit& f) { return row.applicable && row.error.empty() ? (f.pass ? "pass" : "fail") : ""; };
    auto fn = [&](double x) { return row.applicable && row.error.empty() ? fmt(x) : std::string(); };
    t.add_text({fmt(row.cell.b0), fmt(row.cell.m0), fmt(row.cell.sigma), std::to_string(row.table_row),
                row.regime, row.applicable ? "yes" : "no", fn(row.low.predicted), fn(row.low.exponent),
                fv(row.low), fn(row.high.predicted), fn(row.high.exponent), fv(row.high), v});
    json jr = {{"b0", row.cell.b0}, {"m0", row.cell.m0}, {"sigma", row.cell.sigma},
               {"table_row", row.table_row}, {"regime", row.regime}, {"verdict", v}};
    if (row.applicable && row.error.empty()) {
      jr["low"] = to_json(row.low);
      jr["high"] = to_json(row.high);
    }
    if (!row.error.empty()) jr["error"] = row.error;
    jrows.push_back(jr);
    if (row.applicable) {
      std::ostringstream name;
      name << "cell(" << row.cell.b0 << "," << row.cell.m0 << "," << row.cell.sigma << ")";
      r.verdicts.push_back(verdict(name.str(), row.pass, row.low.exponent, row.low.predicted,
                                   row.error.empty() ? "high " + fmt(row.high.exponent) + " vs " + fmt(row.high.predicted) : row.error));
    }
  }
  r.outputs["rows"] = jrows;
  r.traces.push_back(std::move(t));
}

void run_scattering(const ExperimentConfig& c, ResultRecord& r) {
  ScatteringOptions so;
  so.threads = c.threads;
  auto res = scattering_residual(c.model, c.zone, c.data, c.radial.build(), c.t_final, so);
  Trace t;
  t.name = "residual";
  t.columns = {"t", "residual_dt", "residual_grad"};
  for (size_t i = 0; i < res.times.size(); ++i) t.add({res.times[i], res.residual_dt[i], res.residual_grad[i]});
  r.traces.push_back(std::move(t));
  Trace w;
  w.name = "w_plus";
  w.columns = {"xi", "norm", "last_increment", "t_reached", "converged"};
  double sup = 0.0;
  for (const auto& s : res.W_plus) {
    double nrm = op_norm(s.W);
    sup = std::max(sup, nrm);
    w.add({s.xi, nrm, s.last_increment, s.t_reached, s.converged ? 1.0 : 0.0});
  }
  r.traces.push_back(std::move(w));
  r.outputs["sup_w_plus"] = sup;
  r.outputs["monotone"] = res.monotone;
  r.verdicts.push_back(verdict("residual_dt", res.monotone && res.final_ratio_dt <= 0.1, res.final_ratio_dt, 0.1));
  r.verdicts.push_back(verdict("residual_grad", res.monotone && res.final_ratio_grad <= 0.1, res.final_ratio_grad, 0.1));
}

void run_moments(const ExperimentConfig& c, ResultRecord& r) {
  FitOptions f;
  f.tol = c.fit_tol;
  TraceOptions to;
  to.tol = c.oracle_tol;
  to.threads = c.threads;
  auto me = moment_experiment(c.model, c.zone, c.radial.n, f, to, c.slack);
  r.outputs["kappa"] = me.moments.kappa;
  r.outputs["kappa_prime"] = me.moments.kappa_prime;
  r.outputs["power"] = me.moments.power;
  r.outputs["borderline"] = me.moments.borderline;
  r.outputs["weighted_norm"] = me.moments.weighted_norm;
  r.outputs["generic_fit"] = to_json(me.generic_fit);
  r.outputs["moment_fit"] = to_json(me.moment_fit);
  r.outputs["generic_l2_fit"] = to_json(me.generic_l2_fit);
  r.outputs["moment_l2_fit"] = to_json(me.moment_l2_fit);
  for (auto* p : {&me.generic_trace, &me.moment_trace}) {
    Trace t;
    t.name = p == &me.generic_trace ? "generic" : "moment";
    t.columns = {"t", "norm", "sup_amplitude"};
    for (size_t i = 0; i < p->times.size(); ++i) t.add({p->times[i], p->values[i], p->sup_amplitude[i]});
    r.traces.push_back(std::move(t));
  }
  r.verdicts.push_back(verdict("generic_exponent", me.generic_fit.pass, me.generic_fit.exponent, me.generic_fit.predicted));
  r.verdicts.push_back(verdict("moment_exponent", me.moment_fit.pass, me.moment_fit.exponent, me.moment_fit.predicted));
}

void run_levinson(const ExperimentConfig& c, ResultRecord& r) {
  auto mf = diagonalized_modal_fuchs(c.model, c.zone, c.xi);
  double th = mf.tau_theta;
  for (int k = 0; k < 2; ++k) {
    auto sol = levinson_solve(mf.sys, k, 1.0, th);
    std::string tag = k == 0 ? "minus" : "plus";
    Trace t;
    t.name = "levinson_" + tag;
    t.columns = {"tau", "residual"};
    for (size_t i = 0; i < sol.residual_tau.size(); ++i) t.add({sol.residual_tau[i], sol.residual[i]});
    r.traces.push_back(std::move(t));
    double res = sol.residual_at(0.5 * th);
    r.outputs["residual_half_theta_" + tag] = res;
    r.outputs["observed_rate_" + tag] = sol.observed_rate;
    r.outputs["rate_bound_" + tag] = sol.rate_bound;
    r.outputs["ode_residual_" + tag] = sol.ode_residual;
    r.verdicts.push_back(verdict("residual_" + tag, res <= 0.01, res, 0.01));
    r.verdicts.push_back(verdict("picard_rate_" + tag, sol.observed_rate <= sol.rate_bound,
                                 sol.observed_rate, sol.rate_bound));
  }
}

void run_hw(const ExperimentConfig& c, ResultRecord& r) {
  auto mf = diagonalized_modal_fuchs(c.model, c.zone, c.xi, false);
  double T = c.t_final;
  if (!(T >= 1e3)) throw Error(ErrorKind::precondition, "hw_demo needs t_final >= 1e3");
  auto hw = hartman_wintner(mf.sys, c.model.sigma, 1.0, T);
  double diag = 0.0;
  std::vector<double> r1(hw.grid.size()), rs(hw.grid.size()), nn(hw.grid.size());
  for (int i = 0; i < hw.grid.size(); ++i) {
    diag = std::max(diag, std::abs(hw.N[i](0, 0)) + std::abs(hw.N[i](1, 1)));
    r1[i] = op_norm(hw.R1[i]);
    rs[i] = std::pow(op_norm(hw.R[i]), c.model.sigma);
    nn[i] = op_norm(hw.N[i]);
  }
  double a = log_measure_integral(hw.grid, r1, 1e2, T);
  double b = log_measure_integral(hw.grid, rs, 1e2, T);
  double ratio = b > 0 ? a / b : (a == 0 ? 0.0 : INFINITY);
  // |N| on the tail: maxima over 8 equal blocks in ln tau must not increase
  auto taus = hw.taus();
  const int blocks = 8;
  std::vector<double> bmax(blocks, 0.0);
  double x0 = std::log(1e2), x1 = std::log(T);
  for (size_t i = 0; i < taus.size(); ++i) {
    double x = std::log(taus[i]);
    if (x < x0 || x > x1) continue;
    int bi = std::min(blocks - 1, int((x - x0) / (x1 - x0) * blocks));
    bmax[bi] = std::max(bmax[bi], nn[i]);
  }
  bool decreasing = true;
  for (int i = 1; i < blocks; ++i) decreasing = decreasing && bmax[i] <= bmax[i - 1] * (1 + 1e-12);
  Trace t;
  t.name = "hw";
  t.columns = {"tau", "norm_N", "norm_R", "norm_R1"};
  for (size_t i = 0; i < taus.size(); ++i) t.add({taus[i], nn[i], op_norm(hw.R[i]), r1[i]});
  r.traces.push_back(std::move(t));
  r.outputs["diag_N_max"] = diag;
  r.outputs["tail_R1"] = a;
  r.outputs["tail_sigma_proxy"] = b;
  r.outputs["identity_residual"] = hw.identity_residual;
  r.outputs["valid_from"] = hw.valid_from;
  r.verdicts.push_back(verdict("diag_N_zero", diag == 0.0, diag, 0.0));
  r.verdicts.push_back(verdict("N_decreasing_on_tail", decreasing, bmax.back(), bmax.front()));
  r.verdicts.push_back(verdict("tail_ratio", ratio <= 0.1, ratio, 0.1));
}

void run_representation(const ExperimentConfig& c, ResultRecord& r) {
  DiagonalizationStage st(c.model, c.k, c.zone);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double N = c.zone.N;
  double worst = 0.0, worst_det = INFINITY, worst_unit = 0.0;
  Trace t;
  t.name = "points";
  t.columns = {"s", "t", "xi", "rel_error", "abs_det_Q", "det_bound", "C_total", "unitarity"};
  int accepted = 0, attempts = 0;
  while (accepted < c.samples) {
    if (++attempts > 50 * c.samples) throw Error(ErrorKind::zone_constant, "could not sample admissible points; increase N");
    double s = 20.0 * U(rng);
    double xlo = std::log(1.5 * N / (1.0 + s)), xhi = std::log(8.0);
    double xi = std::exp(xlo + (xhi - xlo) * U(rng));
    double tt = s + std::pow(10.0, 3.0 * U(rng));
    Representation rep;
    try {
      rep = assemble_representation(st, s, tt, xi);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::zone_constant) continue;
      throw;
    }
    OracleOptions o;
    o.tol = 1e-12;
    auto E = integrate_fundamental(ModalSystem{c.model, c.zone, xi, SystemForm::hyp_system}, s, tt, o);
    double rel = (rep.E.E - E.E).norm() / E.E.norm();
    double det = std::abs(rep.q.Q.determinant()), bound = std::exp(-2.0 * rep.q.C_total);
    Matrix2cd e0 = E0(tt, s, xi);
    double unit = (e0.adjoint() * e0 - Matrix2cd::Identity()).norm();
    worst = std::max(worst, rel);
    worst_det = std::min(worst_det, det / bound);
    worst_unit = std::max(worst_unit, unit);
    t.add({s, tt, xi, rel, det, bound, rep.q.C_total, unit});
    ++accepted;
  }
  r.traces.push_back(std::move(t));
  r.outputs["max_rel_error"] = worst;
  r.outputs["min_det_over_bound"] = worst_det;
  r.outputs["max_unitarity_defect"] = worst_unit;
  r.verdicts.push_back(verdict("representation_error", worst <= 1e-6, worst, 1e-6));
  r.verdicts.push_back(verdict("determinant_bound", worst_det >= 1.0 - 1e-12, worst_det, 1.0));
  r.verdicts.push_back(verdict("E0_unitarity", worst_unit <= 1e-12, worst_unit, 1e-12));
}

}  // namespace

ResultRecord run_experiment(const ExperimentConfig& c) {
  auto start = std::chrono::steady_clock::now();
  ResultRecord r;
  r.config = to_json(c);
  r.config_hash = config_hash(c);
  switch (c.experiment) {
    case ExperimentKind::simulate: run_simulate(c, r); break;
    case ExperimentKind::classify: run_classify(c, r); break;
    case ExperimentKind::table_sweep: run_sweep(c, r); break;
    case ExperimentKind::scattering: run_scattering(c, r); break;
    case ExperimentKind::moments: run_moments(c, r); break;
    case ExperimentKind::levinson_demo: run_levinson(c, r); break;
    case ExperimentKind::hw_demo: run_hw(c, r); break;
    case ExperimentKind::representation_check: run_representation(c, r); break;
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace fuchswave
