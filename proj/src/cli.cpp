#include "fuchswave/cli.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fuchswave/error.hpp"
#include "fuchswave/experiment.hpp"

namespace fuchswave {

namespace {

const std::map<std::string, ExperimentKind>& subcommands() {
  static const std::map<std::string, ExperimentKind> m = {
      {"simulate", ExperimentKind::simulate},
      {"classify", ExperimentKind::classify},
      {"sweep", ExperimentKind::table_sweep},
      {"scatter", ExperimentKind::scattering},
      {"moments", ExperimentKind::moments},
      {"levinson", ExperimentKind::levinson_demo},
      {"hw", ExperimentKind::hw_demo},
      {"repcheck", ExperimentKind::representation_check},
  };
  return m;
}

const char* describe(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "evolve initial data and record energy traces";
    case ExperimentKind::classify: return "eigenvalues mu+- and regime of (b0, m0)";
    case ExperimentKind::table_sweep: return "fitted vs predicted exponents per (b0, m0, sigma) cell";
    case ExperimentKind::scattering: return "modified scattering residuals against free waves";
    case ExperimentKind::moments: return "generic vs moment-condition data decay";
    case ExperimentKind::levinson_demo: return "Levinson solutions of the dissipative Fuchs system";
    case ExperimentKind::hw_demo: return "Hartman-Wintner transform of a log-perturbed system";
    case ExperimentKind::representation_check: return "WKB representation vs direct integration";
  }
  return "";
}

std::string complex_text(std::complex<double> z) {
  std::ostringstream os;
  os << z.real();
  if (z.imag() != 0.0) os << (z.imag() > 0 ? "+" : "-") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"fuchswave: damped Klein-Gordon type wave equations with scale-invariant coefficients"};
  app.name("fuchswave");
  app.set_version_flag("--version", std::string(FUCHSWAVE_VERSION));

  std::string config_path, out_dir = "fuchswave-out";
  std::optional<double> b0, m0, sigma, N, tfinal, tol;
  std::optional<int> threads;
  bool strict = false;

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, kind] : subcommands()) {
    auto* s = app.add_subcommand(name, describe(kind));
    s->add_option("--config", config_path, "JSON experiment config (schema 1)");
    s->add_option("--b0", b0, "override model b0");
    s->add_option("--m0", m0, "override model m0");
    s->add_option("--sigma", sigma, "override model sigma");
    s->add_option("--N", N, "override zone constant N");
    s->add_option("--tfinal", tfinal, "override final time");
    s->add_option("--out", out_dir, "output directory")->capture_default_str();
    s->add_option("--tol", tol, "oracle tolerance");
    s->add_flag("--strict", strict, "escalate resolution warnings to errors");
    s->add_option("--threads", threads, "worker threads (default FUCHSWAVE_THREADS or hardware)");
    subs[name] = s;
  }
  app.require_subcommand(1);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << FUCHSWAVE_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  std::string name;
  for (const auto& [n, s] : subs)
    if (s->parsed()) name = n;
  ExperimentKind kind = subcommands().at(name);

  try {
    ExperimentConfig c;
    if (config_path.empty()) {
      if (kind != ExperimentKind::classify) {
        err << "error: " << name << " needs --config <file.json>\n\n" << subs[name]->help();
        return 1;
      }
      c.experiment = kind;
    } else {
      c = load_config(config_path);
      if (c.experiment != kind) {
        err << "error: " << config_path << ": experiment '" << experiment_name(c.experiment)
            << "' does not match subcommand '" << name << "' (expects '" << experiment_name(kind)
            << "')\n";
        return 1;
      }
    }
    if (b0) c.model.b0 = *b0;
    if (m0) c.model.m0 = *m0;
    if (sigma) {
      if (*sigma < 1 || *sigma > 2) throw Error(ErrorKind::config, "--sigma must lie in [1,2]");
      c.model.sigma = *sigma;
    }
    if (c.model.b0 < 0 || c.model.m0 < 0) throw Error(ErrorKind::config, "b0 and m0 must be >= 0");
    if (N) {
      if (!(*N > 0)) throw Error(ErrorKind::config, "--N must be positive");
      c.zone = ZoneConfig::with_N(*N, "cli");
    }
    if (tfinal) {
      if (!(*tfinal > 0)) throw Error(ErrorKind::config, "--tfinal must be positive");
      c.t_final = *tfinal;
    }
    if (tol) {
      if (!(*tol > 0)) throw Error(ErrorKind::config, "--tol must be positive");
      c.oracle_tol = *tol;
    }
    if (threads) {
      if (*threads < 0) throw Error(ErrorKind::config, "--threads must be >= 0");
      c.threads = *threads;
    }
    if (strict) c.strict = true;

    auto rec = run_experiment(c);
    if (kind == ExperimentKind::classify) {
      auto& o = rec.outputs;
      std::complex<double> mp(o["mu_plus"][0].get<double>(), o["mu_plus"][1].get<double>());
      std::complex<double> mm(o["mu_minus"][0].get<double>(), o["mu_minus"][1].get<double>());
      out << "mu_plus=" << complex_text(mp) << " mu_minus=" << complex_text(mm)
          << " regime=" << o["regime"].get<std::string>() << "\n";
    }
    for (const auto& w : rec.warnings) err << "warning: " << w << "\n";
    for (const auto& v : rec.verdicts)
      out << (v.pass ? "PASS " : "FAIL ") << v.name << " value=" << v.value
          << " threshold=" << v.threshold << (v.detail.empty() ? "" : " (" + v.detail + ")") << "\n";
    std::string manifest = persist(rec, out_dir);
    out << "manifest " << manifest << "\n";
    return rec.all_pass() ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace fuchswave
