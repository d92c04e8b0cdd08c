#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fuchswave/cli.hpp"
#include "fuchswave/coeffs.hpp"
#include "fuchswave/error.hpp"
#include "fuchswave/estimates.hpp"
#include "fuchswave/experiment.hpp"
#include "fuchswave/modal.hpp"

namespace py = pybind11;
using namespace fuchswave;

PYBIND11_MODULE(_fuchswave, m) {
  m.doc() = "fuchswave core bindings";
  m.attr("__version__") = FUCHSWAVE_VERSION;

  py::register_exception<fuchswave::Error>(m, "FuchswaveError");

  py::class_<CoefficientModel>(m, "CoefficientModel")
      .def_static("pure", &CoefficientModel::pure, py::arg("b0"), py::arg("m0"))
      .def_static("example_bounded", &CoefficientModel::example_bounded)
      .def_static("from_json", [](const std::string& s) { return model_from_json(nlohmann::json::parse(s)); })
      .def("to_json", [](const CoefficientModel& c) { return to_json(c).dump(); })
      .def_readwrite("b0", &CoefficientModel::b0)
      .def_readwrite("m0", &CoefficientModel::m0)
      .def_readwrite("sigma", &CoefficientModel::sigma)
      .def("b", &CoefficientModel::b)
      .def("m", &CoefficientModel::m)
      .def("trivial", &CoefficientModel::trivial);

  py::class_<ZoneConfig>(m, "ZoneConfig")
      .def(py::init([](double N) { return ZoneConfig::with_N(N, "python"); }), py::arg("N") = 1.0)
      .def_readwrite("N", &ZoneConfig::N);

  m.def("classify", [](double b0, double m0) {
    auto r = classify_regime(b0, m0);
    py::dict d;
    d["mu_plus"] = r.mu_plus;
    d["mu_minus"] = r.mu_minus;
    d["regime"] = regime_name(r.regime);
    d["fundamental_estimate_applies"] = r.fundamental_applies;
    d["log_perturbation_applies"] = r.log_perturb_applies;
    d["hyperbolic_dominates_boundary"] = r.rem_hyp_dominant;
    return d;
  }, py::arg("b0"), py::arg("m0"));

  m.def("lambda_", &eval_lambda, py::arg("model"), py::arg("t"));

  m.def("fundamental", [](const CoefficientModel& model, const ZoneConfig& zone, double xi, double s,
                          double t, const std::string& form, double tol) {
    SystemForm f = SystemForm::hyp_system;
    if (form == "diss") f = SystemForm::diss_system;
    else if (form == "unweighted") f = SystemForm::unweighted;
    else if (form != "hyp") throw fuchswave::Error(fuchswave::ErrorKind::precondition, "form must be hyp, diss or unweighted");
    Matrix2cd E = integrate_fundamental(ModalSystem{model, zone, xi, f}, s, t, {tol, false}).E;
    return E;
  }, py::arg("model"), py::arg("zone"), py::arg("xi"), py::arg("s"), py::arg("t"),
     py::arg("form") = "hyp", py::arg("tol") = 1e-10);

  m.def("fit_decay", [](const std::vector<double>& t, const std::vector<double>& v, double predicted,
                        double t_lo, double t_hi, double time_shift) {
    FitOptions o;
    o.t_lo = t_lo;
    o.t_hi = t_hi;
    o.time_shift = time_shift;
    auto f = fit_decay(t, v, predicted, o);
    return py::make_tuple(f.exponent, f.pass);
  }, py::arg("times"), py::arg("values"), py::arg("predicted"), py::arg("t_lo") = 1e2,
     py::arg("t_hi") = 1e4, py::arg("time_shift") = 1.0);

  m.def("lp_lq_rate", [](const CoefficientModel& model, double p, int n) {
    auto r = lp_lq_rate(model, p, n);
    return py::make_tuple(r.decay_exponent, r.sobolev_order);
  }, py::arg("model"), py::arg("p"), py::arg("n"));

  m.def("run_experiment", [](const std::string& config_json) {
    auto rec = run_experiment(config_from_json(nlohmann::json::parse(config_json)));
    nlohmann::json j;
    j["config_hash"] = rec.config_hash;
    j["outputs"] = rec.outputs;
    j["all_pass"] = rec.all_pass();
    nlohmann::json v = nlohmann::json::array();
    for (const auto& x : rec.verdicts) v.push_back({{"name", x.name}, {"pass", x.pass}, {"value", x.value}});
    j["verdicts"] = v;
    return j.dump();
  }, py::arg("config_json"), "run one experiment; returns a JSON string");

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "fuchswave");
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}
