#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "fuchswave/error.hpp"
#include "fuchswave/experiment.hpp"

using namespace fuchswave;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fuchswave_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("config round trip keeps the hash") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::scattering;
  c.model = CoefficientModel::example_bounded();
  c.data = DataSpec::ring(1.0, 0.8);
  c.radial = RadialSpec{1, 0.2, 1.8, 129};
  auto back = config_from_json(to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.experiment == ExperimentKind::scattering);
  c.t_final = 2e4;
  CHECK(config_hash(back) != config_hash(c));
}

TEST_CASE("unknown fields are reported with their path") {
  auto j = to_json(ExperimentConfig{});
  j["model"]["bee"] = 1.0;
  auto msg = error_text([&] { config_from_json(j); });
  CHECK(msg.find("model.bee") != std::string::npos);
  auto j2 = to_json(ExperimentConfig{});
  j2["colour"] = "red";
  CHECK(error_text([&] { config_from_json(j2); }).find("colour") != std::string::npos);
}

TEST_CASE("malformed JSON reports line and column") {
  auto dir = fresh_dir("badjson");
  fs::create_directories(dir);
  auto p = dir / "bad.json";
  std::ofstream(p) << "{\n  \"schema\": 1,\n  \"experiment\": ]\n}\n";
  auto msg = error_text([&] { load_config(p.string()); });
  CHECK(msg.find("bad.json:3:") != std::string::npos);
  CHECK(error_text([&] { load_config((dir / "missing.json").string()); }).find("io") != std::string::npos);
}

TEST_CASE("same config gives the same manifest hash") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::classify;
  c.model = CoefficientModel::pure(4, 0);
  auto a = run_experiment(c);
  auto b = run_experiment(c);
  CHECK(manifest_hash(a) == manifest_hash(b));
  CHECK(a.outputs["mu_minus"][0].get<double>() == doctest::Approx(-4.0));
}

TEST_CASE("persist writes one CSV per trace and archives old manifests") {
  ResultRecord r;
  r.config_hash = "0123456789abcdef";
  for (std::string name : {"a", "b", "c"}) {
    Trace t;
    t.name = name;
    t.columns = {"t", "v"};
    t.add({1.0, 2.0});
    r.traces.push_back(t);
  }
  r.traces[2].file = "fixed.csv";
  auto dir = fresh_dir("persist");
  persist(r, dir.string());
  int csv = 0;
  for (auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".csv") ++csv;
  CHECK(csv == 3);
  CHECK(fs::exists(dir / "01234567_a.csv"));
  CHECK(fs::exists(dir / "fixed.csv"));
  CHECK(fs::exists(dir / "advisory.json"));
  persist(r, dir.string());
  persist(r, dir.string());
  int archived = 0;
  for (auto& e : fs::directory_iterator(dir)) {
    auto n = e.path().filename().string();
    if (n.rfind("manifest.", 0) == 0 && n != "manifest.json") ++archived;
  }
  CHECK(archived == 2);
  std::ifstream in(dir / "manifest.json");
  auto j = nlohmann::json::parse(in);
  CHECK(j.contains("manifest_hash"));
  CHECK(j.contains("wall_time"));
}

TEST_CASE("table two marks cells outside its range") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::table_sweep;
  c.table = 2;
  c.sweep = {{2, 2, 1.5}, {2, 0, 1.5}};
  auto rows = table_sweep(c);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].applicable);  // complex pair
  CHECK_FALSE(rows[1].applicable);  // 4 m0 = b0 (b0 - 2)
}

TEST_CASE("radial simulate run") {
  ExperimentConfig c;
  c.experiment = ExperimentKind::simulate;
  c.model = CoefficientModel::pure(2, 0.75);
  c.radial = RadialSpec{1, 1e-3, 1.0, 65};
  c.t_final = 100;
  c.time_points = 9;
  auto r = run_experiment(c);
  CHECK_FALSE(r.traces.empty());
  CHECK(r.traces[0].rows.size() == 9);
  CHECK(r.all_pass());
}

}
