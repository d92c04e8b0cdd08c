#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fuchswave/cli.hpp"

using namespace fuchswave;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fuchswave");
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("fuchswave_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("classify prints both exponents") {
  auto d = scratch("classify");
  auto r = cli({"classify", "--b0", "4", "--m0", "0", "--out", d.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("mu_plus=-1") != std::string::npos);
  CHECK(r.out.find("mu_minus=-4") != std::string::npos);
  CHECK(r.out.find("regime=real_large_muplus") != std::string::npos);
  CHECK(fs::exists(d / "manifest.json"));
}

TEST_CASE("simulate without a config is a usage error") {
  auto r = cli({"simulate"});
  CHECK(r.code == 1);
  CHECK(r.err.find("--config") != std::string::npos);
}

TEST_CASE("unknown subcommand") { CHECK(cli({"frobnicate"}).code != 0); }

TEST_CASE("empty sweep exits 0") {
  auto d = scratch("empty");
  std::ofstream(d / "c.json") << R"({"schema": 1, "experiment": "table_sweep", "sweep": {"table": 1, "cells": []}})";
  auto r = cli({"sweep", "--config", (d / "c.json").string(), "--out", (d / "out").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(d / "out" / "table1_results.csv"));
}

TEST_CASE("table two marks a complex cell not applicable") {
  auto d = scratch("table2");
  std::ofstream(d / "c.json")
      << R"({"schema": 1, "experiment": "table_sweep", "sweep": {"table": 2, "cells": [{"b0": 2, "m0": 2, "sigma": 1.5}]}})";
  auto r = cli({"sweep", "--config", (d / "c.json").string(), "--out", (d / "out").string()});
  CHECK(r.code == 0);
  std::ifstream in(d / "out" / "table2_results.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("not-applicable") != std::string::npos);
}

TEST_CASE("mismatched subcommand and experiment") {
  auto d = scratch("mismatch");
  std::ofstream(d / "c.json") << R"({"schema": 1, "experiment": "moments"})";
  CHECK(cli({"sweep", "--config", (d / "c.json").string(), "--out", (d / "out").string()}).code == 1);
}

TEST_CASE("malformed config exits 1 with a location") {
  auto d = scratch("malformed");
  std::ofstream(d / "c.json") << "{\n \"schema\": 1,,\n}";
  auto r = cli({"moments", "--config", (d / "c.json").string(), "--out", (d / "out").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("c.json:2:") != std::string::npos);
}

}
