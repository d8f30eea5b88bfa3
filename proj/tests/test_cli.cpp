#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#ifndef RESD_BIN
#error "RESD_BIN must point at the CLI binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunOut {
  int code;
  std::string out, err;
};

fs::path scratch_dir() {
  static fs::path d = [] {
    fs::path p = fs::temp_directory_path() / "resd-cli-test";
    fs::create_directories(p);
    return p;
  }();
  return d;
}

fs::path write_config(const std::string& name, const std::string& body) {
  fs::path p = scratch_dir() / name;
  std::ofstream f(p);
  f << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

RunOut run(const std::string& args) {
  fs::path so = scratch_dir() / "stdout.txt";
  fs::path se = scratch_dir() / "stderr.txt";
  std::string cmd = std::string(RESD_BIN) + " " + args + " > " +
                    so.string() + " 2> " + se.string();
  int st = std::system(cmd.c_str());
  int code = (st >= 0 && WIFEXITED(st)) ? WEXITSTATUS(st) : -1;
  return {code, slurp(so), slurp(se)};
}

}  // namespace

TEST_CASE("cli: oracle op emits the bound-state table") {
  fs::path cfg = write_config("oracle.json", R"({
    "oracle": {"op": "squarewell_bound_states", "h": -10.0, "a1": -1.0,
               "a2": 1.0}
  })");
  RunOut r = run("oracle --config " + cfg.string());
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc.at("schema") == "resonance-d/1");
  CHECK(doc.at("command") == "oracle");
  REQUIRE(doc.at("data").at("roots").size() == 3);
  // k values ascend and lambda = -k^2
  auto roots = doc["data"]["roots"];
  double prev = 0.0;
  for (const auto& rt : roots) {
    double kre = rt.at("k").at(0).get<double>();
    double lre = rt.at("lambda").at(0).get<double>();
    CHECK(kre > prev);
    CHECK(lre == doctest::Approx(-kre * kre));
    prev = kre;
  }
}

TEST_CASE("cli: evans reports equivalence defects") {
  fs::path cfg = write_config("evans.json", R"({
    "potential": {"kind": "poschl_teller", "V0": 6.0},
    "points": [[0.9, 0.2], [0.6, -0.4], [1.3, 0.8]]
  })");
  RunOut r = run("evans --config " + cfg.string());
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["data"]["points"].size() == 3);
  CHECK(doc["data"]["max_defect"].get<double>() < 1e-6);
  for (const auto& row : doc["data"]["points"]) {
    CHECK(row.contains("bbD"));
    CHECK(row.contains("evans"));
  }
}

TEST_CASE("cli: resonances finds the Poschl-Teller ground pair") {
  fs::path cfg = write_config("res.json", R"({
    "potential": {"kind": "poschl_teller", "V0": 6.0},
    "region": {"k_lo": [0.55, -0.35], "k_hi": [1.45, 0.35]}
  })");
  RunOut r = run("resonances --config " + cfg.string());
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  auto res = doc["data"]["resonances"];
  REQUIRE(res.size() == 1);
  CHECK(res[0]["k"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res[0]["multiplicity"] == 1);
  CHECK(res[0]["sheet"] == "first");
  CHECK(res[0]["eigen_residual"].get<double>() < 1e-6);
  CHECK(doc["data"]["clusters"].empty());
  CHECK(doc["meta"].contains("evaluations"));

  // determinism: the data section reproduces byte for byte
  RunOut r2 = run("resonances --config " + cfg.string());
  json doc2 = json::parse(r2.out);
  CHECK(doc["data"].dump() == doc2["data"].dump());
}

TEST_CASE("cli: scan writes a reproducible CSV") {
  fs::path cfg = write_config("scan.json", R"({
    "potential": {"kind": "square_well", "h": [-10.0, 0.0], "a1": 0.0,
                  "a2": 1.0},
    "grid": {"k_re": [-0.0005, 1.2], "k_im": [-0.5, 0.5], "steps": [5, 4]},
    "output": {"format": "csv"}
  })");
  RunOut r = run("scan --config " + cfg.string());
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "k_re,k_im,lambda_re,lambda_im,sheet,absD,argD,error");
  int rows = 0, excluded = 0;
  while (std::getline(is, line)) {
    ++rows;
    if (line.find("excluded") != std::string::npos) ++excluded;
  }
  CHECK(rows == 20);
  // the first column of the grid sits inside the cut margin
  CHECK(excluded == 4);

  RunOut r2 = run("scan --config " + cfg.string());
  CHECK(r.out == r2.out);
}

TEST_CASE("cli: --out routes the document to a file") {
  fs::path cfg = write_config("oracle2.json", R"({
    "oracle": {"op": "poschl_teller_roots", "V0": 6.0, "sheet": "first"}
  })");
  fs::path dst = scratch_dir() / "roots.json";
  RunOut r = run("oracle --config " + cfg.string() + " --out " +
                 dst.string());
  REQUIRE(r.code == 0);
  json doc = json::parse(slurp(dst));
  CHECK(doc["data"]["roots"].size() == 2);
}

TEST_CASE("cli: project reports the rank-one diagnostic") {
  fs::path cfg = write_config("project.json", R"({
    "potential": {"kind": "square_well", "h": [-10.0, 0.0], "a1": -1.0,
                  "a2": 1.0},
    "root": [2.9313453012623986, 0.0],
    "phi": {"kind": "indicator", "lo": -1.0, "hi": 1.0},
    "radius": 0.05,
    "contour_points": 12,
    "nystrom_n": 100,
    "xs": [-1.5, -0.75, 0.0, 0.75, 1.5]
  })");
  RunOut r = run("project --config " + cfg.string());
  REQUIRE(r.code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["data"]["samples"].size() == 5);
  CHECK(doc["data"]["proportionality_defect"].get<double>() < 1e-4);
}

TEST_CASE("cli: errors land on stderr with exit 1") {
  fs::path cfg = write_config("bad.json", R"({
    "potential": {"kind": "poschl_teller", "V0": 6.0}
  })");
  RunOut r = run("resonances --config " + cfg.string());
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(!r.err.empty());

  fs::path broken = write_config("broken.json", "{\"potential\": [,]}");
  RunOut r2 = run("evans --config " + broken.string());
  CHECK(r2.code == 1);
  CHECK(!r2.err.empty());

  RunOut r3 = run("evans --config " + (scratch_dir() / "nope.json").string());
  CHECK(r3.code == 1);
}
