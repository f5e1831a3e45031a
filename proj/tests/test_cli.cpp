#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "granuflow/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "granuflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = granuflow::cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("granuflow-cli-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<double> column_in(std::istream& in, const std::string& name) {
  const auto rows = granuflow::csv::read(in);
  REQUIRE_FALSE(rows.empty());
  const std::size_t c = granuflow::csv::column(rows[0], name);
  std::vector<double> out;
  for (std::size_t r = 1; r < rows.size(); ++r) out.push_back(granuflow::csv::parse_double(rows[r].at(c)));
  return out;
}

std::vector<double> column_of(const fs::path& p, const std::string& name) {
  std::ifstream in(p);
  return column_in(in, name);
}

std::string dirac_config(const std::string& cloud, const std::string& out, double tau = 0.05, double horizon = 1.0) {
  return R"({"schema": 1, "initial": {"kind": "csv", "path": ")" + cloud + R"(", "label_count": 1},
  "jko": {"tau": )" + std::to_string(tau) + R"(, "T": )" + std::to_string(horizon) + R"(, "R_x": 1, "R_v": 1},
  "output_dir": ")" + out + R"("})";
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"simulate"}).code == 2);
  CHECK(invoke({"validate", "no-such-suite"}).code == 2);
  CHECK(invoke({"simulate", "/nonexistent/config.json"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("config errors exit with 2") {
  TempDir tmp;
  const auto unseeded = tmp.write("g.json", R"({"schema": 1, "initial": {"kind": "gaussian-box", "R_x": 1, "R_v": 1, "samples": 10}})");
  const Invocation r = invoke({"simulate", unseeded.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("seed") != std::string::npos);
  const auto unknown = tmp.write("u.json", R"({"schema": 1, "initial": {"kind": "discrete_labels", "labels": 2}, "colour": 3})");
  CHECK(invoke({"simulate", unknown.string()}).code == 2);
  const auto bad = tmp.write("b.json", "{not json");
  CHECK(invoke({"simulate", bad.string()}).code == 2);
  const auto no_schema = tmp.write("s.json", R"({"initial": {"kind": "discrete_labels", "labels": 2}})");
  CHECK(invoke({"simulate", no_schema.string()}).code == 2);
}

TEST_CASE("a stationary scenario keeps the energy column constant") {
  TempDir tmp;
  tmp.write("cloud.csv", "x,v,weight\n0,0,1\n");
  const auto cfg = tmp.write("c.json", dirac_config("cloud.csv", "out"));
  const Invocation r = invoke({"simulate", cfg.string()});
  REQUIRE(r.code == 0);
  const auto total = column_of(tmp.path / "out" / "energy.csv", "total");
  CHECK(total.size() == 22);
  for (double e : total) CHECK(e == 0.0);
  for (const char* f : {"trajectory.csv", "grid.csv", "summary.json", "energy.svg", "rho.svg", "phase.svg"}) {
    CHECK(fs::exists(tmp.path / "out" / f));
  }
}

TEST_CASE("simulate is deterministic byte for byte") {
  TempDir tmp;
  const auto cfg = tmp.write("c.json", R"({"schema": 1, "seed": 3,
    "initial": {"kind": "gaussian-box", "R_x": 1, "R_v": 1, "samples": 60, "label_count": 4},
    "jko": {"tau": 0.05, "T": 0.5}, "output_dir": "out"})");
  REQUIRE(invoke({"simulate", cfg.string()}).code == 0);
  std::vector<std::string> first;
  const std::vector<std::string> files{"trajectory.csv", "energy.csv", "grid.csv", "summary.json", "energy.svg"};
  for (const auto& f : files) first.push_back(slurp(tmp.path / "out" / f));
  REQUIRE(invoke({"simulate", cfg.string()}).code == 0);
  for (std::size_t k = 0; k < files.size(); ++k) CHECK(slurp(tmp.path / "out" / files[k]) == first[k]);
}

TEST_CASE("the two-label family shocks before T = 2.1") {
  TempDir tmp;
  const auto cfg = tmp.write("c.json", R"({"schema": 1,
    "initial": {"kind": "discrete_labels", "labels": 2, "rho0": "uniform", "particles": 32},
    "jko": {"tau": 0.05, "T": 2.1}, "oracles": {"characteristics": true, "burgers": true},
    "output_dir": "out"})");
  const Invocation r = invoke({"simulate", cfg.string()});
  REQUIRE(r.code == 0);
  const auto pos = r.out.find("characteristics shock time: ");
  REQUIRE(pos != std::string::npos);
  const double t = std::stod(r.out.substr(pos + 28));
  CHECK(t > 0.0);
  CHECK(t <= 2.1);
  CHECK(r.out.find("Burgers shock time: none") == std::string::npos);
}

TEST_CASE("compare: identical configs give d = 0, translated Diracs a constant d") {
  TempDir tmp;
  tmp.write("a.csv", "x,v,weight\n0,0.2,1\n");
  tmp.write("b.csv", "x,v,weight\n0.5,0.2,1\n");
  const auto a = tmp.write("a.json", dirac_config("a.csv", "oa", 0.05, 0.5));
  const auto b = tmp.write("b.json", dirac_config("b.csv", "ob", 0.05, 0.5));

  REQUIRE(invoke({"compare", a.string(), a.string(), "--out", (tmp.path / "same").string()}).code == 0);
  for (double d : column_of(tmp.path / "same" / "distance.csv", "d")) CHECK(d == 0.0);

  REQUIRE(invoke({"compare", a.string(), b.string(), "--out", (tmp.path / "shift").string()}).code == 0);
  const auto d = column_of(tmp.path / "shift" / "distance.csv", "d");
  CHECK(d.size() == 12);
  for (double v : d) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fs::exists(tmp.path / "shift" / "comparison.json"));
}

TEST_CASE("compare: different label grids exit with 2") {
  TempDir tmp;
  const auto a = tmp.write("a.json", R"({"schema": 1, "initial": {"kind": "discrete_labels", "labels": 2, "particles": 8},
    "jko": {"tau": 0.05, "T": 0.2}, "output_dir": "oa"})");
  const auto b = tmp.write("b.json", R"({"schema": 1, "initial": {"kind": "discrete_labels", "labels": 3, "particles": 8},
    "jko": {"tau": 0.05, "T": 0.2}, "output_dir": "ob"})");
  const Invocation r = invoke({"compare", a.string(), b.string()});
  CHECK(r.code == 2);
}

TEST_CASE("reconstruct reads a trajectory back") {
  TempDir tmp;
  const auto cfg = tmp.write("c.json", R"({"schema": 1, "initial": {"kind": "discrete_labels", "labels": 2, "particles": 8},
    "jko": {"tau": 0.05, "T": 0.5}, "output_dir": "out"})");
  REQUIRE(invoke({"simulate", cfg.string()}).code == 0);
  const auto traj = (tmp.path / "out" / "trajectory.csv").string();
  const Invocation r = invoke({"reconstruct", traj, "--time", "0.25"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto w = column_in(in, "weight");
  CHECK(w.size() == 16);
  double mass = 0.0;
  for (double x : w) mass += x;
  CHECK(mass == doctest::Approx(1.0));

  const auto out = tmp.path / "cloud.csv";
  CHECK(invoke({"reconstruct", traj, "--time", "0.25", "--out", out.string()}).code == 0);
  CHECK(slurp(out) == r.out);
  CHECK(invoke({"reconstruct", traj, "--time", "7"}).code == 2);
  CHECK(invoke({"reconstruct", (tmp.path / "missing.csv").string(), "--time", "0"}).code == 2);
}

TEST_CASE("validate runs a suite") {
  const Invocation r = invoke({"validate", "ot-oracle"});
  CHECK(r.code == 0);
  CHECK(r.out.find("[PASS] 1") != std::string::npos);
}
