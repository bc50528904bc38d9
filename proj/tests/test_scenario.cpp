#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "mh/scenario.hpp"
#include "test_util.hpp"

using namespace mh;
using mh::test::shipped;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MHPLANT_EXE) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kMinimal = R"({
  "name": "mini", "kind": "simulate", "mode": "B->A", "duration_s": 20,
  "initial_state": {"T_hyd_A": 280.04, "T_hyd_B": 310.05, "P_H_A": 480000, "P_H_B": 290000, "w_A": 0.006, "w_B": 0.006},
  "initial_input": {"mdot_wg_A": 0.2, "mdot_wg_B": 0.2, "dP_comp": 210000},
  "initial_disturbance": {"T_wg_in_A": 275.04, "T_wg_in_B": 316.05},
  "events": [{"t": 10, "dP_comp": 260000}]
})";

json minimal() { return json::parse(kMinimal); }

std::string field_of(const json& j) {
  try {
    parse_scenario(j.dump());
  } catch (const ConfigError& e) {
    return e.field;
  }
  return "";
}

}  // namespace

TEST_CASE("windowed RMSE of identical series is zero and of an offset is the offset") {
  std::vector<double> t, a, b, c;
  for (int k = 0; k <= 900; ++k) {
    t.push_back(k);
    a.push_back(std::sin(0.01 * k));
    b.push_back(a.back());
    c.push_back(a.back() + 0.25);
  }
  for (double v : window_rmse(t, a, b, 300, 900)) CHECK(v == 0.0);
  const auto w = window_rmse(t, a, c, 300, 900);
  REQUIRE(w.size() == 3);
  for (double v : w) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("windowed RMSE recombines into the full-horizon RMSE") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N(0, 1);
  std::vector<double> t, a, b;
  for (int k = 0; k <= 1800; ++k) {
    t.push_back(k);
    a.push_back(N(rng));
    b.push_back(N(rng));
  }
  const auto w = window_rmse(t, a, b, 300, 1800);
  std::vector<int> cnt(w.size(), 0);
  double full = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    full += (b[k] - a[k]) * (b[k] - a[k]);
    ++cnt[std::min<std::size_t>(static_cast<std::size_t>(t[k] / 300), w.size() - 1)];
  }
  full = std::sqrt(full / t.size());
  double ss = 0;
  for (std::size_t i = 0; i < w.size(); ++i) ss += cnt[i] * w[i] * w[i];
  CHECK(std::abs(std::sqrt(ss / t.size()) - full) <= 1e-12 * full);
}

TEST_CASE("state metrics: windows tile the run and NRMSE uses the larger range") {
  Trajectory a, b;
  for (int k = 0; k <= 600; ++k) {
    Vec6 x;
    x << 280 + 0.01 * k, 300 - 0.02 * k, 4e5 + 10 * k, 3e5, 0.006, 0.006 + 1e-6 * k;
    a.push(k, x, Vec3::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero());
    Vec6 y = x;
    y[0] += 0.5;
    y[3] += 100;
    b.push(k, y, Vec3::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero());
  }
  const Vec6 ranges = deviation_ranges(a, a);
  CHECK(ranges[0] == doctest::Approx(6.0));
  CHECK(ranges[1] == doctest::Approx(12.0));
  const MetricsReport m = state_metrics(a, b, ranges, 300.0);
  REQUIRE(m.records.size() == 12);
  CHECK(m.records.front().t0 == 0);
  CHECK(m.records.back().t1 == 600);
  for (const auto& r : m.records) {
    const std::string type = r.variable[0] == 'T' ? "temperature" : (r.variable[0] == 'P' ? "pressure" : "weight_fraction");
    const double norm = m.ranges.at(type);
    if (norm > 0) CHECK(r.nrmse == r.rmse / norm);
  }
  CHECK(m.ranges.at("temperature") == doctest::Approx(12.0));
  CHECK(m.find(300, "T_hyd_A")->rmse == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.find(0, "P_H_B")->rmse == doctest::Approx(100).epsilon(1e-12));
}

TEST_CASE("comparing the linear model with itself gives zero error") {
  Scenario sc = parse_scenario(kMinimal);
  const PlantConfig cfg{shipped(), sc.mode};
  const LinearModel lm = linearize(cfg, sc.x0, sc.schedule[0].u, sc.schedule[0].d);
  const Trajectory t1 = simulate(linear_model(lm), sc.x0, sc.schedule, sc.duration);
  const Trajectory t2 = simulate(linear_model(lm), sc.x0, sc.schedule, sc.duration);
  const MetricsReport m = state_metrics(t1, t2, deviation_ranges(t1, t1), 10.0);
  for (const auto& r : m.records) CHECK(r.rmse == 0.0);
}

TEST_CASE("all canned scenarios load") {
  for (const char* n : {"case1", "case2", "relin", "track_case1", "track_case2", "track_ratio1", "disturb_case1",
                        "disturb_case2"}) {
    const Scenario sc = load_scenario(scenario_path(n));
    CHECK(sc.name == n);
    CHECK(sc.schedule.front().t == 0);
  }
  CHECK(load_scenario(scenario_path("case1")).mode == Mode::kBtoA);
  CHECK(load_scenario(scenario_path("case2")).mode == Mode::kAtoB);
  CHECK(load_scenario(scenario_path("track_ratio1")).kind == StudyKind::kClosedLoop);
}

TEST_CASE("scenario errors name the offending field") {
  json j = minimal();
  j.erase("kind");
  CHECK(field_of(j) == "/kind");
  j = minimal();
  j["mode"] = "A<-B";
  CHECK(field_of(j) == "/mode");
  j = minimal();
  j["initial_state"].erase("w_B");
  CHECK(field_of(j) == "/initial_state/w_B");
  j = minimal();
  j["events"][0]["t"] = 30;
  CHECK(field_of(j) == "/events/0/t");
  j = minimal();
  j["events"][0] = json{{"t", 5}};
  CHECK(field_of(j) == "/events/0");
  j = minimal();
  j["kind"] = "closed-loop";
  CHECK(field_of(j) == "/references");
  j["references"] = json::array({json{{"t", 0}, {"Q_A", 100}, {"Q_B", -117}}});
  j["controller"] = json{{"horizon", 0}};
  CHECK(field_of(j) == "/controller/horizon");
  j["controller"] = json{{"R", {1, 1}}};
  CHECK(field_of(j) == "/controller/R");
  j["controller"] = json{{"integrator", "sum"}};
  CHECK(field_of(j) == "/controller/integrator");
  j["controller"] = json::object();
  j["control_rate_hz"] = 0;
  CHECK(field_of(j) == "/control_rate_hz");
  CHECK_THROWS_AS(parse_scenario("{not json"), ConfigError);
  CHECK_THROWS_AS(scenario_path("no_such_scenario"), ConfigError);
}

TEST_CASE("parameter errors name the offending field") {
  json p = json::parse(slurp(default_params_path()));
  p["materials"]["A"]["C_A"].erase("source");
  try {
    parse_params(p.dump());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "/materials/A/C_A/source");
  }
  p = json::parse(slurp(default_params_path()));
  p["geometry"].erase("B");
  CHECK_THROWS_AS(parse_params(p.dump()), ConfigError);
  p = json::parse(slurp(default_params_path()));
  p["materials"]["B"]["porosity"]["value"] = 1.5;
  CHECK_THROWS_AS(parse_params(p.dump()), ConfigError);
}

TEST_CASE("shipped parameters carry a source on every value") {
  const json p = json::parse(slurp(default_params_path()));
  int leaves = 0;
  std::function<void(const json&)> walk = [&](const json& j) {
    if (j.is_object() && j.contains("value")) {
      ++leaves;
      CHECK(j.contains("source"));
      CHECK_FALSE(j["source"].get<std::string>().empty());
      return;
    }
    if (j.is_object())
      for (const auto& [k, v] : j.items()) walk(v);
  };
  walk(p);
  CHECK(leaves > 40);
}

TEST_CASE("metrics CSV and JSON schemas") {
  MetricsReport m;
  m.records.push_back({0, 300, "T_hyd_A", 0.1, 0.01});
  m.records.push_back({300, 600, "T_hyd_A", 1.0 / 3.0, 2.0 / 3.0});
  m.ranges["temperature"] = 10;
  m.notes.push_back("note");
  const std::string path = "metrics_schema_test.csv";
  write_metrics_csv(path, m);
  std::ifstream is(path);
  std::string line;
  std::getline(is, line);
  CHECK(line == "window_start_s,window_end_s,variable,rmse,nrmse");
  std::getline(is, line);
  std::getline(is, line);
  std::stringstream ss(line);
  std::string f[5];
  for (auto& c : f) std::getline(ss, c, ',');
  CHECK(f[2] == "T_hyd_A");
  CHECK(std::strtod(f[3].c_str(), nullptr) == 1.0 / 3.0);
  CHECK(std::strtod(f[4].c_str(), nullptr) == 2.0 / 3.0);
  std::remove(path.c_str());

  std::ostringstream os;
  write_metrics_json(os, m, "t");
  const json j = json::parse(os.str());
  CHECK(j["title"] == "t");
  CHECK(j["normalization"]["temperature"] == 10.0);
  REQUIRE(j["records"].size() == 2);
  const json& r = j["records"][1];
  for (const char* k : {"window_start_s", "window_end_s", "variable", "rmse", "nrmse"}) CHECK(r.contains(k));
  CHECK(r["rmse"].get<double>() == 1.0 / 3.0);
  CHECK(j["notes"][0] == "note");
}

TEST_CASE("relin study: three variants, four windows, shared first window") {
  const Scenario sc = load_scenario(scenario_path("relin"));
  const RelinResult r = run_relin_study(sc, shipped());
  CHECK(r.metrics.records.size() == 24);
  REQUIRE(r.variants.size() == 3);
  for (const auto& v : r.variants) CHECK(v.rmse.size() == 4);
  const auto& never = r.variants[0];
  const auto& slow = r.variants[2];
  CHECK(never.period == 0);
  CHECK(slow.period == 1800);
  CHECK(slow.rmse[0] == never.rmse[0]);
  CHECK(never.rmse[3][1] > never.rmse[0][1]);
  for (std::size_t w = 1; w < 4; ++w)
    for (std::size_t v = 1; v < 3; ++v) CHECK(r.variants[v].rmse[w][1] < never.rmse[w][1]);
}

TEST_CASE("after a reference change the closed loop settles within 1%") {
  json j = minimal();
  j["kind"] = "closed-loop";
  j["duration_s"] = 600;
  j.erase("events");
  const Vec2 ref(150.0, -176.47);
  j["references"] = json::array({json{{"t", 0}, {"Q_A", 100}, {"Q_B", -117.65}},
                                 json{{"t", 300}, {"Q_A", ref[0]}, {"Q_B", ref[1]}}});
  const ClosedLoopResult r = run_closed_loop(parse_scenario(j.dump()), shipped());
  double worst = 0;
  for (std::size_t k = 0; k < r.plant.size(); ++k) {
    if (r.plant.t[k] < 360) continue;
    for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(r.plant.Q[k][i] - ref[i]) / std::abs(ref[i]));
  }
  CHECK(worst < 0.01);
  MESSAGE("worst relative tracking error from 60 s after the change " << worst);
}

TEST_CASE("control log schema") {
  ClosedLoopResult r;
  r.log.push_back({1.0, Vec2(100, -117), Vec2(0.5, -0.25), 3, true, false});
  const std::string path = "control_schema_test.csv";
  write_control_log(path, r);
  const std::string text = slurp(path);
  CHECK(text.rfind("t,Q_ref_A,Q_ref_B,x_i_m,x_i_n,qp_iterations,relinearized,solver_failed\n", 0) == 0);
  CHECK(text.find("1,100,-117,0.5,-0.25,3,1,0") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("CLI: exit codes, outputs, determinism") {
  const fs::path out = fs::path("cli_test_out");
  fs::remove_all(out);
  CHECK(run_cli("bogus") == 2);
  CHECK(run_cli("validate --case 7") == 2);
  CHECK(run_cli("--out " + out.string() + " track --scenario no_such") == 2);
  CHECK(run_cli("--params /nonexistent.json --out " + out.string() + " validate --case 1") == 2);
  REQUIRE(run_cli("--out " + out.string() + " validate --case 1") == 0);
  for (const char* f : {"case1_nonlinear.csv", "case1_linear.csv", "case1_metrics.csv", "case1_model.json"})
    CHECK(fs::exists(out / f));
  const std::string first = slurp(out / "case1_metrics.csv") + slurp(out / "case1_linear.csv");
  REQUIRE(run_cli("--out " + out.string() + " validate --case 1") == 0);
  CHECK(first == slurp(out / "case1_metrics.csv") + slurp(out / "case1_linear.csv"));
  REQUIRE(run_cli("--out " + out.string() + " --format json relin-study") == 0);
  std::ifstream is(out / "relin_metrics.csv");
  std::string line;
  int rows = -1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 24);
  fs::remove_all(out);
}
