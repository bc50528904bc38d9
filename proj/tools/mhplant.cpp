// Command-line driver for the two-reactor hydride plant studies.
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mh/params.hpp"
#include "mh/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string params;
  std::string out = "out";
  std::string format = "text";
};

std::string path_in(const Common& c, const std::string& file) { return (fs::path(c.out) / file).string(); }

void report(const Common& c, const mh::MetricsReport& m, const std::string& title, const std::string& csv) {
  mh::write_metrics_csv(path_in(c, csv), m);
  if (c.format == "json")
    mh::write_metrics_json(std::cout, m, title);
  else
    mh::write_metrics_text(std::cout, m, title);
}

mh::PlantParams params_of(const Common& c) {
  return mh::load_params(c.params.empty() ? mh::default_params_path() : c.params);
}

mh::Scenario scenario_of(const std::string& s) { return mh::load_scenario(mh::scenario_path(s)); }

void run_validate(const Common& c, int which) {
  const mh::PlantParams p = params_of(c);
  const mh::Scenario a = scenario_of("case1");
  const mh::Scenario b = scenario_of("case2");
  const mh::ValidationResult v = mh::run_validation(a, b, p);
  const auto& cr = which == 1 ? v.case1 : v.case2;
  const std::string tag = "case" + std::to_string(which);
  mh::write_csv(path_in(c, tag + "_nonlinear.csv"), cr.nonlinear);
  mh::write_csv(path_in(c, tag + "_linear.csv"), cr.linear);
  mh::write_linear_model(path_in(c, tag + "_model.json"), cr.model);
  report(c, which == 1 ? v.metrics1 : v.metrics2, tag + " open-loop linear vs nonlinear", tag + "_metrics.csv");
}

void run_relin(const Common& c, const std::string& name) {
  const mh::PlantParams p = params_of(c);
  const mh::Scenario sc = scenario_of(name);
  const mh::RelinResult r = mh::run_relin_study(sc, p);
  mh::write_csv(path_in(c, sc.name + "_nonlinear.csv"), r.nonlinear);
  for (const auto& v : r.variants) {
    const std::string tag = v.period > 0 ? "every_" + std::to_string(static_cast<long>(v.period)) + "s" : "never";
    mh::write_csv(path_in(c, sc.name + "_linear_" + tag + ".csv"), v.linear);
  }
  report(c, r.metrics, sc.name + " heat-rate error by re-linearization period", sc.name + "_metrics.csv");
}

void run_closed(const Common& c, const std::string& name, double settle_tol) {
  const mh::PlantParams p = params_of(c);
  const mh::Scenario sc = scenario_of(name);
  if (sc.kind != mh::StudyKind::kClosedLoop) throw mh::ConfigError("/kind", "scenario is not closed-loop");
  const mh::ClosedLoopResult r = mh::run_closed_loop(sc, p, settle_tol);
  mh::write_csv(path_in(c, sc.name + "_trajectory.csv"), r.plant);
  mh::write_control_log(path_in(c, sc.name + "_control.csv"), r);
  report(c, r.metrics, sc.name + " tracking error", sc.name + "_metrics.csv");
}

void run_sim(const Common& c, const std::string& name) {
  const mh::PlantParams p = params_of(c);
  const mh::Scenario sc = scenario_of(name);
  mh::write_csv(path_in(c, sc.name + "_trajectory.csv"), mh::run_simulation(sc, p));
  std::cout << "wrote " << path_in(c, sc.name + "_trajectory.csv") << '\n';
}

void run_linearize(const Common& c, const std::string& at) {
  const mh::PlantParams p = params_of(c);
  // A state file is any scenario-shaped file; only mode and initial values are used.
  const mh::Scenario sc = mh::load_scenario(mh::scenario_path(at));
  const mh::Segment& s0 = sc.schedule.front();
  const mh::LinearModel lm = mh::linearize(mh::PlantConfig{p, sc.mode}, sc.x0, s0.u, s0.d);
  mh::write_linear_model(path_in(c, sc.name + "_model.json"), lm);
  mh::write_linear_model(std::cout, lm);
  for (const auto& w : lm.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-reactor metal hydride plant: simulation, linearization and MPC studies"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--params", c.params, "parameter file (default: shipped data/parameters.json)");
  app.add_option("--out", c.out, "output directory")->capture_default_str();
  app.add_option("--format", c.format, "report format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

  int which = 1;
  auto* val = app.add_subcommand("validate", "open-loop linear vs nonlinear comparison with NRMSE tables");
  val->add_option("--case", which, "validation case")->check(CLI::IsMember({1, 2}))->required();

  std::string relin_name = "relin";
  auto* rel = app.add_subcommand("relin-study", "heat-rate error for three re-linearization periods");
  rel->add_option("--scenario", relin_name, "scenario name or path")->capture_default_str();

  std::string name;
  double settle_tol = 0.01;
  auto* trk = app.add_subcommand("track", "closed-loop setpoint tracking");
  trk->add_option("--scenario", name, "scenario name or path")->required();
  trk->add_option("--settle-tol", settle_tol, "relative band for settling")->capture_default_str();
  auto* dis = app.add_subcommand("disturb", "closed-loop disturbance rejection");
  dis->add_option("--scenario", name, "scenario name or path")->required();
  dis->add_option("--settle-tol", settle_tol, "relative band for settling")->capture_default_str();
  auto* sim = app.add_subcommand("simulate", "open-loop nonlinear run");
  sim->add_option("--scenario", name, "scenario name or path")->required();
  std::string at;
  auto* lin = app.add_subcommand("linearize", "dump continuous-time matrices at an operating point");
  lin->add_option("--at", at, "state file (scenario-shaped JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; every usage error maps to the config exit code.
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  try {
    fs::create_directories(c.out);
    if (val->parsed()) run_validate(c, which);
    if (rel->parsed()) run_relin(c, relin_name);
    if (trk->parsed() || dis->parsed()) run_closed(c, name, settle_tol);
    if (sim->parsed()) run_sim(c, name);
    if (lin->parsed()) run_linearize(c, at);
  } catch (const mh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const mh::IntegrationError& e) {
    std::cerr << "integration failed at t=" << e.time << ": " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
