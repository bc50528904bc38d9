#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mh/linearize.hpp"
#include "mh/mpc.hpp"
#include "mh/simulate.hpp"

namespace mh {

enum class StudyKind { kOpenLoopCompare, kRelinStudy, kClosedLoop, kSimulate };

/// Reference heat rates [Q_A, Q_B] held from `t`.
struct ReferenceStep {
  double t = 0;
  Vec2 r = Vec2::Zero();
};

struct Scenario {
  std::string name;
  StudyKind kind = StudyKind::kSimulate;
  Mode mode = Mode::kBtoA;
  double duration = 0;  // s
  Vec6 x0 = Vec6::Zero();
  InputSchedule schedule;  // inputs and disturbances; first segment at t=0
  std::vector<ReferenceStep> references;
  std::vector<double> relin_periods;  // relin study variants, 0 = never
  std::string partner;                // other validation case for joint ranges
  double control_rate = 1.0;          // Hz
  MPCConfig controller;

  void validate() const;
};

/// Reads a scenario file (JSON). Throws ConfigError with a field path.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& origin = "<string>");

/// Resolves a canned scenario name (e.g. "case1") or a path.
std::string scenario_path(const std::string& name_or_path);

struct MetricRecord {
  double t0 = 0;
  double t1 = 0;
  std::string variable;
  double rmse = 0;
  double nrmse = 0;
};

struct MetricsReport {
  std::vector<MetricRecord> records;
  std::map<std::string, double> ranges;  // normalization per variable type
  std::vector<std::string> notes;

  const MetricRecord* find(double t0, const std::string& var) const;
};

/// Windowed RMSE of b - a for selected columns. Windows tile [0, t_end];
/// each sample belongs to the window [k*w, (k+1)*w), the final sample to the
/// last window.
std::vector<double> window_rmse(const std::vector<double>& t, const std::vector<double>& a,
                                const std::vector<double>& b, double window, double t_end);

/// max over both cases of (x - x_initial), minus the min, per state.
Vec6 deviation_ranges(const Trajectory& c1, const Trajectory& c2);

/// Per-state windowed RMSE/NRMSE; temperature, pressure and weight fraction
/// rows share a normalization: the larger of the A and B ranges.
MetricsReport state_metrics(const Trajectory& nonlinear, const Trajectory& linear, const Vec6& ranges,
                            double window);

struct ComparisonResult {
  Trajectory nonlinear;
  Trajectory linear;
  LinearModel model;
};

ComparisonResult run_open_loop_comparison(const Scenario& sc, const PlantParams& p);

struct ValidationResult {
  ComparisonResult case1;
  ComparisonResult case2;
  Vec6 ranges;
  MetricsReport metrics1;
  MetricsReport metrics2;
};

/// Runs both validation cases so the normalization ranges are joint.
ValidationResult run_validation(const Scenario& a, const Scenario& b, const PlantParams& p);

struct RelinVariant {
  double period = 0;  // s, 0 = never
  Trajectory linear;
  std::vector<Vec2> rmse;  // per 30-min window, [Q_A, Q_B]
};

struct RelinResult {
  Trajectory nonlinear;
  std::vector<RelinVariant> variants;
  MetricsReport metrics;
};

RelinResult run_relin_study(const Scenario& sc, const PlantParams& p, double window = 1800.0);

struct ControlLogRow {
  double t;
  Vec2 r;
  Vec2 xi;
  int qp_iterations;
  bool relinearized;
  bool solver_failed;
};

struct SettleEvent {
  double t_event = 0;
  std::string cause;    // "reference" or "disturbance"
  double settle = -1;   // s after the event until |e| <= tol*|r| holds; -1 if never
};

struct ClosedLoopResult {
  Trajectory plant;
  std::vector<ControlLogRow> log;
  std::vector<SettleEvent> events;
  MetricsReport metrics;
};

ClosedLoopResult run_closed_loop(const Scenario& sc, const PlantParams& p, double settle_tol = 0.01);

Trajectory run_simulation(const Scenario& sc, const PlantParams& p);

void write_metrics_csv(const std::string& path, const MetricsReport& m);
void write_metrics_text(std::ostream& os, const MetricsReport& m, const std::string& title);
/// Machine-readable form: {"title", "normalization", "records": [...], "notes"}.
void write_metrics_json(std::ostream& os, const MetricsReport& m, const std::string& title);
void write_control_log(const std::string& path, const ClosedLoopResult& r);

}  // namespace mh
