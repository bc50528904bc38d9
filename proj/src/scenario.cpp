#include "mh/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "mh/params.hpp"

namespace mh {

using nlohmann::json;

namespace {

const char* kStateCols[6] = {"T_hyd_A", "T_hyd_B", "P_H_A", "P_H_B", "w_A", "w_B"};
const char* kInputCols[3] = {"mdot_wg_A", "mdot_wg_B", "dP_comp"};
const char* kDistCols[2] = {"T_wg_in_A", "T_wg_in_B"};

double num(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) throw ConfigError(path + "/" + key, "missing");
  if (!j.at(key).is_number()) throw ConfigError(path + "/" + key, "not a number");
  return j.at(key).get<double>();
}

template <int N>
Eigen::Matrix<double, N, 1> vec_field(const json& j, const std::string& key, const std::string& path,
                                      const Eigen::Matrix<double, N, 1>& fallback) {
  if (!j.contains(key)) return fallback;
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != N) throw ConfigError(path + "/" + key, "expected array of " + std::to_string(N));
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!a[i].is_number()) throw ConfigError(path + "/" + key + "/" + std::to_string(i), "not a number");
    v[i] = a[i].get<double>();
  }
  return v;
}

StudyKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "open-loop-compare") return StudyKind::kOpenLoopCompare;
  if (s == "relin-study") return StudyKind::kRelinStudy;
  if (s == "closed-loop") return StudyKind::kClosedLoop;
  if (s == "simulate") return StudyKind::kSimulate;
  throw ConfigError(path, "unknown kind '" + s + "'");
}

Mode parse_mode(const std::string& s, const std::string& path) {
  if (s == "B->A") return Mode::kBtoA;
  if (s == "A->B") return Mode::kAtoB;
  throw ConfigError(path, "mode must be \"B->A\" or \"A->B\"");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t index_at(const Trajectory& tr, double t) {
  auto it = std::lower_bound(tr.t.begin(), tr.t.end(), t - 1e-9);
  if (it == tr.t.end() || std::abs(*it - t) > 1e-9) throw std::runtime_error("no sample at t=" + fmt(t));
  return static_cast<std::size_t>(it - tr.t.begin());
}

InputSchedule shifted(const InputSchedule& s, double t0, double t1) {
  InputSchedule out;
  out.push_back(segment_at(s, t0));
  out.back().t = 0;
  for (const Segment& seg : s) {
    if (seg.t > t0 + 1e-12 && seg.t < t1 - 1e-12) {
      out.push_back(seg);
      out.back().t -= t0;
    }
  }
  return out;
}

}  // namespace

void Scenario::validate() const {
  if (!(duration > 0)) throw ConfigError("/duration_s", "must be positive");
  if (schedule.empty() || schedule.front().t != 0) throw ConfigError("/events", "schedule must start at t=0");
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    if (schedule[k].t <= schedule[k - 1].t || schedule[k].t > duration)
      throw ConfigError("/events/" + std::to_string(k - 1) + "/t", "breakpoints must increase within the duration");
  }
  if (kind == StudyKind::kClosedLoop) {
    if (!(control_rate > 0)) throw ConfigError("/control_rate_hz", "must be positive");
    if (references.empty() || references.front().t != 0)
      throw ConfigError("/references", "closed-loop scenarios need references starting at t=0");
  }
  if (kind == StudyKind::kRelinStudy && relin_periods.empty())
    throw ConfigError("/relin_periods_s", "relin study needs at least one variant");
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin, e.what());
  }
  Scenario sc;
  sc.name = j.value("name", std::filesystem::path(origin).stem().string());
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("/kind", "missing");
  sc.kind = parse_kind(j["kind"].get<std::string>(), "/kind");
  if (!j.contains("mode") || !j["mode"].is_string()) throw ConfigError("/mode", "missing");
  sc.mode = parse_mode(j["mode"].get<std::string>(), "/mode");
  sc.duration = num(j, "duration_s", "");

  if (!j.contains("initial_state")) throw ConfigError("/initial_state", "missing");
  for (int i = 0; i < 6; ++i) sc.x0[i] = num(j["initial_state"], kStateCols[i], "/initial_state");
  Segment seg;
  if (!j.contains("initial_input")) throw ConfigError("/initial_input", "missing");
  if (!j.contains("initial_disturbance")) throw ConfigError("/initial_disturbance", "missing");
  for (int i = 0; i < 3; ++i) seg.u[i] = num(j["initial_input"], kInputCols[i], "/initial_input");
  for (int i = 0; i < 2; ++i) seg.d[i] = num(j["initial_disturbance"], kDistCols[i], "/initial_disturbance");
  sc.schedule.push_back(seg);
  if (j.contains("events")) {
    const json& ev = j["events"];
    if (!ev.is_array()) throw ConfigError("/events", "expected array");
    for (std::size_t k = 0; k < ev.size(); ++k) {
      const std::string p = "/events/" + std::to_string(k);
      Segment s = sc.schedule.back();
      s.t = num(ev[k], "t", p);
      bool any = false;
      for (int i = 0; i < 3; ++i)
        if (ev[k].contains(kInputCols[i])) s.u[i] = num(ev[k], kInputCols[i], p), any = true;
      for (int i = 0; i < 2; ++i)
        if (ev[k].contains(kDistCols[i])) s.d[i] = num(ev[k], kDistCols[i], p), any = true;
      if (!any) throw ConfigError(p, "event changes nothing");
      if (s.t == 0)
        sc.schedule.back() = s;
      else
        sc.schedule.push_back(s);
    }
  }
  if (j.contains("references")) {
    const json& rf = j["references"];
    if (!rf.is_array()) throw ConfigError("/references", "expected array");
    for (std::size_t k = 0; k < rf.size(); ++k) {
      const std::string p = "/references/" + std::to_string(k);
      ReferenceStep r;
      r.t = num(rf[k], "t", p);
      r.r = Vec2(num(rf[k], "Q_A", p), num(rf[k], "Q_B", p));
      if (!sc.references.empty() && r.t <= sc.references.back().t) throw ConfigError(p + "/t", "must increase");
      sc.references.push_back(r);
    }
  }
  if (j.contains("relin_periods_s")) {
    if (!j["relin_periods_s"].is_array()) throw ConfigError("/relin_periods_s", "expected array");
    for (const auto& v : j["relin_periods_s"]) {
      if (!v.is_number()) throw ConfigError("/relin_periods_s", "not a number");
      sc.relin_periods.push_back(v.get<double>());
    }
  }
  sc.partner = j.value("partner", "");
  if (j.contains("control_rate_hz")) sc.control_rate = num(j, "control_rate_hz", "");
  MPCConfig& mc = sc.controller;
  mc.Ts = 1.0 / sc.control_rate;
  if (j.contains("controller")) {
    const json& c = j["controller"];
    const std::string p = "/controller";
    if (c.contains("horizon")) {
      if (!c["horizon"].is_number_integer() || c["horizon"].get<int>() < 1)
        throw ConfigError(p + "/horizon", "must be a positive integer");
      mc.horizon = c["horizon"].get<int>();
    }
    if (c.contains("relin_period_s")) mc.relin_period = num(c, "relin_period_s", p);
    const Vec2 qd = vec_field<2>(c, "Q", p, mc.weights.Q.diagonal());
    const Vec3 rd = vec_field<3>(c, "R", p, mc.weights.R.diagonal());
    if ((qd.array() <= 0).any()) throw ConfigError(p + "/Q", "weights must be positive");
    if ((rd.array() <= 0).any()) throw ConfigError(p + "/R", "weights must be positive");
    mc.weights.Q = qd.asDiagonal();
    mc.weights.R = rd.asDiagonal();
    mc.bounds.u_min = vec_field<3>(c, "u_min", p, mc.bounds.u_min);
    mc.bounds.u_max = vec_field<3>(c, "u_max", p, mc.bounds.u_max);
    mc.bounds.du_max = vec_field<3>(c, "du_max", p, mc.bounds.du_max);
    if ((mc.bounds.u_min.array() > mc.bounds.u_max.array()).any()) throw ConfigError(p + "/u_min", "exceeds u_max");
    if ((mc.bounds.du_max.array() <= 0).any()) throw ConfigError(p + "/du_max", "must be positive");
    if (c.contains("integrator")) {
      const std::string f = c["integrator"].is_string() ? c["integrator"].get<std::string>() : "";
      if (f == "accumulate")
        mc.form = IntegratorForm::kAccumulate;
      else if (f == "literal")
        mc.form = IntegratorForm::kLiteral;
      else
        throw ConfigError(p + "/integrator", "must be \"accumulate\" or \"literal\"");
    }
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(path, "cannot open scenario file");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string scenario_path(const std::string& s) {
  if (std::filesystem::exists(s)) return s;
  const std::string canned = data_dir() + "/scenarios/" + s + ".json";
  if (std::filesystem::exists(canned)) return canned;
  throw ConfigError(s, "no such scenario file or canned scenario");
}

const MetricRecord* MetricsReport::find(double t0, const std::string& var) const {
  for (const auto& r : records)
    if (r.variable == var && std::abs(r.t0 - t0) < 1e-9) return &r;
  return nullptr;
}

std::vector<double> window_rmse(const std::vector<double>& t, const std::vector<double>& a,
                                const std::vector<double>& b, double window, double t_end) {
  const int nw = std::max(1, static_cast<int>(std::ceil(t_end / window - 1e-9)));
  std::vector<double> ss(nw, 0.0);
  std::vector<int> cnt(nw, 0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    int w = static_cast<int>(std::floor(t[k] / window + 1e-9));
    w = std::clamp(w, 0, nw - 1);
    const double e = b[k] - a[k];
    ss[w] += e * e;
    ++cnt[w];
  }
  for (int w = 0; w < nw; ++w) ss[w] = cnt[w] ? std::sqrt(ss[w] / cnt[w]) : 0.0;
  return ss;
}

Vec6 deviation_ranges(const Trajectory& c1, const Trajectory& c2) {
  Vec6 hi = Vec6::Constant(-1e300), lo = Vec6::Constant(1e300);
  for (const Trajectory* tr : {&c1, &c2}) {
    for (const Vec6& x : tr->x) {
      const Vec6 dev = x - tr->x.front();
      hi = hi.cwiseMax(dev);
      lo = lo.cwiseMin(dev);
    }
  }
  return hi - lo;
}

MetricsReport state_metrics(const Trajectory& nl, const Trajectory& lin, const Vec6& ranges, double window) {
  if (nl.size() != lin.size()) throw std::runtime_error("state_metrics: trajectories differ in length");
  MetricsReport rep;
  const char* types[3] = {"temperature", "pressure", "weight_fraction"};
  double norm[3];
  for (int k = 0; k < 3; ++k) {
    norm[k] = std::max(ranges[2 * k], ranges[2 * k + 1]);
    rep.ranges[types[k]] = norm[k];
  }
  const double t_end = nl.t.back();
  std::vector<std::vector<double>> rm(6);
  for (int i = 0; i < 6; ++i) {
    std::vector<double> a(nl.size()), b(nl.size());
    for (std::size_t k = 0; k < nl.size(); ++k) {
      a[k] = nl.x[k][i];
      b[k] = lin.x[k][i];
    }
    rm[i] = window_rmse(nl.t, a, b, window, t_end);
  }
  for (std::size_t w = 0; w < rm[0].size(); ++w) {
    for (int i = 0; i < 6; ++i) {
      MetricRecord r;
      r.t0 = w * window;
      r.t1 = std::min(t_end, (w + 1) * window);
      r.variable = kStateCols[i];
      r.rmse = rm[i][w];
      r.nrmse = norm[i / 2] > 0 ? r.rmse / norm[i / 2] : 0.0;
      rep.records.push_back(r);
    }
  }
  return rep;
}

ComparisonResult run_open_loop_comparison(const Scenario& sc, const PlantParams& p) {
  PlantConfig cfg{p, sc.mode};
  ComparisonResult res;
  res.nonlinear = simulate(plant_model(cfg), sc.x0, sc.schedule, sc.duration);
  const Segment& s0 = sc.schedule.front();
  res.model = linearize(cfg, sc.x0, s0.u, s0.d);
  res.linear = simulate(linear_model(res.model), sc.x0, sc.schedule, sc.duration);
  return res;
}

ValidationResult run_validation(const Scenario& a, const Scenario& b, const PlantParams& p) {
  ValidationResult v;
  v.case1 = run_open_loop_comparison(a, p);
  v.case2 = run_open_loop_comparison(b, p);
  v.ranges = deviation_ranges(v.case1.nonlinear, v.case2.nonlinear);
  v.metrics1 = state_metrics(v.case1.nonlinear, v.case1.linear, v.ranges, 300.0);
  v.metrics2 = state_metrics(v.case2.nonlinear, v.case2.linear, v.ranges, 300.0);
  return v;
}

RelinResult run_relin_study(const Scenario& sc, const PlantParams& p, double window) {
  PlantConfig cfg{p, sc.mode};
  RelinResult res;
  res.nonlinear = simulate(plant_model(cfg), sc.x0, sc.schedule, sc.duration);
  const Trajectory& nl = res.nonlinear;
  Vec2 hi = Vec2::Constant(-1e300), lo = Vec2::Constant(1e300);
  for (const Vec2& q : nl.Q) {
    hi = hi.cwiseMax(q - nl.Q.front());
    lo = lo.cwiseMin(q - nl.Q.front());
  }
  const double qnorm = (hi - lo).maxCoeff();
  res.metrics.ranges["heat_rate"] = qnorm;

  for (double period : sc.relin_periods) {
    RelinVariant v;
    v.period = period;
    Vec6 x = sc.x0;
    double T = 0;
    while (T < sc.duration - 1e-9) {
      const double T1 = period > 0 ? std::min(sc.duration, T + period) : sc.duration;
      const Segment& s = segment_at(sc.schedule, T);
      // Re-linearize at the plant's operating point; the linear state carries on.
      const Vec6 xop = T == 0 ? sc.x0 : nl.x[index_at(nl, T)];
      const LinearModel lm = linearize(cfg, xop, s.u, s.d);
      const Trajectory part = simulate(linear_model(lm), x, shifted(sc.schedule, T, T1), T1 - T);
      for (std::size_t k = 0; k < part.size(); ++k) {
        if (k == 0 && !v.linear.t.empty()) continue;
        v.linear.push(part.t[k] + T, part.x[k], part.u[k], part.d[k], part.Q[k], part.r[k]);
      }
      x = part.x.back();
      T = T1;
    }
    const std::string tag = period > 0 ? "every_" + std::to_string(static_cast<long>(period)) + "s" : "never";
    std::vector<std::vector<double>> rm(2);
    for (int i = 0; i < 2; ++i) {
      std::vector<double> a(nl.size()), b(nl.size());
      for (std::size_t k = 0; k < nl.size(); ++k) {
        a[k] = nl.Q[k][i];
        b[k] = v.linear.Q[k][i];
      }
      rm[i] = window_rmse(nl.t, a, b, window, sc.duration);
    }
    for (std::size_t w = 0; w < rm[0].size(); ++w) {
      v.rmse.emplace_back(rm[0][w], rm[1][w]);
      for (int i = 0; i < 2; ++i) {
        MetricRecord r;
        r.t0 = w * window;
        r.t1 = std::min(sc.duration, (w + 1) * window);
        r.variable = std::string(i == 0 ? "Q_A" : "Q_B") + ":" + tag;
        r.rmse = rm[i][w];
        r.nrmse = qnorm > 0 ? r.rmse / qnorm : 0.0;
        res.metrics.records.push_back(r);
      }
    }
    res.variants.push_back(std::move(v));
  }
  return res;
}

ClosedLoopResult run_closed_loop(const Scenario& sc, const PlantParams& p, double settle_tol) {
  PlantConfig cfg{p, sc.mode};
  ClosedLoopResult res;
  MPCConfig mc = sc.controller;
  mc.Ts = 1.0 / sc.control_rate;
  const Segment& s0 = sc.schedule.front();
  Controller ctl(cfg, mc, sc.x0, s0.u, s0.d);
  Model plant = plant_model(cfg);
  Stepper st(plant);
  Vec6 x = sc.x0;
  const long steps = static_cast<long>(std::llround(sc.duration / mc.Ts));
  auto ref_at = [&](double t) {
    std::size_t k = 0;
    while (k + 1 < sc.references.size() && sc.references[k + 1].t <= t + 1e-9) ++k;
    return sc.references[k].r;
  };
  Vec2 r_prev = ref_at(0);
  Vec3 u = s0.u;
  for (long k = 0; k <= steps; ++k) {
    const double t = k * mc.Ts;
    const Segment& seg = segment_at(sc.schedule, t + 1e-9);
    const Vec2 r = ref_at(t);
    bool relin = false;
    if (k > 0 && k < steps) relin = ctl.maybe_relinearize(t, x, seg.d, (r - r_prev).norm() > 0);
    if (k < steps) u = ctl.step(t, x, r, seg.d);
    const Vec2 q = heat_outputs(x, u, seg.d, cfg);
    res.plant.push(t, x, u, seg.d, q, reaction_rates(x, cfg));
    res.log.push_back({t, r, ctl.integral_state(), ctl.last_info().qp_iterations, relin,
                       ctl.last_info().solver_failed});
    r_prev = r;
    if (k == steps) break;
    st.set_inputs(u, seg.d);
    st.restart();
    try {
      st.advance(x, t, t + mc.Ts);
    } catch (const IntegrationError&) {
      throw;
    }
  }

  // Settling after each reference change and each disturbance step.
  std::vector<SettleEvent> ev;
  for (std::size_t k = 1; k < sc.references.size(); ++k) ev.push_back({sc.references[k].t, "reference", -1});
  for (std::size_t k = 1; k < sc.schedule.size(); ++k)
    if (sc.schedule[k].d != sc.schedule[k - 1].d) ev.push_back({sc.schedule[k].t, "disturbance", -1});
  std::sort(ev.begin(), ev.end(), [](const SettleEvent& a, const SettleEvent& b) { return a.t_event < b.t_event; });
  const auto& tr = res.plant;
  for (std::size_t e = 0; e < ev.size(); ++e) {
    const double t_end = e + 1 < ev.size() ? ev[e + 1].t_event : sc.duration + 1;
    double settled_at = -1;
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (tr.t[k] < ev[e].t_event - 1e-9 || tr.t[k] >= t_end - 1e-9) continue;
      const Vec2 r = res.log[k].r;
      const Vec2 err = tr.Q[k] - r;
      const bool ok = std::abs(err[0]) <= settle_tol * std::abs(r[0]) && std::abs(err[1]) <= settle_tol * std::abs(r[1]);
      if (ok && settled_at < 0) settled_at = tr.t[k];
      if (!ok) settled_at = -1;
    }
    ev[e].settle = settled_at < 0 ? -1 : settled_at - ev[e].t_event;
  }
  res.events = ev;

  // Tracking RMSE between consecutive events.
  std::vector<double> cuts{0.0};
  for (const auto& e : ev) cuts.push_back(e.t_event);
  cuts.push_back(sc.duration);
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    for (int i = 0; i < 2; ++i) {
      double ss = 0, rmag = 0;
      int n = 0;
      for (std::size_t k = 0; k < tr.size(); ++k) {
        const bool last = c + 2 == cuts.size();
        if (tr.t[k] < cuts[c] - 1e-9 || (last ? tr.t[k] > cuts[c + 1] + 1e-9 : tr.t[k] >= cuts[c + 1] - 1e-9)) continue;
        const double e = tr.Q[k][i] - res.log[k].r[i];
        ss += e * e;
        rmag += std::abs(res.log[k].r[i]);
        ++n;
      }
      if (!n) continue;
      MetricRecord r;
      r.t0 = cuts[c];
      r.t1 = cuts[c + 1];
      r.variable = i == 0 ? "Q_A" : "Q_B";
      r.rmse = std::sqrt(ss / n);
      r.nrmse = rmag > 0 ? r.rmse / (rmag / n) : 0.0;
      res.metrics.records.push_back(r);
    }
  }
  for (const auto& e : ev) {
    res.metrics.notes.push_back(e.cause + " change at t=" + fmt(e.t_event) + " s: " +
                                (e.settle >= 0 ? "within " + fmt(settle_tol * 100) + "% after " + fmt(e.settle) + " s"
                                               : std::string("did not settle")));
  }
  return res;
}

Trajectory run_simulation(const Scenario& sc, const PlantParams& p) {
  PlantConfig cfg{p, sc.mode};
  return simulate(plant_model(cfg), sc.x0, sc.schedule, sc.duration);
}

void write_metrics_csv(const std::string& path, const MetricsReport& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "window_start_s,window_end_s,variable,rmse,nrmse\n";
  for (const auto& r : m.records)
    os << fmt(r.t0) << ',' << fmt(r.t1) << ',' << r.variable << ',' << fmt(r.rmse) << ',' << fmt(r.nrmse) << '\n';
}

void write_metrics_text(std::ostream& os, const MetricsReport& m, const std::string& title) {
  os << title << '\n';
  for (const auto& [k, v] : m.ranges) os << "  normalization " << k << ": " << fmt(v) << '\n';
  // Group by window; display units follow the usual table convention.
  std::vector<double> starts;
  for (const auto& r : m.records)
    if (std::find(starts.begin(), starts.end(), r.t0) == starts.end()) starts.push_back(r.t0);
  std::vector<std::string> vars;
  for (const auto& r : m.records)
    if (std::find(vars.begin(), vars.end(), r.variable) == vars.end()) vars.push_back(r.variable);
  auto unit = [](const std::string& v, double x) {
    if (v.rfind("T_", 0) == 0) return x;            // K == degC difference
    if (v.rfind("P_", 0) == 0) return x / 1e3;      // kPa
    if (v.rfind("w_", 0) == 0) return x * 1e3;      // g H / kg M
    if (v.rfind("Q_", 0) == 0) return x / 1e3;      // kW
    return x;
  };
  for (const char* what : {"RMSE", "NRMSE %"}) {
    os << "  " << what << '\n' << "  " << std::setw(12) << "t (min)";
    for (const auto& v : vars) os << std::setw(22) << v;
    os << '\n';
    for (double s : starts) {
      const MetricRecord* any = nullptr;
      for (const auto& r : m.records)
        if (r.t0 == s) any = &r;
      std::ostringstream lab;
      lab << s / 60 << "-" << any->t1 / 60;
      os << "  " << std::setw(12) << lab.str();
      for (const auto& v : vars) {
        const MetricRecord* r = m.find(s, v);
        std::ostringstream cell;
        if (r) cell << std::setprecision(4) << (what[0] == 'R' ? unit(v, r->rmse) : 100 * r->nrmse);
        os << std::setw(22) << cell.str();
      }
      os << '\n';
    }
  }
  for (const auto& n : m.notes) os << "  " << n << '\n';
}

void write_metrics_json(std::ostream& os, const MetricsReport& m, const std::string& title) {
  json j;
  j["title"] = title;
  j["normalization"] = json::object();
  for (const auto& [k, v] : m.ranges) j["normalization"][k] = v;
  j["records"] = json::array();
  for (const auto& r : m.records)
    j["records"].push_back({{"window_start_s", r.t0}, {"window_end_s", r.t1}, {"variable", r.variable},
                            {"rmse", r.rmse}, {"nrmse", r.nrmse}});
  j["notes"] = m.notes;
  os << j.dump(2) << '\n';
}

void write_control_log(const std::string& path, const ClosedLoopResult& r) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "t,Q_ref_A,Q_ref_B,x_i_m,x_i_n,qp_iterations,relinearized,solver_failed\n";
  for (const auto& l : r.log)
    os << fmt(l.t) << ',' << fmt(l.r[0]) << ',' << fmt(l.r[1]) << ',' << fmt(l.xi[0]) << ',' << fmt(l.xi[1]) << ','
       << l.qp_iterations << ',' << (l.relinearized ? 1 : 0) << ',' << (l.solver_failed ? 1 : 0) << '\n';
}

}  // namespace mh
