#include "mh/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mh {

const char* const kCsvHeader =
    "t,T_hyd_A,T_hyd_B,P_H_A,P_H_B,w_A,w_B,mdot_wg_A,mdot_wg_B,dP_comp,T_wg_in_A,T_wg_in_B,Q_A,Q_B,r_A,r_B";

const Segment& segment_at(const InputSchedule& s, double t) {
  if (s.empty()) throw std::invalid_argument("empty schedule");
  std::size_t k = 0;
  while (k + 1 < s.size() && s[k + 1].t <= t) ++k;
  return s[k];
}

Model plant_model(const PlantConfig& cfg) {
  Model m;
  m.f = [cfg](const Vec6& x, const Vec3& u, const Vec2& d) { return state_derivative(x, u, d, cfg); };
  m.g = [cfg](const Vec6& x, const Vec3& u, const Vec2& d) { return heat_outputs(x, u, d, cfg); };
  m.branch = [cfg](const Vec6& x) {
    auto b = reaction_branches(x, cfg);
    return static_cast<long>((b[0] + 1) * 3 + (b[1] + 1));
  };
  return m;
}

void Trajectory::push(double time, const Vec6& state, const Vec3& input, const Vec2& dist,
                      const Vec2& heat, const Vec2& rate) {
  t.push_back(time);
  x.push_back(state);
  u.push_back(input);
  d.push_back(dist);
  Q.push_back(heat);
  r.push_back(rate);
}

OdeOptions default_ode_options() {
  OdeOptions o;
  o.rtol = 1e-8;
  o.atol.resize(6);
  o.atol << 1e-8, 1e-8, 1e-4, 1e-4, 1e-13, 1e-13;
  o.h_init = 1e-3;
  return o;
}

Stepper::Stepper(Model m, OdeOptions opt)
    : m_(std::move(m)),
      ode_(
          [this](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return m_.f(Vec6(x), u_, d_);
          },
          std::move(opt),
          m_.branch ? Sdirk4::Branch([this](const Eigen::VectorXd& x) { return m_.branch(Vec6(x)); })
                    : Sdirk4::Branch()) {}

void Stepper::set_inputs(const Vec3& u, const Vec2& d) {
  u_ = u;
  d_ = d;
}

void Stepper::advance(Vec6& x, double t0, double t1) {
  Eigen::VectorXd v = x;
  ode_.advance(v, t0, t1);
  x = v;
}

namespace {

void record(Trajectory& tr, const Model& m, double t, const Vec6& x, const Segment& s) {
  const Vec6 dx = m.f(x, s.u, s.d);
  tr.push(t, x, s.u, s.d, m.g(x, s.u, s.d), dx.tail<2>());
}

}  // namespace

Trajectory simulate(const Model& m, const Vec6& x0, const InputSchedule& sched, double t_end,
                    double dt, const OdeOptions& opt) {
  if (sched.empty() || sched.front().t > 0) throw std::invalid_argument("schedule must start at t=0");
  Trajectory tr;
  Stepper st(m, opt);
  Vec6 x = x0;
  record(tr, m, 0.0, x, sched.front());
  for (std::size_t k = 0; k < sched.size(); ++k) {
    const double a = sched[k].t;
    const double b = k + 1 < sched.size() ? std::min(sched[k + 1].t, t_end) : t_end;
    if (b <= a) continue;
    st.set_inputs(sched[k].u, sched[k].d);
    st.restart();
    double t = a;
    long i = static_cast<long>(std::floor(a / dt + 1e-9)) + 1;
    while (t < b) {
      const double next = std::min(b, i * dt);
      ++i;
      if (next <= t) continue;
      st.advance(x, t, next);
      t = next;
      // At a breakpoint the sample reports the inputs taking effect there.
      const Segment& s = (t < t_end && k + 1 < sched.size() && t >= sched[k + 1].t) ? sched[k + 1] : sched[k];
      record(tr, m, t, x, s);
    }
  }
  return tr;
}

void write_csv(std::ostream& os, const Trajectory& tr) {
  os << kCsvHeader << '\n';
  char buf[32];
  auto put = [&](double v, bool last) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << (last ? '\n' : ',');
  };
  for (std::size_t k = 0; k < tr.size(); ++k) {
    put(tr.t[k], false);
    for (int i = 0; i < 6; ++i) put(tr.x[k][i], false);
    for (int i = 0; i < 3; ++i) put(tr.u[k][i], false);
    for (int i = 0; i < 2; ++i) put(tr.d[k][i], false);
    for (int i = 0; i < 2; ++i) put(tr.Q[k][i], false);
    put(tr.r[k][0], false);
    put(tr.r[k][1], true);
  }
}

void write_csv(const std::string& path, const Trajectory& tr) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_csv(os, tr);
}

Trajectory read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::getline(is, line);
  if (line != kCsvHeader) throw std::runtime_error(path + ": unexpected header");
  Trajectory tr;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[16];
    int n = 0;
    while (std::getline(ss, cell, ',') && n < 16) v[n++] = std::strtod(cell.c_str(), nullptr);
    if (n != 16) throw std::runtime_error(path + ": row with " + std::to_string(n) + " fields");
    tr.push(v[0], Vec6(v + 1), Vec3(v + 7), Vec2(v + 10), Vec2(v + 12), Vec2(v + 14));
  }
  return tr;
}

}  // namespace mh
