#include "mh/plant.hpp"

#include <cmath>

namespace mh {

namespace {

const char* kStateNames[6] = {"T_hyd_A", "T_hyd_B", "P_H_A", "P_H_B", "w_A", "w_B"};

}  // namespace

void PlantParams::validate() const {
  for (int i = 0; i < 2; ++i) {
    material[i].validate();
    geometry[i].validate();
  }
  fluid.validate();
  gas.validate();
  line.validate();
}

void check_state(const Vec6& x, const PlantConfig& cfg) {
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(x[i])) throw DomainError(std::string("state component ") + kStateNames[i] + " is not finite");
  }
  for (int i = 0; i < 4; ++i) {
    if (!(x[i] > 0)) throw DomainError(std::string("state component ") + kStateNames[i] + " must be positive");
  }
  for (int r = 0; r < 2; ++r) {
    const double w = x[kWA + r];
    if (w < 0 || w > cfg.params.material[r].w_max)
      throw DomainError(std::string("state component ") + kStateNames[kWA + r] + " outside [0, w_max]");
  }
}

double driving_pressure(const Vec6& x, double dP_comp, Mode mode) {
  return mode == Mode::kBtoA ? x[kPB] + dP_comp - x[kPA] : x[kPA] + dP_comp - x[kPB];
}

double line_flow_into_A(const Vec6& x, const Vec3& u, const PlantConfig& cfg) {
  const auto& p = cfg.params;
  return hydrogen_line_flow(x[kPA], x[kPB], u[2], cfg.mode, x[kTA], x[kTB], p.gas, p.line);
}

Vec6 state_derivative(const Vec6& x, const Vec3& u, const Vec2& d, const PlantConfig& cfg) {
  check_state(x, cfg);
  const auto& p = cfg.params;
  const double into_A = line_flow_into_A(x, u, cfg);
  Vec6 dx;
  for (int r = 0; r < 2; ++r) {
    const HydrideMaterial& mat = p.material[r];
    const ReactorGeometry& g = p.geometry[r];
    const double T = x[kTA + r], P = x[kPA + r], w = x[kWA + r];
    const double T_other = x[kTA + 1 - r];
    const double m_in = (r == 0 ? into_A : -into_A) / g.n_tubes;  // per control volume

    const double rate = reaction_rate(T, P, w, mat);
    const double V_H = mat.porosity * g.shell_volume;
    const double m_H = P * V_H / (p.gas.R_H * T);
    const double dH = rate > 0 ? mat.dH_abs : mat.dH_des;
    const double q = heat_rate(T, d[r], u[r], g, p.fluid).Q / g.n_tubes;
    // Gas enters at the upstream bed temperature; outflow carries no extra term.
    const double adv = m_in > 0 ? m_in * p.gas.cp_H * (T_other - T) : 0.0;

    const double dT = (rate * g.hydride_mass * dH - q + adv) /
                      (g.hydride_mass * mat.specific_heat + m_H * p.gas.cp_H);
    const double dm = -rate * g.hydride_mass + m_in;
    dx[kTA + r] = dT;
    dx[kPA + r] = p.gas.R_H * T / V_H * dm + P / T * dT;
    dx[kWA + r] = rate;
  }
  return dx;
}

Vec2 heat_outputs(const Vec6& x, const Vec3& u, const Vec2& d, const PlantConfig& cfg) {
  const auto& p = cfg.params;
  Vec2 y;
  for (int r = 0; r < 2; ++r) y[r] = heat_rate(x[kTA + r], d[r], u[r], p.geometry[r], p.fluid).Q;
  return y;
}

Vec2 reaction_rates(const Vec6& x, const PlantConfig& cfg) {
  Vec2 out;
  for (int r = 0; r < 2; ++r)
    out[r] = reaction_rate(x[kTA + r], x[kPA + r], x[kWA + r], cfg.params.material[r]);
  return out;
}

double hydrogen_inventory(const Vec6& x, const PlantConfig& cfg) {
  const auto& p = cfg.params;
  double total = 0;
  for (int r = 0; r < 2; ++r) {
    const auto& g = p.geometry[r];
    const double V_H = p.material[r].porosity * g.shell_volume;
    const double gas = x[kPA + r] * V_H / (p.gas.R_H * x[kTA + r]);
    total += g.n_tubes * (gas + x[kWA + r] * g.hydride_mass);
  }
  return total;
}

std::array<int, 2> reaction_branches(const Vec6& x, const PlantConfig& cfg) {
  std::array<int, 2> b{};
  for (int r = 0; r < 2; ++r) {
    const double rate = reaction_rate(x[kTA + r], x[kPA + r], x[kWA + r], cfg.params.material[r]);
    b[r] = rate > 0 ? 1 : (rate < 0 ? -1 : 0);
  }
  return b;
}

}  // namespace mh
