#include "mh/hydride.hpp"

#include <cmath>

namespace mh {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

}  // namespace

void HydrideMaterial::validate() const {
  require(w_alpha0 > 0 && w_alpha0 < w_beta0 && w_beta0 < w_max,
          name + ": phase boundaries must satisfy 0 < w_alpha0 < w_beta0 < w_max");
  require(porosity > 0 && porosity < 1, name + ": porosity must lie in (0,1)");
  require(density > 0 && specific_heat > 0 && C_A > 0 && E_A > 0 && T_c > 0,
          name + ": density, specific_heat, C_A, E_A, T_c must be positive");
  require(dH_abs > 0 && dH_des > 0, name + ": dH_abs and dH_des are positive magnitudes");
}

void FluidProperties::validate() const {
  require(specific_heat > 0 && thermal_conductivity > 0 && viscosity > 0 && prandtl > 0,
          "fluid: all properties must be positive");
  double pr = specific_heat * viscosity / thermal_conductivity;
  require(std::abs(pr - prandtl) <= 1e-9 * pr, "fluid: prandtl inconsistent with c*mu/k");
}

void HydrogenGas::validate() const {
  require(R_H > 0 && cp_H > 0, "hydrogen: R_H and cp_H must be positive");
}

void ReactorGeometry::derive(const HydrideMaterial& mat) {
  shell_volume = kPi / 4.0 * (shell_diameter * shell_diameter - tube_diameter * tube_diameter) * length;
  surface_area = kPi * tube_diameter * length;
  tube_cross_section = kPi / 4.0 * tube_diameter * tube_diameter;
  hydride_mass = (1.0 - mat.porosity) * shell_volume * mat.density;
}

void ReactorGeometry::validate() const {
  require(shell_diameter > tube_diameter && tube_diameter > 0, "geometry: shell must exceed tube");
  require(n_tubes > 0 && length > 0, "geometry: n_tubes and length must be positive");
}

void HydrogenLine::validate() const {
  require(cross_section > 0 && loss_coefficient > 0, "line: cross_section and K_loss must be positive");
  require(regularization_pressure > 0, "line: regularization_pressure must be positive");
}

double chemical_potential(double w, double T, const HydrideMaterial& mat, Direction dir) {
  if (!(w > 0 && w < mat.w_max)) throw DomainError("chemical_potential: w outside (0, w_max)");
  if (!(T > 0)) throw DomainError("chemical_potential: non-positive temperature");
  const double x = w / mat.w_max;
  if (w < mat.w_alpha0 || w > mat.w_beta0) {
    const double mu0 = w < mat.w_alpha0 ? mat.mu_alpha0 : mat.mu_beta0;
    return mu0 + 2.0 * kRMolar * mat.T_c * (1.0 - 2.0 * x) +
           kRMolar * T * std::log(w / (mat.w_max - w));
  }
  const bool abs = dir == Direction::kAbsorb;
  const double dH = abs ? mat.dH0_abs : mat.dH0_des;
  const double dS = abs ? mat.dS0_abs : mat.dS0_des;
  return dH - T * dS + mat.A_phase * (x - 0.5);
}

double equilibrium_pressure(double w, double T, const HydrideMaterial& mat, Direction dir) {
  return kAtm * std::exp(chemical_potential(w, T, mat, dir) / (kRMolar * T));
}

double reaction_rate(double T, double P, double w, const HydrideMaterial& mat) {
  if (!(T > 0) || !(P > 0)) throw DomainError("reaction_rate: non-positive T or P");
  if (w < 0 || w > mat.w_max) throw DomainError("reaction_rate: w outside [0, w_max]");
  const double k = mat.C_A * std::exp(-mat.E_A / (kRMolar * T));
  // At the capacity limits the branch factor is zero, so the log never needs
  // the (undefined) potential there.
  if (w < mat.w_max) {
    const double pa = equilibrium_pressure(w > 0 ? w : mat.w_max * 1e-12, T, mat, Direction::kAbsorb);
    if (P > pa) return k * std::log(P / pa) * (mat.w_max - w);
  }
  if (w > 0) {
    const double wd = w < mat.w_max ? w : mat.w_max * (1 - 1e-12);
    const double pd = equilibrium_pressure(wd, T, mat, Direction::kDesorb);
    if (P < pd) return k * std::log(P / pd) * w;
  }
  return 0.0;
}

double heat_transfer_coefficient(double mdot_per_tube, const ReactorGeometry& geom,
                                 const FluidProperties& fluid, double prandtl_exp) {
  const double re = 4.0 * mdot_per_tube / (kPi * geom.tube_diameter * fluid.viscosity);
  const double nu = 0.023 * std::pow(re, 0.8) * std::pow(fluid.prandtl, prandtl_exp);
  return nu * fluid.thermal_conductivity / geom.tube_diameter;
}

double effectiveness(double mdot_per_tube, const ReactorGeometry& geom,
                     const FluidProperties& fluid, double prandtl_exp) {
  if (mdot_per_tube < 0) throw DomainError("effectiveness: negative flow");
  if (mdot_per_tube == 0) return 1.0;
  const double h = heat_transfer_coefficient(mdot_per_tube, geom, fluid, prandtl_exp);
  return 1.0 - std::exp(-h * geom.surface_area / (mdot_per_tube * fluid.specific_heat));
}

HeatExchange heat_rate(double T_hyd, double T_wg_in, double mdot_total,
                       const ReactorGeometry& geom, const FluidProperties& fluid) {
  if (mdot_total < 0) throw DomainError("heat_rate: negative flow");
  const double eps = effectiveness(mdot_total / geom.n_tubes, geom, fluid,
                                   prandtl_exponent(T_hyd, T_wg_in));
  const double dT = T_hyd - T_wg_in;
  return {eps * mdot_total * fluid.specific_heat * dT, T_wg_in + eps * dT, eps};
}

double line_flow(double delta, double rho, const HydrogenLine& line) {
  const double reg = line.regularization_pressure;
  const double a = std::abs(delta);
  auto law = [&](double d) {
    return line.cross_section * std::sqrt(2.0 * rho * d / line.loss_coefficient);
  };
  double m;
  if (a >= reg) {
    m = law(a);
  } else {
    // Odd cubic through the origin matching value and slope of law() at reg.
    const double s = a / reg;
    m = law(reg) * (1.25 * s - 0.25 * s * s * s);
  }
  return delta < 0 ? -m : m;
}

double hydrogen_line_flow(double P_A, double P_B, double dP_comp, Mode mode,
                          double T_A, double T_B, const HydrogenGas& gas,
                          const HydrogenLine& line) {
  if (!(P_A > 0 && P_B > 0)) throw DomainError("hydrogen_line_flow: non-positive pressure");
  if (mode == Mode::kBtoA) {
    const double rho = P_B / (gas.R_H * T_B);
    return line_flow(P_B + dP_comp - P_A, rho, line);
  }
  const double rho = P_A / (gas.R_H * T_A);
  return -line_flow(P_A + dP_comp - P_B, rho, line);
}

}  // namespace mh
