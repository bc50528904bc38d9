#pragma once

#include <stdexcept>
#include <string>

namespace mh {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kAtm = 101325.0;      // Pa
inline constexpr double kRMolar = 8.314;      // J/(mol K)

/// Raised for arguments outside a function's physical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Direction { kAbsorb, kDesorb };

/// Thermodynamic and kinetic constants of one alloy.
///
/// Enthalpies of reaction dH_abs/dH_des are magnitudes per kg of hydrogen;
/// absorption releases dH_abs into the bed. dH0/dS0 are the signed molar
/// formation values used by the chemical potential (negative for an
/// exothermic hydride).
struct HydrideMaterial {
  std::string name;
  double density = 0;        // kg/m^3
  double specific_heat = 0;  // J/(kg K)
  double dH_abs = 0;         // J/kg-H
  double dH_des = 0;         // J/kg-H
  double w_max = 0;          // kg-H/kg-M
  double C_A = 0;            // 1/s
  double E_A = 0;            // J/mol-H
  double dH0_abs = 0;        // J/mol-H
  double dH0_des = 0;
  double dS0_abs = 0;        // J/(mol-H K)
  double dS0_des = 0;
  double mu_alpha0 = 0;      // J/mol-H
  double mu_beta0 = 0;
  double w_alpha0 = 0;
  double w_beta0 = 0;
  double T_c = 0;            // K
  double A_phase = 0;        // J/mol-H
  double porosity = 0;

  void validate() const;
};

struct FluidProperties {
  double specific_heat = 0;         // J/(kg K)
  double thermal_conductivity = 0;  // W/(m K)
  double viscosity = 0;             // Pa s
  double prandtl = 0;

  void validate() const;
};

struct HydrogenGas {
  double R_H = 4124.0;   // J/(kg K)
  double cp_H = 14300.0; // J/(kg K)

  void validate() const;
};

/// One reactor. Derived members describe a single control volume
/// (one tube and the shell around it).
struct ReactorGeometry {
  double tube_diameter = 0;   // m
  double shell_diameter = 0;  // m
  int n_tubes = 0;
  double length = 0;          // m

  double shell_volume = 0;    // m^3 per control volume
  double surface_area = 0;    // m^2
  double tube_cross_section = 0;
  double hydride_mass = 0;    // kg

  /// Recomputes the derived members; porosity and density from `mat`.
  void derive(const HydrideMaterial& mat);
  void validate() const;
};

struct HydrogenLine {
  double cross_section = 0;  // m^2
  double loss_coefficient = 0;
  double regularization_pressure = 10.0;  // Pa

  void validate() const;
};

double chemical_potential(double w, double T, const HydrideMaterial& mat, Direction dir);
double equilibrium_pressure(double w, double T, const HydrideMaterial& mat, Direction dir);

/// Net rate dw/dt; positive while absorbing.
double reaction_rate(double T, double P, double w, const HydrideMaterial& mat);

/// Dittus-Boelter exponent: 0.4 when the fluid is heated, 0.3 otherwise.
inline double prandtl_exponent(double T_hyd, double T_wg_in) {
  return T_hyd > T_wg_in ? 0.4 : 0.3;
}

double heat_transfer_coefficient(double mdot_per_tube, const ReactorGeometry& geom,
                                 const FluidProperties& fluid, double prandtl_exp);

double effectiveness(double mdot_per_tube, const ReactorGeometry& geom,
                     const FluidProperties& fluid, double prandtl_exp);

struct HeatExchange {
  double Q;        // W, positive when the hydride heats the fluid
  double T_out;    // K
  double epsilon;
};

/// Whole-reactor heat rate for a total fluid flow split evenly over the tubes.
HeatExchange heat_rate(double T_hyd, double T_wg_in, double mdot_total,
                       const ReactorGeometry& geom, const FluidProperties& fluid);

/// Signed square-root flow law, regularized by an odd cubic inside
/// |delta| < line.regularization_pressure.
double line_flow(double delta, double rho, const HydrogenLine& line);

enum class Mode { kBtoA, kAtoB };

/// Hydrogen mass flow into reactor A. Density comes from the source
/// reactor of the mode; the flow into B is the negative of this.
double hydrogen_line_flow(double P_A, double P_B, double dP_comp, Mode mode,
                          double T_A, double T_B, const HydrogenGas& gas,
                          const HydrogenLine& line);

}  // namespace mh
