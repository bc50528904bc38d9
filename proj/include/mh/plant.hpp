#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "mh/hydride.hpp"

namespace mh {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec3 = Eigen::Matrix<double, 3, 1>;
using Vec2 = Eigen::Matrix<double, 2, 1>;

// State layout [T_A, T_B, P_A, P_B, w_A, w_B]; inputs [mdot_A, mdot_B, dP_comp];
// disturbances [T_wg_in_A, T_wg_in_B]; outputs [Q_A, Q_B].
enum StateIndex { kTA = 0, kTB = 1, kPA = 2, kPB = 3, kWA = 4, kWB = 5 };

struct PlantParams {
  std::array<HydrideMaterial, 2> material;  // [A, B]
  std::array<ReactorGeometry, 2> geometry;
  FluidProperties fluid;
  HydrogenGas gas;
  HydrogenLine line;

  void validate() const;
};

struct PlantConfig {
  PlantParams params;
  Mode mode = Mode::kBtoA;
};

/// Throws DomainError naming the first component outside its physical range.
void check_state(const Vec6& x, const PlantConfig& cfg);

Vec6 state_derivative(const Vec6& x, const Vec3& u, const Vec2& d, const PlantConfig& cfg);

/// Whole-reactor heat rates hydride -> fluid, W.
Vec2 heat_outputs(const Vec6& x, const Vec3& u, const Vec2& d, const PlantConfig& cfg);

Vec2 reaction_rates(const Vec6& x, const PlantConfig& cfg);

/// Flow into reactor A summed over the line, kg/s.
double line_flow_into_A(const Vec6& x, const Vec3& u, const PlantConfig& cfg);

/// Total hydrogen mass (gas plus absorbed) over all tubes of both reactors.
double hydrogen_inventory(const Vec6& x, const PlantConfig& cfg);

/// Reaction branch of each reactor: +1 absorbing, 0 dead zone, -1 desorbing.
std::array<int, 2> reaction_branches(const Vec6& x, const PlantConfig& cfg);

/// Driving pressure of the line in the mode's flow direction.
double driving_pressure(const Vec6& x, double dP_comp, Mode mode);

}  // namespace mh
