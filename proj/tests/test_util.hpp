#pragma once

#include <cmath>

#include "mh/params.hpp"
#include "mh/plant.hpp"

namespace mh::test {

inline const PlantParams& shipped() {
  static const PlantParams p = load_params(default_params_path());
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Both beds mid-plateau inside their dead zones, zero line drive and
/// inlet temperatures equal to the beds: every derivative is exactly zero.
struct Equilibrium {
  PlantConfig cfg;
  Vec6 x;
  Vec3 u;
  Vec2 d;
};

inline Equilibrium equilibrium_point(const PlantParams& p) {
  Equilibrium e;
  e.cfg.params = p;
  const double T[2] = {290.0, 310.0};
  double P[2];
  for (int r = 0; r < 2; ++r) {
    const auto& mat = p.material[r];
    const double w = 0.5 * mat.w_max;
    const double pa = equilibrium_pressure(w, T[r], mat, Direction::kAbsorb);
    const double pd = equilibrium_pressure(w, T[r], mat, Direction::kDesorb);
    // Integer pascals keep the line balance exact in floating point.
    P[r] = std::round(std::sqrt(pa * pd));
    e.x[kTA + r] = T[r];
    e.x[kPA + r] = P[r];
    e.x[kWA + r] = w;
    e.d[r] = T[r];
  }
  const bool b_to_a = P[1] <= P[0];
  e.cfg.mode = b_to_a ? Mode::kBtoA : Mode::kAtoB;
  e.u << 0.2, 0.2, b_to_a ? P[0] - P[1] : P[1] - P[0];
  return e;
}

}  // namespace mh::test
