#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "mh/simulate.hpp"

namespace mh {

struct LinearModel {
  Eigen::Matrix<double, 6, 6> A;
  Eigen::Matrix<double, 6, 3> B;
  Eigen::Matrix<double, 6, 2> Bd;
  Eigen::Matrix<double, 2, 6> C;
  Eigen::Matrix<double, 2, 3> D;
  Eigen::Matrix<double, 2, 2> Dd;
  Vec6 x0;
  Vec3 u0;
  Vec2 d0;
  Vec6 f0;
  Vec2 g0;
  std::vector<std::string> warnings;

  Vec6 dx(const Vec6& x, const Vec3& u, const Vec2& d) const;
  Vec2 y(const Vec6& x, const Vec3& u, const Vec2& d) const;
};

struct StepPolicy {
  double rel = 1e-6;
  Vec6 x_floor = (Vec6() << 1e-4, 1e-4, 1e-1, 1e-1, 1e-9, 1e-9).finished();
  Vec3 u_floor = (Vec3() << 1e-6, 1e-6, 1e-2).finished();
  Vec2 d_floor = (Vec2() << 1e-4, 1e-4).finished();
  /// Multiplies every step; used by the Richardson check.
  double scale = 1.0;
};

/// Central-difference realization of any model about (x0, u0, d0).
LinearModel linearize(const Model& m, const Vec6& x0, const Vec3& u0, const Vec2& d0,
                      const StepPolicy& policy = {});

/// Plant linearization; attaches warnings when the point sits in the flow
/// regularization band or on a reaction-branch boundary.
LinearModel linearize(const PlantConfig& cfg, const Vec6& x0, const Vec3& u0, const Vec2& d0,
                      const StepPolicy& policy = {});

struct EvalResult {
  Vec6 dx;
  Vec2 y;
};
EvalResult eval_linear(const LinearModel& lm, const Vec6& x, const Vec3& u, const Vec2& d);

/// The affine model wrapped as a Model (no branch signature).
Model linear_model(const LinearModel& lm);

/// Zero-order-hold discretization of the affine model:
/// x+ - x0 = Ad (x - x0) + Bu (u - u0) + Bdist (d - d0) + drift,
/// where drift integrates the residual f0 over one sample.
struct DiscreteModel {
  Eigen::Matrix<double, 6, 6> Ad;
  Eigen::Matrix<double, 6, 3> Bu;
  Eigen::Matrix<double, 6, 2> Bdist;
  Vec6 drift;
  Eigen::Matrix<double, 2, 6> C;
  Eigen::Matrix<double, 2, 3> D;
  Eigen::Matrix<double, 2, 2> Dd;
  double Ts = 1.0;
  Vec6 x0;
  Vec3 u0;
  Vec2 d0;
  Vec6 f0;
  Vec2 g0;
};

/// exp(M) by scaling and squaring with a degree-13 Pade kernel.
Eigen::MatrixXd expm(const Eigen::MatrixXd& M);

DiscreteModel discretize(const LinearModel& lm, double Ts);

void write_linear_model(std::ostream& os, const LinearModel& lm);
void write_linear_model(const std::string& path, const LinearModel& lm);

}  // namespace mh
