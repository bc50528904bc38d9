#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "mh/linearize.hpp"
#include "mh/qp.hpp"

namespace mh {

/// Reorders plant-order quantities into absorbing (m) / desorbing (n) order:
/// states [T_m, P_m, w_m, T_n, P_n, w_n], inputs [mdot_m, mdot_n, dP],
/// disturbances and outputs [m, n].
struct ModePermutation {
  Eigen::Matrix<double, 6, 6> Px;
  Eigen::Matrix<double, 3, 3> Pu;
  Eigen::Matrix<double, 2, 2> Py;  // also used for disturbances

  explicit ModePermutation(Mode mode);
};

struct MPCWeights {
  Eigen::Matrix2d Q = Eigen::Vector2d(100.0, 100.0).asDiagonal();
  Eigen::Matrix3d R = Eigen::Vector3d(3e11, 3e11, 1.0).asDiagonal();
};

struct InputBounds {
  Vec3 u_min = Vec3(0.0, 0.0, 0.0);
  Vec3 u_max = Vec3(0.8, 0.8, 500e3);
  Vec3 du_max = Vec3(0.05, 0.05, 10e3);
};

/// How the tracking-error state evolves: kAccumulate gives
/// x_i(k+1) = x_i(k) + y(k) - r(k); kLiteral drops the x_i(k) term.
enum class IntegratorForm { kAccumulate, kLiteral };

/// Augmented prediction model in m/n coordinates with deviation variables:
/// xt(k+1) = At xt(k) + Bt du(k) + Btd [dd; r] + ct,   yt = Ct xt.
struct AugmentedModel {
  Eigen::Matrix<double, 8, 8> At;
  Eigen::Matrix<double, 8, 3> Bt;
  Eigen::Matrix<double, 8, 4> Btd;
  Eigen::Matrix<double, 2, 8> Ct;
  Eigen::Matrix<double, 8, 1> ct;  // affine residual terms [drift; g0]
  DiscreteModel dm;                // in m/n coordinates
};

/// `dm` must already be in m/n coordinates (see permute()).
AugmentedModel augment(const DiscreteModel& dm, IntegratorForm form = IntegratorForm::kAccumulate);

DiscreteModel permute(const DiscreteModel& dm, const ModePermutation& P);

/// Condensed horizon QP over input deviations du(0..N-1) from u0 (m/n order).
/// Rate limits also bind the first move against u_prev.
QPProblem build_qp(const AugmentedModel& am, const Eigen::Matrix<double, 8, 1>& xt_now,
                   const Eigen::Vector4d& dist_ref, const MPCWeights& w, const InputBounds& b,
                   const Vec3& u_prev, int N);

struct MPCConfig {
  MPCWeights weights;
  InputBounds bounds;  // plant A/B order
  int horizon = 20;
  double Ts = 1.0;
  double relin_period = 1800.0;  // s; <= 0 disables periodic re-linearization
  IntegratorForm form = IntegratorForm::kAccumulate;
  int max_failures = 5;
};

struct MPCStepInfo {
  int qp_iterations = 0;
  bool relinearized = false;
  bool solver_failed = false;
};

class ControllerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integral-augmented MPC acting on the nonlinear plant through successive
/// linearizations.
class Controller {
 public:
  Controller(PlantConfig cfg, MPCConfig mc, const Vec6& x, const Vec3& u, const Vec2& d);

  /// Re-linearizes at (x, u_prev, d) when the period has elapsed or `forced`.
  bool maybe_relinearize(double t, const Vec6& x, const Vec2& d, bool forced);

  /// One control update. `r` is the heat-rate reference in plant A/B order.
  Vec3 step(double t, const Vec6& x, const Vec2& r, const Vec2& d);

  const Vec2& integral_state() const { return xi_; }  // m/n order
  const Vec3& previous_input() const { return u_prev_; }
  const LinearModel& linear_model() const { return lm_; }
  const AugmentedModel& augmented() const { return am_; }
  const MPCStepInfo& last_info() const { return info_; }
  const MPCConfig& config() const { return mc_; }

 private:
  void rebuild(const Vec6& x, const Vec3& u, const Vec2& d);

  PlantConfig cfg_;
  MPCConfig mc_;
  ModePermutation perm_;
  LinearModel lm_;
  AugmentedModel am_;
  Vec2 xi_ = Vec2::Zero();
  Vec3 u_prev_;
  double last_relin_ = 0;
  int failures_ = 0;
  // Previous sample for the tracking-error recursion.
  std::optional<Vec6> x_last_;
  Vec2 d_last_ = Vec2::Zero();
  Vec2 r_last_ = Vec2::Zero();
  MPCStepInfo info_;
  // Last optimal sequence (m/n deviations) and its u0, for warm starts.
  Eigen::VectorXd z_prev_;
  Vec3 u0_prev_ = Vec3::Zero();
};

/// Clamps u into the box and into [u_prev - du, u_prev + du].
Vec3 clamp_input(const Vec3& u, const Vec3& u_prev, const InputBounds& b);

}  // namespace mh
