#include "mh/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mh {

ModePermutation::ModePermutation(Mode mode) {
  Px.setZero();
  Pu.setZero();
  Py.setZero();
  const int m = mode == Mode::kBtoA ? 0 : 1;  // absorbing reactor index
  const int n = 1 - m;
  const int rows[6] = {kTA + m, kPA + m, kWA + m, kTA + n, kPA + n, kWA + n};
  for (int i = 0; i < 6; ++i) Px(i, rows[i]) = 1.0;
  Pu(0, m) = 1.0;
  Pu(1, n) = 1.0;
  Pu(2, 2) = 1.0;
  Py(0, m) = 1.0;
  Py(1, n) = 1.0;
}

DiscreteModel permute(const DiscreteModel& dm, const ModePermutation& P) {
  DiscreteModel o = dm;
  o.Ad = P.Px * dm.Ad * P.Px.transpose();
  o.Bu = P.Px * dm.Bu * P.Pu.transpose();
  o.Bdist = P.Px * dm.Bdist * P.Py.transpose();
  o.drift = P.Px * dm.drift;
  o.C = P.Py * dm.C * P.Px.transpose();
  o.D = P.Py * dm.D * P.Pu.transpose();
  o.Dd = P.Py * dm.Dd * P.Py.transpose();
  o.x0 = P.Px * dm.x0;
  o.u0 = P.Pu * dm.u0;
  o.d0 = P.Py * dm.d0;
  o.f0 = P.Px * dm.f0;
  o.g0 = P.Py * dm.g0;
  return o;
}

AugmentedModel augment(const DiscreteModel& dm, IntegratorForm form) {
  AugmentedModel am;
  am.dm = dm;
  am.At.setZero();
  am.At.topLeftCorner<6, 6>() = dm.Ad;
  am.At.bottomLeftCorner<2, 6>() = dm.C;
  if (form == IntegratorForm::kAccumulate) am.At.bottomRightCorner<2, 2>().setIdentity();
  am.Bt.topRows<6>() = dm.Bu;
  am.Bt.bottomRows<2>() = dm.D;
  am.Btd.setZero();
  am.Btd.topLeftCorner<6, 2>() = dm.Bdist;
  am.Btd.bottomLeftCorner<2, 2>() = dm.Dd;
  am.Btd.bottomRightCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  am.Ct.setZero();
  am.Ct.rightCols<2>().setIdentity();
  am.ct.head<6>() = dm.drift;
  am.ct.tail<2>() = dm.g0;
  return am;
}

QPProblem build_qp(const AugmentedModel& am, const Eigen::Matrix<double, 8, 1>& xt_now,
                   const Eigen::Vector4d& dist_ref, const MPCWeights& w, const InputBounds& b,
                   const Vec3& u_prev, int N) {
  if (N < 1) throw std::invalid_argument("build_qp: horizon must be >= 1");
  const Vec3& u0 = am.dm.u0;
  const double tol = 1e-12;
  for (int i = 0; i < 3; ++i) {
    const double span = std::max(1.0, std::abs(b.u_max[i]));
    if (u_prev[i] < b.u_min[i] - tol * span || u_prev[i] > b.u_max[i] + tol * span || b.u_min[i] > b.u_max[i] ||
        !(b.du_max[i] > 0))
      throw std::invalid_argument("build_qp: previous input incompatible with bounds and rate limits");
  }
  const int n = 3 * N;
  const Eigen::Matrix<double, 8, 1> wc = am.Btd * dist_ref + am.ct;

  // Y = Phi xt + Gamma U + Lambda, stacked over k = 1..N.
  Eigen::MatrixXd Gamma = Eigen::MatrixXd::Zero(2 * N, n);
  Eigen::VectorXd free = Eigen::VectorXd::Zero(2 * N);
  Eigen::Matrix<double, 8, 1> x = xt_now;
  std::vector<Eigen::Matrix<double, 2, 3>> CAkB(N);  // Ct At^k Bt
  Eigen::Matrix<double, 8, 3> AkB = am.Bt;
  for (int k = 0; k < N; ++k) {
    CAkB[k] = am.Ct * AkB;
    AkB = am.At * AkB;
  }
  for (int k = 1; k <= N; ++k) {
    x = am.At * x + wc;
    free.segment<2>(2 * (k - 1)) = am.Ct * x;
    for (int j = 0; j < k; ++j) Gamma.block<2, 3>(2 * (k - 1), 3 * j) = CAkB[k - 1 - j];
  }
  Eigen::MatrixXd Qbar = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  Eigen::MatrixXd Rbar = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < N; ++k) {
    Qbar.block<2, 2>(2 * k, 2 * k) = w.Q;
    Rbar.block<3, 3>(3 * k, 3 * k) = w.R;
  }
  QPProblem qp;
  const Eigen::MatrixXd QG = Qbar * Gamma;
  qp.H = 2.0 * (Gamma.transpose() * QG + Rbar);
  qp.H = 0.5 * (qp.H + qp.H.transpose());
  qp.q = 2.0 * QG.transpose() * free;

  // Box: 2n rows; rate: 2n rows (first move against u_prev).
  qp.G = Eigen::MatrixXd::Zero(4 * n, n);
  qp.h = Eigen::VectorXd::Zero(4 * n);
  int row = 0;
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < 3; ++i) {
      const int c = 3 * k + i;
      qp.G(row, c) = 1.0;
      qp.h(row++) = b.u_max[i] - u0[i];
      qp.G(row, c) = -1.0;
      qp.h(row++) = u0[i] - b.u_min[i];
    }
  }
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < 3; ++i) {
      const int c = 3 * k + i;
      if (k == 0) {
        const double dprev = u_prev[i] - u0[i];
        qp.G(row, c) = 1.0;
        qp.h(row++) = b.du_max[i] + dprev;
        qp.G(row, c) = -1.0;
        qp.h(row++) = b.du_max[i] - dprev;
      } else {
        qp.G(row, c) = 1.0;
        qp.G(row, c - 3) = -1.0;
        qp.h(row++) = b.du_max[i];
        qp.G(row, c) = -1.0;
        qp.G(row, c - 3) = 1.0;
        qp.h(row++) = b.du_max[i];
      }
    }
  }
  return qp;
}

Vec3 clamp_input(const Vec3& u, const Vec3& u_prev, const InputBounds& b) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    const double lo = std::max(b.u_min[i], u_prev[i] - b.du_max[i]);
    const double hi = std::min(b.u_max[i], u_prev[i] + b.du_max[i]);
    double v = std::clamp(u[i], lo, hi);
    // Rounding in u_prev +/- du may land a hair outside; pull back inside.
    while (v - u_prev[i] > b.du_max[i]) v = std::nextafter(v, u_prev[i]);
    while (u_prev[i] - v > b.du_max[i]) v = std::nextafter(v, u_prev[i]);
    out[i] = v;
  }
  return out;
}

Controller::Controller(PlantConfig cfg, MPCConfig mc, const Vec6& x, const Vec3& u, const Vec2& d)
    : cfg_(std::move(cfg)), mc_(std::move(mc)), perm_(cfg_.mode), u_prev_(u) {
  rebuild(x, u, d);
}

void Controller::rebuild(const Vec6& x, const Vec3& u, const Vec2& d) {
  lm_ = linearize(cfg_, x, u, d);
  const DiscreteModel dm = permute(discretize(lm_, mc_.Ts), perm_);
  am_ = augment(dm, mc_.form);
}

bool Controller::maybe_relinearize(double t, const Vec6& x, const Vec2& d, bool forced) {
  const bool due = mc_.relin_period > 0 && t - last_relin_ >= mc_.relin_period - 1e-9;
  if (!forced && !due) return false;
  try {
    rebuild(x, u_prev_, d);
  } catch (const std::exception&) {
    return false;  // keep the previous model
  }
  last_relin_ = t;
  return true;
}

Vec3 Controller::step(double t, const Vec6& x, const Vec2& r, const Vec2& d) {
  (void)t;
  info_ = {};
  const double kappa = mc_.form == IntegratorForm::kAccumulate ? 1.0 : 0.0;
  if (x_last_) {
    const Vec2 q_last = heat_outputs(*x_last_, u_prev_, d_last_, cfg_);
    xi_ = kappa * xi_ + perm_.Py * (q_last - r_last_);
  }
  const DiscreteModel& dm = am_.dm;
  Eigen::Matrix<double, 8, 1> xt;
  xt.head<6>() = perm_.Px * x - dm.x0;
  xt.tail<2>() = xi_;
  Eigen::Vector4d dr;
  dr.head<2>() = perm_.Py * d - dm.d0;
  dr.tail<2>() = perm_.Py * r;
  InputBounds bmn;
  bmn.u_min = perm_.Pu * mc_.bounds.u_min;
  bmn.u_max = perm_.Pu * mc_.bounds.u_max;
  bmn.du_max = perm_.Pu * mc_.bounds.du_max;
  const Vec3 u_prev_mn = perm_.Pu * u_prev_;

  Vec3 u = u_prev_;
  try {
    const QPProblem qp = build_qp(am_, xt, dr, mc_.weights, bmn, u_prev_mn, mc_.horizon);
    const int N = mc_.horizon;
    Eigen::VectorXd z0(3 * N);
    for (int k = 0; k < N; ++k) z0.segment<3>(3 * k) = u_prev_mn - dm.u0;
    if (z_prev_.size() == 3 * N) {
      // Shifted previous plan; used only if it is feasible for the new problem.
      Eigen::VectorXd zs(3 * N);
      for (int k = 0; k < N; ++k) zs.segment<3>(3 * k) = z_prev_.segment<3>(3 * std::min(k + 1, N - 1)) + u0_prev_ - dm.u0;
      const double slack_tol = 1e-9 * std::max(1.0, qp.h.cwiseAbs().maxCoeff());
      if ((qp.G * zs - qp.h).maxCoeff() <= slack_tol) z0 = zs;
    }
    const QPResult res = solve_qp(qp, z0);
    z_prev_ = res.z;
    u0_prev_ = dm.u0;
    info_.qp_iterations = res.iterations;
    const Vec3 du = res.z.head<3>();
    u = perm_.Pu.transpose() * (dm.u0 + du);
    failures_ = 0;
  } catch (const std::exception& e) {
    info_.solver_failed = true;
    if (++failures_ >= mc_.max_failures)
      throw ControllerError(std::string("controller failed ") + std::to_string(failures_) +
                            " consecutive steps: " + e.what());
  }
  u = clamp_input(u, u_prev_, mc_.bounds);
  x_last_ = x;
  d_last_ = d;
  r_last_ = r;
  u_prev_ = u;
  return u;
}

}  // namespace mh
