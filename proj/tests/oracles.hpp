#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance suite. None of them call the library routine they check.

#include <cmath>
#include <random>

#include "mh/linearize.hpp"
#include "mh/mpc.hpp"
#include "mh/qp.hpp"

namespace mh::test {

// Central difference of a scalar function extrapolated over four halvings.
template <class F>
double richardson(F f, double h) {
  double T[4][4];
  for (int i = 0; i < 4; ++i) {
    const double hi = h / std::pow(2.0, i);
    T[i][0] = (f(hi) - f(-hi)) / (2 * hi);
    for (int k = 1; k <= i; ++k) {
      const double p = std::pow(4.0, k);
      T[i][k] = (p * T[i][k - 1] - T[i - 1][k - 1]) / (p - 1);
    }
  }
  return T[3][3];
}

/// Worst relative deviation of the linearization at (x, u, d) from
/// Richardson-extrapolated partials of the nonlinear model. Entries whose
/// oracle is exactly zero must also be exactly zero, else the result is +inf.
inline double jacobian_oracle_error(const Model& m, const LinearModel& lm, const Vec6& x0, const Vec3& u0,
                                    const Vec2& d0) {
  double worst = 0;
  for (int j = 0; j < 11; ++j) {
    const double v = j < 6 ? x0[j] : (j < 9 ? u0[j - 6] : d0[j - 9]);
    const double h = 1e-4 * std::max(std::abs(v), 1e-3);
    for (int i = 0; i < 8; ++i) {
      auto f = [&](double s) {
        Vec6 x = x0;
        Vec3 u = u0;
        Vec2 d = d0;
        if (j < 6) x[j] += s;
        else if (j < 9) u[j - 6] += s;
        else d[j - 9] += s;
        return i < 6 ? m.f(x, u, d)[i] : m.g(x, u, d)[i - 6];
      };
      const double oracle = richardson(f, h);
      double got;
      if (i < 6) got = j < 6 ? lm.A(i, j) : (j < 9 ? lm.B(i, j - 6) : lm.Bd(i, j - 9));
      else got = j < 6 ? lm.C(i - 6, j) : (j < 9 ? lm.D(i - 6, j - 6) : lm.Dd(i - 6, j - 9));
      if (oracle == 0.0) {
        if (got != 0.0) return INFINITY;
        continue;
      }
      worst = std::max(worst, std::abs(got - oracle) / std::abs(oracle));
    }
  }
  return worst;
}

inline LinearModel random_model(std::mt19937_64& rng, bool stable) {
  std::normal_distribution<double> N(0, 1);
  LinearModel lm;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) lm.A(i, j) = 0.3 * N(rng);
    for (int j = 0; j < 3; ++j) lm.B(i, j) = N(rng);
    for (int j = 0; j < 2; ++j) lm.Bd(i, j) = N(rng);
    lm.x0[i] = 1 + std::abs(N(rng));
    lm.f0[i] = N(rng);
  }
  if (stable) lm.A -= 2.0 * Eigen::Matrix<double, 6, 6>::Identity();
  lm.C.setRandom();
  lm.D.setRandom();
  lm.Dd.setRandom();
  lm.u0.setOnes();
  lm.d0.setOnes();
  lm.g0.setZero();
  return lm;
}

// Exponential of the block matrix [A B Bd f0; 0] by its power series in
// long double, summed until the terms stop contributing.
using MatL = Eigen::Matrix<long double, 12, 12>;
inline MatL series_zoh(const LinearModel& lm, double Ts) {
  MatL M = MatL::Zero();
  M.block<6, 6>(0, 0) = lm.A.cast<long double>();
  M.block<6, 3>(0, 6) = lm.B.cast<long double>();
  M.block<6, 2>(0, 9) = lm.Bd.cast<long double>();
  M.block<6, 1>(0, 11) = lm.f0.cast<long double>();
  M *= static_cast<long double>(Ts);
  MatL sum = MatL::Identity(), term = MatL::Identity();
  for (int k = 1; k < 200; ++k) {
    term = term * M / static_cast<long double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-30L) break;
  }
  return sum;
}

/// Worst deviation, relative to the largest entry, of discretize() from the
/// series on `count` random stable systems.
inline double zoh_oracle_error(unsigned seed, int count) {
  std::mt19937_64 rng(seed);
  double worst = 0;
  for (int k = 0; k < count; ++k) {
    const LinearModel lm = random_model(rng, true);
    const DiscreteModel dm = discretize(lm, 1.0);
    const MatL E = series_zoh(lm, 1.0);
    const double scale = static_cast<double>(E.topRows<6>().cwiseAbs().maxCoeff());
    Eigen::Matrix<double, 6, 12> got;
    got << dm.Ad, dm.Bu, dm.Bdist, dm.drift;
    const Eigen::Matrix<double, 6, 12> ref = E.topRows<6>().cast<double>();
    worst = std::max(worst, (got - ref).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

inline QPProblem box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& q, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  const int n = static_cast<int>(q.size());
  QPProblem qp{H, q, Eigen::MatrixXd::Zero(2 * n, n), Eigen::VectorXd::Zero(2 * n)};
  for (int i = 0; i < n; ++i) {
    qp.G(2 * i, i) = 1;
    qp.h(2 * i) = hi[i];
    qp.G(2 * i + 1, i) = -1;
    qp.h(2 * i + 1) = -lo[i];
  }
  return qp;
}

// Projected gradient with step 1/L, iterated until the iterate stops moving.
inline Eigen::VectorXd projected_gradient(const Eigen::MatrixXd& H, const Eigen::VectorXd& q,
                                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  const double L = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().maxCoeff();
  Eigen::VectorXd z = (lo + hi) / 2;
  for (int it = 0; it < 2000000; ++it) {
    const Eigen::VectorXd zn = (z - (H * z + q) / L).cwiseMax(lo).cwiseMin(hi);
    const double step = (zn - z).cwiseAbs().maxCoeff();
    z = zn;
    if (step < 1e-15) break;
  }
  return z;
}

struct BoxQPCheck {
  double worst_deviation = 0;
  double worst_stationarity = 0;
  double worst_infeasibility = 0;
};

/// Solves `count` random box QPs and compares them with projected gradient.
inline BoxQPCheck box_qp_oracle(unsigned seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);
  std::uniform_int_distribution<int> dim(1, 6);
  BoxQPCheck c;
  for (int k = 0; k < count; ++k) {
    const int n = dim(rng);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) M(i, j) = U(rng);
    const Eigen::MatrixXd H = M * M.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd q(n), lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
      q[i] = 3 * U(rng);
      lo[i] = -1 + 0.5 * U(rng);
      hi[i] = 1 + 0.5 * U(rng);
    }
    const QPResult r = solve_qp(box_qp(H, q, lo, hi), Eigen::VectorXd::Zero(n));
    const Eigen::VectorXd ref = projected_gradient(H, q, lo, hi);
    c.worst_deviation = std::max(c.worst_deviation, (r.z - ref).cwiseAbs().maxCoeff());
    c.worst_stationarity = std::max(c.worst_stationarity, r.stationarity);
    c.worst_infeasibility = std::max(c.worst_infeasibility, r.infeasibility);
  }
  return c;
}

// First move of the unconstrained finite-horizon problem by a backward
// Riccati recursion on [xt; 1] with stage cost y'Qy + du'R du.
inline Vec3 riccati_first_move(const AugmentedModel& am, const Eigen::Matrix<double, 8, 1>& xt,
                               const Eigen::Vector4d& dr, const MPCWeights& w, int N) {
  using Mat9 = Eigen::Matrix<double, 9, 9>;
  Mat9 Az = Mat9::Zero();
  Az.topLeftCorner<8, 8>() = am.At;
  Az.block<8, 1>(0, 8) = am.Btd * dr + am.ct;
  Az(8, 8) = 1;
  Eigen::Matrix<double, 9, 3> Bz = Eigen::Matrix<double, 9, 3>::Zero();
  Bz.topRows<8>() = am.Bt;
  Eigen::Matrix<double, 2, 9> Cz = Eigen::Matrix<double, 2, 9>::Zero();
  Cz.leftCols<8>() = am.Ct;
  const Mat9 S = Cz.transpose() * w.Q * Cz;
  Mat9 P = S;
  Eigen::Matrix<double, 3, 9> K;
  for (int k = N - 1; k >= 0; --k) {
    const Eigen::Matrix3d G = w.R + Bz.transpose() * P * Bz;
    K = G.ldlt().solve(Bz.transpose() * P * Az);
    P = S + Az.transpose() * P * (Az - Bz * K);
    P = 0.5 * (P + P.transpose());
  }
  Eigen::Matrix<double, 9, 1> z;
  z << xt, 1.0;
  return -K * z;
}

/// Relative deviation of the controller's first move from the Riccati
/// oracle after a reference step, bounds removed, at plant equilibrium.
inline double riccati_oracle_error(const PlantConfig& cfg, const Vec6& x, const Vec3& u0, const Vec2& d,
                                   const Vec2& r) {
  MPCConfig mc;
  mc.bounds.u_min = Vec3::Constant(-1e12);
  mc.bounds.u_max = Vec3::Constant(1e12);
  mc.bounds.du_max = Vec3::Constant(1e12);
  Controller ctl(cfg, mc, x, u0, d);
  const Vec3 u = ctl.step(0.0, x, r, d);
  const ModePermutation P(cfg.mode);
  const AugmentedModel& am = ctl.augmented();
  Eigen::Matrix<double, 8, 1> xt = Eigen::Matrix<double, 8, 1>::Zero();
  xt.head<6>() = P.Px * x - am.dm.x0;
  Eigen::Vector4d dr;
  dr << P.Py * d - am.dm.d0, P.Py * r;
  const Vec3 du = riccati_first_move(am, xt, dr, mc.weights, mc.horizon);
  const Vec3 ref = P.Pu.transpose() * (am.dm.u0 + du);
  double worst = 0;
  for (int i = 0; i < 3; ++i) {
    const double ref_move = ref[i] - u0[i];
    const double diff = std::abs((u[i] - u0[i]) - ref_move);
    if (diff > 1e-15) worst = std::max(worst, diff / std::abs(ref_move));
  }
  return worst;
}

}  // namespace mh::test
