#include "mh/qp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mh {

QPResult solve_qp(const QPProblem& qp, const Eigen::VectorXd& z0, double tol, int max_iter) {
  const Eigen::Index n = qp.H.rows();
  const Eigen::Index m = qp.G.rows();
  if (qp.H.cols() != n || qp.q.size() != n || z0.size() != n || (m && qp.G.cols() != n) || qp.h.size() != m)
    throw QPError("solve_qp: dimension mismatch");
  if (max_iter <= 0) max_iter = static_cast<int>(10 * (n + m) + 100);

  // Rescale z = S y so the Hessian has unit diagonal.
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(qp.H(i, i) > 0)) throw QPError("solve_qp: Hessian not positive definite");
    s[i] = 1.0 / std::sqrt(qp.H(i, i));
  }
  const Eigen::MatrixXd H = s.asDiagonal() * qp.H * s.asDiagonal();
  const Eigen::VectorXd q = s.cwiseProduct(qp.q);
  Eigen::MatrixXd G = qp.G * s.asDiagonal();
  Eigen::VectorXd hv = qp.h;
  // Normalize rows so slack tolerances are comparable.
  for (Eigen::Index i = 0; i < m; ++i) {
    const double nr = G.row(i).norm();
    if (nr > 0) {
      G.row(i) /= nr;
      hv[i] /= nr;
    }
  }
  Eigen::VectorXd y = s.cwiseInverse().cwiseProduct(z0);
  const double feas_tol = tol * std::max(1.0, hv.size() ? hv.cwiseAbs().maxCoeff() : 1.0);
  if (m && ((G * y - hv).maxCoeff() > feas_tol)) throw QPError("solve_qp: starting point infeasible");

  const Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success) throw QPError("solve_qp: Hessian not positive definite");

  // Seed the working set with independent constraints active at the start.
  std::vector<Eigen::Index> W;
  std::vector<char> in_w(m, 0);
  {
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index i = 0; i < m && static_cast<Eigen::Index>(W.size()) < n; ++i) {
      if (hv[i] - G.row(i).dot(y) > feas_tol) continue;
      Eigen::VectorXd v = G.row(i).transpose();
      for (const auto& b : basis) v -= b.dot(v) * b;
      if (v.norm() < 1e-8) continue;
      basis.push_back(v / v.norm());
      W.push_back(i);
      in_w[i] = 1;
    }
  }

  Eigen::VectorXd lam_w;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Eigen::Index k = static_cast<Eigen::Index>(W.size());
    const Eigen::VectorXd g = H * y + q;
    Eigen::VectorXd p;
    // Range-space step: S lam = -Gw H^-1 g with S = Gw H^-1 Gw'.
    Eigen::MatrixXd Gw(k, n);
    for (Eigen::Index a = 0; a < k; ++a) Gw.row(a) = G.row(W[a]);
    const Eigen::VectorXd Hg = llt.solve(g);
    Eigen::MatrixXd Y;
    Eigen::LDLT<Eigen::MatrixXd> S;
    if (k > 0) {
      Y = llt.matrixL().solve(Gw.transpose());
      S.compute(Y.transpose() * Y);
      lam_w = S.solve(-(Gw * Hg));
      if (S.info() != Eigen::Success || !lam_w.allFinite()) throw QPError("solve_qp: degenerate working set");
      p = -(Hg + llt.solve(Gw.transpose() * lam_w));
    } else {
      lam_w.resize(0);
      p = -Hg;
    }

    if (p.lpNorm<Eigen::Infinity>() <= tol * std::max(1.0, y.lpNorm<Eigen::Infinity>())) {
      Eigen::Index worst = -1;
      double most = -tol;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (lam_w[a] < most) {
          most = lam_w[a];
          worst = a;
        }
      }
      if (worst < 0) break;
      in_w[W[worst]] = 0;
      W.erase(W.begin() + worst);
      continue;
    }
    double alpha = 1.0;
    Eigen::Index block = -1;
    const double pn = p.norm();
    std::vector<char> skip(m, 0);
    for (;;) {
      alpha = 1.0;
      block = -1;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (in_w[i] || skip[i]) continue;
        const double gp = G.row(i).dot(p);
        if (gp <= 1e-14 * pn) continue;
        const double slack = std::max(0.0, hv[i] - G.row(i).dot(y));
        const double a = slack / gp;
        if (a < alpha) {
          alpha = a;
          block = i;
        }
      }
      if (block < 0 || k == 0) break;
      // A row dependent on the working set cannot block a step in its null
      // space; its apparent G p is rounding. Adding it would make S singular.
      const Eigen::VectorXd v = llt.matrixL().solve(G.row(block).transpose());
      const Eigen::VectorXd r = v - Y * S.solve(Y.transpose() * v);
      if (k < n && r.norm() > 1e-8 * v.norm()) break;
      skip[block] = 1;
    }
    y += alpha * p;
    if (block >= 0) {
      W.push_back(block);
      in_w[block] = 1;
    }
  }
  if (it >= max_iter) {
    const double step = (H * y + q).lpNorm<Eigen::Infinity>();
    const double infeas = m ? std::max(0.0, (G * y - hv).maxCoeff()) : 0.0;
    throw QPError("solve_qp: iteration cap reached (gradient " + std::to_string(step) + ", infeasibility " +
                  std::to_string(infeas) + ")");
  }

  QPResult res;
  res.iterations = it;
  res.z = s.cwiseProduct(y);
  res.lambda = Eigen::VectorXd::Zero(m);
  for (std::size_t a = 0; a < W.size(); ++a) {
    const Eigen::Index i = W[a];
    // Undo the row normalization so lambda refers to the caller's rows.
    const double nr = (qp.G.row(i) * s.asDiagonal()).norm();
    res.lambda[i] = nr > 0 ? lam_w[a] / nr : lam_w[a];
  }
  Eigen::VectorXd grad = H * y + q;
  for (std::size_t a = 0; a < W.size(); ++a) grad += lam_w[a] * G.row(W[a]).transpose();
  res.stationarity = grad.lpNorm<Eigen::Infinity>();
  res.infeasibility = m ? std::max(0.0, (qp.G * res.z - qp.h).maxCoeff()) : 0.0;
  return res;
}

}  // namespace mh
